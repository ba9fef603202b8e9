// Ingestion (ASCII spectra, dictionary CSV, binary cubes) and synthetic
// scene generation with additive Gaussian or sign-flip mixing noise.
#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <span>
#include <string>
#include <vector>

#include "hsu/rng.hpp"
#include "hsu/types.hpp"

namespace hsu {

enum class FlipMode {
  Atom,  // one +-1 draw per constituent atom
  Band,  // independent +-1 draw per band of each constituent atom
};

struct NoiseSpec {
  enum class Kind { None, Awgn, SignFlip };
  Kind kind = Kind::None;
  double snr_db = 0.0;            // Awgn only
  double flip_probability = 0.0;  // SignFlip only, in [0, 1]
  FlipMode flip_mode = FlipMode::Atom;

  static NoiseSpec none() { return {}; }
  static NoiseSpec awgn(double snr_db) { return {Kind::Awgn, snr_db, 0.0, FlipMode::Atom}; }
  static NoiseSpec sign_flip(double probability, FlipMode mode = FlipMode::Atom) {
    return {Kind::SignFlip, 0.0, probability, mode};
  }
};

struct SyntheticScene {
  HyperCube cube;
  AbundanceMap ground_truth;  // the mixing coefficients per pixel
  std::uint64_t seed = 0;
  NoiseSpec noise;
};

// One spectrum per stream: a title line, then one decimal value per line.
// Values at or below -1e32 mark missing channels and are filled by linear
// interpolation between the nearest valid neighbors (edges copy the nearest
// valid value).
Spectrum parse_usgs_ascii(std::istream& in);
Spectrum load_usgs_spectrum(const std::string& path);

// Every regular file in the directory, in filename order.
std::vector<Spectrum> load_usgs_directory(const std::string& dir);

// CSV with header `name,v1,...,vp`, one atom per row, values printed with 17
// significant digits so the round trip is value-exact.
Dictionary load_dictionary_csv(const std::string& path);
void save_dictionary_csv(const Dictionary& dict, const std::string& path);

// Binary cube container: magic HCUB, version u16, p/rows/cols u32
// little-endian, then band-major (pixels row-major within a band) f64 data.
HyperCube load_cube(const std::string& path);
void save_cube(const HyperCube& cube, const std::string& path);

// Unit-norm random dictionaries. "gaussian" draws i.i.d. normal entries;
// "smooth" sums a few random positive bumps per atom. Atoms are named
// atom0000, atom0001, ...
Dictionary synth_dictionary(const std::string& style, std::size_t atoms, std::size_t bands,
                            std::uint64_t seed);

// "synth:<style>:<atoms>:<bands>" generates a dictionary with the given
// seed; anything else is read as a CSV path and normalized.
Dictionary load_dictionary_uri(const std::string& uri, std::uint64_t seed);

// Adds zero-mean Gaussian noise scaled to the requested signal-to-noise
// ratio: per-band variance ||y||^2 / (p * 10^(snr_db/10)).
void apply_awgn(std::span<double> y, double snr_db, Rng& rng);

// y = sum_i eps_i beta_i a_i with eps_i = -1 at `flip_probability`, drawn
// per atom or per band according to `mode`. Support indices must be sorted;
// draws happen in that order.
std::vector<double> apply_sign_flip(const Dictionary& dict, std::span<const std::size_t> support,
                                    std::span<const double> betas, double flip_probability,
                                    FlipMode mode, Rng& rng);

// Per pixel: a fresh uniformly random support of `support_size` atoms,
// coefficients i.i.d. Uniform(0,1] on it, y = A beta, then the requested
// noise. Each pixel consumes its own seed-derived substream, so the result
// does not depend on traversal order.
SyntheticScene synth_scene(const Dictionary& dict, std::size_t rows, std::size_t cols,
                           std::size_t support_size, const NoiseSpec& noise, std::uint64_t seed);

}  // namespace hsu
