#include "hsu/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "binary_io.hpp"
#include "hsu/kernels.hpp"
#include "hsu/spectra.hpp"

namespace hsu {
namespace {

constexpr double kMissingSentinel = -1e32;
constexpr char kCubeMagic[4] = {'H', 'C', 'U', 'B'};
constexpr std::uint16_t kCubeVersion = 1;

std::string_view trimmed(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view token, std::size_t line_no, const std::string& context) {
  const std::string buf(token);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  require(end != buf.c_str() && trimmed(std::string_view(end)).empty(), errc::unparseable_line,
          context + ": cannot parse '" + buf + "' on line " + std::to_string(line_no));
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void fill_missing(std::vector<double>& values, const std::vector<char>& missing) {
  const std::size_t n = values.size();
  std::size_t i = 0;
  while (i < n) {
    if (!missing[i]) {
      ++i;
      continue;
    }
    std::size_t run_end = i;
    while (run_end < n && missing[run_end]) ++run_end;
    const bool has_left = i > 0;
    const bool has_right = run_end < n;
    for (std::size_t t = i; t < run_end; ++t) {
      if (has_left && has_right) {
        const double left = values[i - 1];
        const double right = values[run_end];
        const double frac = static_cast<double>(t - (i - 1)) / static_cast<double>(run_end - (i - 1));
        values[t] = left + frac * (right - left);
      } else if (has_left) {
        values[t] = values[i - 1];
      } else {
        values[t] = values[run_end];
      }
    }
    i = run_end;
  }
}

}  // namespace

Spectrum parse_usgs_ascii(std::istream& in) {
  std::string header;
  require(static_cast<bool>(std::getline(in, header)), errc::empty_file,
          "spectrum stream is empty");
  std::string name(trimmed(header));
  if (name.empty()) name = "spectrum";

  std::vector<double> values;
  std::vector<char> missing;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view body = trimmed(line);
    if (body.empty()) continue;
    const double v = parse_double(body, line_no, "spectrum '" + name + "'");
    values.push_back(v);
    missing.push_back(v <= kMissingSentinel);
  }
  require(!values.empty(), errc::empty_file, "spectrum '" + name + "' has no data lines");
  require(std::find(missing.begin(), missing.end(), char(0)) != missing.end(), errc::all_missing,
          "spectrum '" + name + "' has every channel marked missing");

  fill_missing(values, missing);
  return make_spectrum(std::move(name), std::move(values));
}

Spectrum load_usgs_spectrum(const std::string& path) {
  std::ifstream file(path);
  require(file.is_open(), errc::io_error, "cannot open for reading: " + path);
  return parse_usgs_ascii(file);
}

std::vector<Spectrum> load_usgs_directory(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  std::vector<Spectrum> spectra;
  spectra.reserve(paths.size());
  for (const auto& p : paths) spectra.push_back(load_usgs_spectrum(p));
  return spectra;
}

Dictionary load_dictionary_csv(const std::string& path) {
  std::ifstream file(path);
  require(file.is_open(), errc::io_error, "cannot open for reading: " + path);

  std::string line;
  require(static_cast<bool>(std::getline(file, line)), errc::empty_file,
          path + " is empty");
  std::size_t bands = 0;
  for (char ch : line) bands += (ch == ',');
  require(bands >= 1, errc::unparseable_line, path + ": header must be name,v1,...,vp");

  std::vector<Spectrum> atoms;
  std::size_t line_no = 1;
  while (std::getline(file, line)) {
    ++line_no;
    if (trimmed(line).empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    require(fields.size() == bands + 1, errc::unparseable_line,
            path + ": line " + std::to_string(line_no) + " has " +
                std::to_string(fields.size()) + " fields, expected " + std::to_string(bands + 1));
    std::vector<double> values(bands);
    for (std::size_t b = 0; b < bands; ++b) values[b] = parse_double(fields[b + 1], line_no, path);
    atoms.push_back(make_spectrum(std::string(trimmed(fields[0])), std::move(values)));
  }
  require(!atoms.empty(), errc::empty_file, path + " has no atom rows");
  return Dictionary(atoms);
}

void save_dictionary_csv(const Dictionary& dict, const std::string& path) {
  for (const std::string& name : dict.names()) {
    require(name.find(',') == std::string::npos && name.find('\n') == std::string::npos,
            errc::bad_config, "atom name '" + name + "' cannot be stored in CSV");
  }
  std::ofstream file(path);
  require(file.is_open(), errc::io_error, "cannot open for writing: " + path);

  file << "name";
  for (std::size_t b = 1; b <= dict.bands(); ++b) file << ",v" << b;
  file << "\n";
  for (std::size_t i = 0; i < dict.size(); ++i) {
    file << dict.name(i);
    const double* col = dict.col(i);
    for (std::size_t b = 0; b < dict.bands(); ++b) file << ',' << format_double(col[b]);
    file << "\n";
  }
  file.flush();
  require(file.good(), errc::io_error, "write failed: " + path);
}

HyperCube load_cube(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  require(file.is_open(), errc::io_error, "cannot open for reading: " + path);
  io::Reader r(file, path);

  char magic[4];
  r.bytes(magic, 4);
  require(std::equal(magic, magic + 4, kCubeMagic), errc::bad_magic,
          path + " is not a cube file");
  const std::uint16_t version = r.u16();
  require(version == kCubeVersion, errc::version_unsupported,
          "unsupported cube version " + std::to_string(version));

  const std::size_t bands = r.u32();
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  require(bands > 0 && rows > 0 && cols > 0, errc::dimension_mismatch,
          path + " declares an empty cube");

  HyperCube cube(bands, rows, cols);
  for (std::size_t band = 0; band < bands; ++band) {
    for (std::size_t row = 0; row < rows; ++row) {
      for (std::size_t col = 0; col < cols; ++col) cube.at(band, row, col) = r.f64();
    }
  }
  require(all_finite(cube.raw()), errc::non_finite_data, path + " contains NaN/Inf values");
  return cube;
}

void save_cube(const HyperCube& cube, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  require(file.is_open(), errc::io_error, "cannot open for writing: " + path);
  io::Writer w(file, path);

  w.bytes(kCubeMagic, 4);
  w.u16(kCubeVersion);
  w.u32(static_cast<std::uint32_t>(cube.bands()));
  w.u32(static_cast<std::uint32_t>(cube.rows()));
  w.u32(static_cast<std::uint32_t>(cube.cols()));
  for (std::size_t band = 0; band < cube.bands(); ++band) {
    for (std::size_t row = 0; row < cube.rows(); ++row) {
      for (std::size_t col = 0; col < cube.cols(); ++col) w.f64(cube.at(band, row, col));
    }
  }
  file.flush();
  require(file.good(), errc::io_error, "write failed: " + path);
}

Dictionary synth_dictionary(const std::string& style, std::size_t atoms, std::size_t bands,
                            std::uint64_t seed) {
  require(atoms >= 1 && bands >= 1, errc::bad_config,
          "synthetic dictionary needs positive atom and band counts");

  Rng rng(mix_seed({seed, 0x64696374ull}));
  std::vector<std::string> names(atoms);
  std::vector<double> data(atoms * bands);

  for (std::size_t i = 0; i < atoms; ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "atom%04zu", i);
    names[i] = buf;
    double* col = data.data() + i * bands;
    if (style == "gaussian") {
      for (std::size_t b = 0; b < bands; ++b) col[b] = rng.normal();
    } else if (style == "smooth") {
      const std::size_t bumps = 3 + rng.below(3);
      for (std::size_t t = 0; t < bumps; ++t) {
        const double center = rng.uniform_co() * static_cast<double>(bands - 1);
        const double width = (0.02 + 0.15 * rng.uniform_co()) * static_cast<double>(bands) + 1.0;
        const double amplitude = 0.2 + rng.uniform01();
        for (std::size_t b = 0; b < bands; ++b) {
          const double d = (static_cast<double>(b) - center) / width;
          col[b] += amplitude * std::exp(-0.5 * d * d);
        }
      }
      for (std::size_t b = 0; b < bands; ++b) col[b] += 0.05;
    } else {
      throw Error(errc::bad_config, "unknown dictionary style '" + style + "'");
    }
  }
  return normalize(Dictionary(bands, std::move(names), std::move(data)));
}

Dictionary load_dictionary_uri(const std::string& uri, std::uint64_t seed) {
  if (uri.rfind("synth:", 0) != 0) return normalize(load_dictionary_csv(uri));

  std::vector<std::string> parts;
  std::string rest = uri;
  while (true) {
    const auto colon = rest.find(':');
    parts.push_back(rest.substr(0, colon));
    if (colon == std::string::npos) break;
    rest = rest.substr(colon + 1);
  }
  require(parts.size() == 4, errc::bad_config,
          "dictionary URI must be synth:<style>:<atoms>:<bands>, got '" + uri + "'");
  char* end = nullptr;
  const unsigned long atoms = std::strtoul(parts[2].c_str(), &end, 10);
  require(end && *end == '\0' && atoms > 0, errc::bad_config,
          "bad atom count in dictionary URI '" + uri + "'");
  const unsigned long bands = std::strtoul(parts[3].c_str(), &end, 10);
  require(end && *end == '\0' && bands > 0, errc::bad_config,
          "bad band count in dictionary URI '" + uri + "'");
  return synth_dictionary(parts[1], atoms, bands, seed);
}

void apply_awgn(std::span<double> y, double snr_db, Rng& rng) {
  const double signal = kernels::nrm2sq(y.data(), y.size());
  require(signal > 0.0, errc::zero_signal, "cannot scale noise against an all-zero signal");
  const double sigma =
      std::sqrt(signal / (static_cast<double>(y.size()) * std::pow(10.0, snr_db / 10.0)));
  for (double& v : y) v += sigma * rng.normal();
}

std::vector<double> apply_sign_flip(const Dictionary& dict, std::span<const std::size_t> support,
                                    std::span<const double> betas, double flip_probability,
                                    FlipMode mode, Rng& rng) {
  require(support.size() == betas.size(), errc::dimension_mismatch,
          "support and coefficient lengths differ");
  require(flip_probability >= 0.0 && flip_probability <= 1.0, errc::bad_config,
          "flip probability must lie in [0, 1]");

  const std::size_t p = dict.bands();
  std::vector<double> y(p, 0.0);
  for (std::size_t t = 0; t < support.size(); ++t) {
    const double* atom = dict.col(support[t]);
    if (mode == FlipMode::Atom) {
      const double eps = rng.bernoulli(flip_probability) ? -1.0 : 1.0;
      kernels::axpy(eps * betas[t], atom, y.data(), p);
    } else {
      for (std::size_t b = 0; b < p; ++b) {
        const double eps = rng.bernoulli(flip_probability) ? -1.0 : 1.0;
        y[b] += eps * betas[t] * atom[b];
      }
    }
  }
  return y;
}

SyntheticScene synth_scene(const Dictionary& dict, std::size_t rows, std::size_t cols,
                           std::size_t support_size, const NoiseSpec& noise, std::uint64_t seed) {
  const std::size_t n = dict.size();
  const std::size_t p = dict.bands();
  require(support_size <= n, errc::support_too_large,
          "support size " + std::to_string(support_size) + " exceeds dictionary size " +
              std::to_string(n));

  SyntheticScene scene{HyperCube(p, rows, cols),
                       AbundanceMap(n, rows, cols, dict.names(), support_size), seed, noise};

  std::vector<std::size_t> deck(n);
  std::vector<std::size_t> support(support_size);
  std::vector<double> betas(support_size);

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      Rng rng = pixel_stream(seed, r * cols + c);

      // Partial Fisher-Yates; the chosen prefix is then sorted so later
      // draws line up with ascending atom index.
      std::iota(deck.begin(), deck.end(), std::size_t{0});
      for (std::size_t t = 0; t < support_size; ++t) {
        std::swap(deck[t], deck[t + rng.below(n - t)]);
      }
      std::copy_n(deck.begin(), support_size, support.begin());
      std::sort(support.begin(), support.end());
      for (std::size_t t = 0; t < support_size; ++t) betas[t] = rng.uniform01();

      double* truth = scene.ground_truth.slice(r, c);
      for (std::size_t t = 0; t < support_size; ++t) truth[support[t]] = betas[t];

      double* y = scene.cube.pixel(r, c);
      if (noise.kind == NoiseSpec::Kind::SignFlip) {
        const std::vector<double> mixed =
            apply_sign_flip(dict, support, betas, noise.flip_probability, noise.flip_mode, rng);
        std::copy(mixed.begin(), mixed.end(), y);
      } else {
        for (std::size_t t = 0; t < support_size; ++t) {
          kernels::axpy(betas[t], dict.col(support[t]), y, p);
        }
        if (noise.kind == NoiseSpec::Kind::Awgn) apply_awgn({y, p}, noise.snr_db, rng);
      }
    }
  }
  return scene;
}

}  // namespace hsu
