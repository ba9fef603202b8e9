// Residual compression: pool per-pixel unmixing residuals, take leading left
// singular vectors as extra basis columns, and fit their coefficients.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsu/pruning.hpp"
#include "hsu/types.hpp"
#include "hsu/unmix.hpp"

namespace hsu {

class CompressionBasis {
 public:
  CompressionBasis() = default;
  // Columns must be orthonormal, singular values nonincreasing.
  CompressionBasis(std::size_t bands, std::vector<double> vectors,
                   std::vector<double> singular_values);

  std::size_t bands() const { return bands_; }
  std::size_t count() const { return singular_values_.size(); }  // c
  const double* col(std::size_t j) const { return vectors_.data() + j * bands_; }
  MatrixView view() const { return {vectors_.data(), bands_, count()}; }
  const std::vector<double>& vectors() const { return vectors_; }
  const std::vector<double>& singular_values() const { return singular_values_; }

  // The first c columns as a new basis; c must not exceed count().
  CompressionBasis truncated(std::size_t c) const;

 private:
  std::size_t bands_ = 0;
  std::vector<double> vectors_;  // bands x count, column-major
  std::vector<double> singular_values_;
};

struct CompressedScene {
  AbundanceMap abundances;  // (N + c) coefficient rows per pixel
  CompressionBasis basis;
  std::vector<std::string> dictionary_names;  // first N row labels
  std::vector<PixelFailure> failures;
};

struct CompressOptions {
  // Fit basis coefficients by rerunning the pruned NNLS pipeline over the
  // basis columns (RBF scores, sparsity = basis size) instead of signed
  // projection. Loses the variance carried by negative coefficients.
  bool nonneg_basis = false;
  int threads = 0;
};

// Per-pixel y - A c over the first dict.size() coefficient rows.
HyperCube residual_cube(const HyperCube& cube, const Dictionary& dict,
                        const AbundanceMap& abundances);

// Leading left singular vectors of the residuals pooled into a
// bands x pixels matrix (pixel (i,j) in column i*cols + j). Requests for
// more vectors than the residual's numerical rank are trimmed to that rank,
// so count() may come back smaller than c.
CompressionBasis compression_basis(const HyperCube& residuals, std::size_t c);

// Stage two on top of existing stage-one abundances: recompute residuals,
// fit basis coefficients per pixel, return the stacked (N + c)-row map.
// Lets one basis serve several coefficient maps (different solvers, same
// scene).
CompressedScene attach_basis(const HyperCube& cube, const Dictionary& dict,
                             const UnmixResult& stage_one, const CompressionBasis& basis,
                             const CompressOptions& options = {});

// Full pipeline: pnnls_cube, residual pooling, SVD basis of size c, per-pixel
// coefficient fit. c = 0 skips the basis stage entirely.
CompressedScene compress_scene(const HyperCube& cube, const Dictionary& dict, std::size_t k,
                               std::size_t c, PruneMethod method,
                               const CompressOptions& options = {});

// Per-pixel A c + U w reconstruction of a compressed scene.
HyperCube reconstruct_compressed(const CompressedScene& scene, const Dictionary& dict);

struct CompressionError {
  std::vector<double> per_pixel;  // rows*cols values, pixel-major
  double scene_mean = 0.0;
};

// Per-pixel L1 difference divided by band count; scene value is the mean
// over pixels.
CompressionError compression_error(const HyperCube& cube, const HyperCube& reconstruction);

// Binary container round trip. Sparse coefficients are stored as
// (pixel u32, row u32, value f64) triplets; loading reproduces the saved
// scene bit for bit. The sparsity bound k is not stored; loaded maps report
// sparsity_k = N.
void save_compressed(const CompressedScene& scene, const std::string& path);
CompressedScene load_compressed(const std::string& path);

}  // namespace hsu
