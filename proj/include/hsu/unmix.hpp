// Per-pixel pruned non-negative least squares over a hypercube, plus a
// matching pursuit counterpart and linear reconstruction.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsu/pruning.hpp"
#include "hsu/types.hpp"

namespace hsu {

struct PixelFailure {
  std::size_t row = 0;
  std::size_t col = 0;
  errc code = errc::convergence_failure;
  std::string message;
};

struct UnmixResult {
  AbundanceMap abundances;
  std::vector<PixelFailure> failures;  // sorted by (row, col); failed pixels are all-zero
};

// Scores atoms per `method`, keeps the k best, solves NNLS on that
// sub-dictionary, and scatters the coefficients into a length-N vector.
std::vector<double> pnnls_pixel(std::span<const double> y, const Dictionary& dict, std::size_t k,
                                PruneMethod method);

// pnnls_pixel applied to every pixel. Pixels are independent; `threads` <= 0
// picks the hardware count. A pixel whose solve fails is left all-zero and
// reported in `failures` instead of aborting the batch.
UnmixResult pnnls_cube(const HyperCube& cube, const Dictionary& dict, std::size_t k,
                       PruneMethod method, int threads = 0);

// Matching pursuit per pixel with k greedy iterations (coefficients may be
// negative; the sparsity bound still holds).
UnmixResult mp_cube(const HyperCube& cube, const Dictionary& dict, std::size_t k,
                    int threads = 0);

// Per-pixel y_hat = A c over the first dict.size() coefficient rows.
HyperCube reconstruct(const AbundanceMap& abundances, const Dictionary& dict);

}  // namespace hsu
