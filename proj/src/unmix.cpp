#include "hsu/unmix.hpp"

#include <algorithm>
#include <mutex>

#include "hsu/kernels.hpp"
#include "hsu/parallel.hpp"
#include "hsu/solvers.hpp"

namespace hsu {
namespace {

// Core of pnnls_pixel with preconditions already checked.
void pnnls_into(std::span<const double> y, const Dictionary& dict, std::size_t k,
                PruneMethod method, double* out) {
  const std::size_t p = dict.bands();
  const PruneScores scored = score(dict, y, method);
  const std::vector<std::size_t> picked = select_top_k(scored, k);

  std::vector<double> sub(p * picked.size());
  for (std::size_t t = 0; t < picked.size(); ++t) {
    std::copy_n(dict.col(picked[t]), p, sub.begin() + t * p);
  }

  const NnlsSolution sol = nnls({sub.data(), p, picked.size()}, y);
  std::fill_n(out, dict.size(), 0.0);
  for (std::size_t t = 0; t < picked.size(); ++t) out[picked[t]] = sol.coefficients[t];
}

void mp_into(std::span<const double> y, const Dictionary& dict, std::size_t k, double* out) {
  const PursuitSolution sol = matching_pursuit(dict.view(), y, k);
  std::fill_n(out, dict.size(), 0.0);
  for (std::size_t t = 0; t < sol.support.size(); ++t) out[sol.support[t]] = sol.coefficients[t];
}

template <typename PixelFn>
UnmixResult run_cube(const HyperCube& cube, const Dictionary& dict, std::size_t k, int threads,
                     PixelFn&& fn) {
  require(cube.bands() == dict.bands(), errc::dimension_mismatch,
          "cube band count does not match dictionary");
  require(dict.is_normalized(), errc::not_normalized, "dictionary atoms must be unit norm");
  require(k >= 1 && k <= dict.size(), errc::k_out_of_range,
          "sparsity k must lie in [1, " + std::to_string(dict.size()) + "]");

  UnmixResult result{AbundanceMap(dict.size(), cube.rows(), cube.cols(), dict.names(), k), {}};
  std::mutex failures_mutex;

  parallel_for(cube.pixels(), threads, [&](std::size_t pix) {
    const std::size_t r = pix / cube.cols();
    const std::size_t c = pix % cube.cols();
    try {
      const std::span<const double> y{cube.pixel(r, c), cube.bands()};
      require(all_finite(y), errc::non_finite_data, "pixel contains non-finite values");
      fn(y, result.abundances.slice(r, c));
    } catch (const Error& e) {
      std::lock_guard<std::mutex> lock(failures_mutex);
      result.failures.push_back({r, c, e.code(), e.what()});
    }
  });

  std::sort(result.failures.begin(), result.failures.end(),
            [](const PixelFailure& a, const PixelFailure& b) {
              return a.row != b.row ? a.row < b.row : a.col < b.col;
            });
  return result;
}

}  // namespace

std::vector<double> pnnls_pixel(std::span<const double> y, const Dictionary& dict, std::size_t k,
                                PruneMethod method) {
  require(dict.bands() == y.size(), errc::dimension_mismatch,
          "measurement band count does not match dictionary");
  require(dict.is_normalized(), errc::not_normalized, "dictionary atoms must be unit norm");
  require(k >= 1 && k <= dict.size(), errc::k_out_of_range,
          "sparsity k must lie in [1, " + std::to_string(dict.size()) + "]");
  require(all_finite(y), errc::non_finite_data, "measurement contains non-finite values");

  std::vector<double> out(dict.size());
  pnnls_into(y, dict, k, method, out.data());
  return out;
}

UnmixResult pnnls_cube(const HyperCube& cube, const Dictionary& dict, std::size_t k,
                       PruneMethod method, int threads) {
  return run_cube(cube, dict, k, threads, [&](std::span<const double> y, double* out) {
    pnnls_into(y, dict, k, method, out);
  });
}

UnmixResult mp_cube(const HyperCube& cube, const Dictionary& dict, std::size_t k, int threads) {
  return run_cube(cube, dict, k, threads,
                  [&](std::span<const double> y, double* out) { mp_into(y, dict, k, out); });
}

HyperCube reconstruct(const AbundanceMap& abundances, const Dictionary& dict) {
  require(abundances.coeff_rows() >= dict.size(), errc::dimension_mismatch,
          "abundance map has fewer coefficient rows than dictionary atoms");

  HyperCube cube(dict.bands(), abundances.rows(), abundances.cols());
  for (std::size_t r = 0; r < abundances.rows(); ++r) {
    for (std::size_t c = 0; c < abundances.cols(); ++c) {
      const double* coeff = abundances.slice(r, c);
      double* y = cube.pixel(r, c);
      for (std::size_t i = 0; i < dict.size(); ++i) {
        if (coeff[i] != 0.0) kernels::axpy(coeff[i], dict.col(i), y, dict.bands());
      }
    }
  }
  return cube;
}

}  // namespace hsu
