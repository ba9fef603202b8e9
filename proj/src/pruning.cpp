#include "hsu/pruning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hsu/kernels.hpp"

namespace hsu {

PruneScores score_standard(const Dictionary& dict, std::span<const double> y) {
  require(dict.bands() == y.size(), errc::dimension_mismatch,
          "score_standard: measurement band count does not match dictionary");
  PruneScores out;
  out.method = PruneMethod::standard();
  out.scores.resize(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) {
    out.scores[i] = std::fabs(kernels::dot(dict.col(i), y.data(), y.size()));
  }
  return out;
}

PruneScores score_rbf(const Dictionary& dict, std::span<const double> y, double gamma) {
  require(dict.bands() == y.size(), errc::dimension_mismatch,
          "score_rbf: measurement band count does not match dictionary");
  require(gamma > 0.0, errc::non_positive_gamma, "score_rbf: gamma must be positive");

  std::vector<double> unit(y.begin(), y.end());
  const double norm = kernels::nrm2(unit.data(), unit.size());
  if (norm > 0.0) kernels::scale(1.0 / norm, unit.data(), unit.size());

  PruneScores out;
  out.method = PruneMethod::rbf(gamma);
  out.scores.resize(dict.size());
  for (std::size_t i = 0; i < dict.size(); ++i) {
    out.scores[i] = std::exp(-gamma * kernels::sqdist(dict.col(i), unit.data(), unit.size()));
  }
  return out;
}

PruneScores score(const Dictionary& dict, std::span<const double> y, PruneMethod method) {
  return method.kind == PruneKind::Rbf ? score_rbf(dict, y, method.gamma)
                                       : score_standard(dict, y);
}

std::vector<std::size_t> select_top_k(const PruneScores& scores, std::size_t k) {
  const std::size_t n = scores.scores.size();
  require(k >= 1 && k <= n, errc::k_out_of_range,
          "select_top_k: k must lie in [1, " + std::to_string(n) + "]");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (scores.scores[a] != scores.scores[b])
                        return scores.scores[a] > scores.scores[b];
                      return a < b;
                    });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> select_threshold(const PruneScores& scores, double delta) {
  require(delta >= 0.0, errc::bad_config, "select_threshold: delta must be nonnegative");
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < scores.scores.size(); ++i) {
    if (scores.scores[i] > delta) picked.push_back(i);
  }
  return picked;
}

}  // namespace hsu
