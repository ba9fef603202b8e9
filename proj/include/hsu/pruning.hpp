// Atom scoring and sub-dictionary selection: correlation magnitude or
// Gaussian-RBF kernel against a measurement, then top-k or threshold picks.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsu/types.hpp"

namespace hsu {

enum class PruneKind { Standard, Rbf };

struct PruneMethod {
  PruneKind kind = PruneKind::Standard;
  double gamma = 1.0;  // only read when kind == Rbf

  static PruneMethod standard() { return {PruneKind::Standard, 1.0}; }
  static PruneMethod rbf(double gamma = 1.0) { return {PruneKind::Rbf, gamma}; }
};

struct PruneScores {
  std::vector<double> scores;  // one nonnegative value per atom
  PruneMethod method;
};

// scores_i = |<a_i, y>|. Ranking is scale invariant in y, so y is used raw.
PruneScores score_standard(const Dictionary& dict, std::span<const double> y);

// scores_i = exp(-gamma * ||a_i - y||^2) over a unit-normalized copy of y.
// A zero-norm y is scored as is. Requires gamma > 0.
PruneScores score_rbf(const Dictionary& dict, std::span<const double> y, double gamma);

PruneScores score(const Dictionary& dict, std::span<const double> y, PruneMethod method);

// Indices of the k largest scores, ascending. Ties keep the lowest index.
std::vector<std::size_t> select_top_k(const PruneScores& scores, std::size_t k);

// Indices with score strictly above delta, ascending. May be empty.
std::vector<std::size_t> select_threshold(const PruneScores& scores, double delta);

}  // namespace hsu
