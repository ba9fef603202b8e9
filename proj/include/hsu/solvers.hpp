// Numerical kernels: non-negative least squares (Lawson-Hanson active set),
// unconstrained minimum-norm least squares, matching pursuit, and thin SVD.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hsu/types.hpp"

namespace hsu {

struct NnlsSolution {
  std::vector<double> coefficients;  // length n, all >= 0
  double residual_norm = 0.0;
  std::size_t iterations = 0;  // passive-set subproblem solves
  // Worst KKT margin: max over passive |g_i| and active max(0, -g_i) with
  // g = A^T (A c - y). Reported as computed, never clamped.
  double kkt_violation = 0.0;
};

// Minimizes ||y - A c||_2 subject to c >= 0 by the Lawson-Hanson active-set
// method; each passive-set subproblem is solved by dense Householder QR.
// Throws errc::max_iterations after 3n subproblem solves without
// convergence and errc::dimension_mismatch on shape disagreement.
NnlsSolution nnls(MatrixView A, std::span<const double> y);

// Minimum-norm least-squares solution (rank-deficient safe).
std::vector<double> lstsq(MatrixView A, std::span<const double> y);

struct PursuitSolution {
  std::vector<std::size_t> support;  // distinct indices, first-selection order
  std::vector<double> coefficients;  // aligned with support; re-selections accumulate
  double residual_norm = 0.0;

  // Coefficients scattered into a length-n vector.
  std::vector<double> dense(std::size_t n) const;
};

// Classic matching pursuit: k greedy residual projections onto the atom with
// the largest |<a_i, r>| (ties to the lowest index). Atoms must be unit
// norm. Stops early only if the residual becomes orthogonal to every atom.
PursuitSolution matching_pursuit(MatrixView A, std::span<const double> y, std::size_t k);

struct SvdResult {
  std::vector<double> u;                // p x r, column-major, orthonormal columns
  std::vector<double> singular_values;  // length r, nonincreasing
  std::vector<double> v;                // m x r, column-major, orthonormal columns
  std::size_t rows = 0;                 // p
  std::size_t cols = 0;                 // m
  std::size_t rank = 0;                 // r
};

// Thin SVD of X (p x m); r = 0 requests min(p, m) triplets. Backed by a
// dense bidiagonal divide-and-conquer routine; throws
// errc::convergence_failure if it reports failure.
SvdResult thin_svd(MatrixView X, std::size_t r = 0);

}  // namespace hsu
