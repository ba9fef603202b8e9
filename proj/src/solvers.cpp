#include "hsu/solvers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hsu/kernels.hpp"

namespace hsu {
namespace {

using EigenMap = Eigen::Map<const Eigen::MatrixXd>;
using EigenVecMap = Eigen::Map<const Eigen::VectorXd>;

// In-place Householder QR least squares on the columns of A indexed by
// `cols`. Writes the subproblem solution (aligned with `cols`) into z.
// Near-singular diagonal entries yield a zero coefficient for that column,
// which the active-set driver then treats as removable.
class QrWorkspace {
 public:
  void solve(MatrixView A, std::span<const double> y, std::span<const std::size_t> cols,
             std::vector<double>& z) {
    const std::size_t p = A.rows;
    const std::size_t m = cols.size();
    factor_.resize(p * m);
    rhs_.assign(y.begin(), y.end());
    for (std::size_t j = 0; j < m; ++j) {
      std::copy_n(A.col(cols[j]), p, factor_.begin() + j * p);
    }

    diag_.resize(m);
    double r_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double* col_j = factor_.data() + j * p;
      const std::size_t tail = p - j;

      double sigma = kernels::nrm2(col_j + j, tail);
      r_max = std::max(r_max, sigma);
      if (sigma == 0.0 || sigma <= 1e-13 * r_max) {
        diag_[j] = 0.0;  // column dependent on the ones before it
        continue;
      }
      if (col_j[j] > 0.0) sigma = -sigma;
      const double u0 = col_j[j] - sigma;
      diag_[j] = sigma;
      // Reflector v = (u0, col_j[j+1..]) with beta = 1/(sigma*u0) (negative).
      const double beta = 1.0 / (sigma * u0);
      col_j[j] = u0;

      for (std::size_t t = j + 1; t < m; ++t) {
        double* col_t = factor_.data() + t * p;
        const double w = beta * kernels::dot(col_j + j, col_t + j, tail);
        kernels::axpy(w, col_j + j, col_t + j, tail);
      }
      const double w = beta * kernels::dot(col_j + j, rhs_.data() + j, tail);
      kernels::axpy(w, col_j + j, rhs_.data() + j, tail);
    }

    // Back substitution on R (diag in diag_, strict upper in factor_).
    z.assign(m, 0.0);
    for (std::size_t idx = m; idx-- > 0;) {
      if (diag_[idx] == 0.0) {
        z[idx] = 0.0;
        continue;
      }
      double sum = rhs_[idx];
      for (std::size_t t = idx + 1; t < m; ++t) sum -= factor_[t * p + idx] * z[t];
      z[idx] = sum / diag_[idx];
    }
  }

 private:
  std::vector<double> factor_;
  std::vector<double> rhs_;
  std::vector<double> diag_;
};

void gradient(MatrixView A, std::span<const double> y, std::span<const double> x,
              std::vector<double>& residual, std::vector<double>& g) {
  const std::size_t p = A.rows;
  residual.assign(y.begin(), y.end());
  for (std::size_t j = 0; j < A.cols; ++j) {
    if (x[j] != 0.0) kernels::axpy(-x[j], A.col(j), residual.data(), p);
  }
  g.resize(A.cols);
  for (std::size_t j = 0; j < A.cols; ++j) {
    g[j] = -kernels::dot(A.col(j), residual.data(), p);  // (A^T(Ax - y))_j
  }
}

}  // namespace

NnlsSolution nnls(MatrixView A, std::span<const double> y) {
  require(A.cols >= 1, errc::dimension_mismatch, "nnls needs at least one column");
  require(A.rows == y.size(), errc::dimension_mismatch,
          "nnls: y length does not match matrix rows");

  const std::size_t n = A.cols;
  const std::size_t p = A.rows;

  NnlsSolution out;
  out.coefficients.assign(n, 0.0);

  std::vector<double> residual;
  std::vector<double> g;
  gradient(A, y, out.coefficients, residual, g);

  double dual_scale = 0.0;
  for (double gi : g) dual_scale = std::max(dual_scale, std::fabs(gi));
  const double entry_tol = 1e-10 * dual_scale;

  std::vector<std::size_t> passive;
  std::vector<char> in_passive(n, 0);
  std::vector<double> z;
  QrWorkspace qr;
  const std::size_t max_solves = 3 * n;

  auto finish = [&] {
    out.residual_norm = kernels::nrm2(residual.data(), p);
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (in_passive[j]) {
        worst = std::max(worst, std::fabs(g[j]));
      } else {
        worst = std::max(worst, std::max(0.0, -g[j]));
      }
    }
    out.kkt_violation = worst;
    return out;
  };

  if (dual_scale == 0.0) return finish();  // y orthogonal to every column

  while (true) {
    // Most negative gradient among active (zero) variables.
    std::size_t enter = n;
    double best = entry_tol;
    for (std::size_t j = 0; j < n; ++j) {
      if (!in_passive[j] && -g[j] > best) {
        best = -g[j];
        enter = j;
      }
    }
    if (enter == n) return finish();

    passive.push_back(enter);
    in_passive[enter] = 1;

    while (true) {
      require(out.iterations < max_solves, errc::max_iterations,
              "nnls exceeded " + std::to_string(max_solves) + " subproblem solves");
      ++out.iterations;
      qr.solve(A, y, passive, z);

      double min_z = std::numeric_limits<double>::infinity();
      for (double zj : z) min_z = std::min(min_z, zj);
      if (min_z > 0.0) {
        for (std::size_t t = 0; t < passive.size(); ++t) out.coefficients[passive[t]] = z[t];
        break;
      }

      // Step toward z until the first passive variable hits zero.
      double alpha = std::numeric_limits<double>::infinity();
      std::size_t limiting = passive.size();
      for (std::size_t t = 0; t < passive.size(); ++t) {
        if (z[t] <= 0.0) {
          const double xt = out.coefficients[passive[t]];
          const double ratio = xt <= 0.0 ? 0.0 : xt / (xt - z[t]);
          if (ratio < alpha) {
            alpha = ratio;
            limiting = t;
          }
        }
      }
      for (std::size_t t = 0; t < passive.size(); ++t) {
        const double xt = out.coefficients[passive[t]];
        out.coefficients[passive[t]] = xt + alpha * (z[t] - xt);
      }
      if (limiting < passive.size()) out.coefficients[passive[limiting]] = 0.0;

      for (std::size_t t = passive.size(); t-- > 0;) {
        if (out.coefficients[passive[t]] <= 0.0) {
          out.coefficients[passive[t]] = 0.0;
          in_passive[passive[t]] = 0;
          passive.erase(passive.begin() + static_cast<std::ptrdiff_t>(t));
        }
      }
    }

    gradient(A, y, out.coefficients, residual, g);
  }
}

std::vector<double> lstsq(MatrixView A, std::span<const double> y) {
  require(A.cols >= 1, errc::dimension_mismatch, "lstsq needs at least one column");
  require(A.rows == y.size(), errc::dimension_mismatch,
          "lstsq: y length does not match matrix rows");

  EigenMap mat(A.data, static_cast<Eigen::Index>(A.rows), static_cast<Eigen::Index>(A.cols));
  EigenVecMap rhs(y.data(), static_cast<Eigen::Index>(y.size()));

  // Complete orthogonal decomposition gives the minimum-norm solution for
  // rank-deficient systems.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(mat);
  Eigen::VectorXd x = cod.solve(rhs);
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> PursuitSolution::dense(std::size_t n) const {
  std::vector<double> full(n, 0.0);
  for (std::size_t t = 0; t < support.size(); ++t) full[support[t]] = coefficients[t];
  return full;
}

PursuitSolution matching_pursuit(MatrixView A, std::span<const double> y, std::size_t k) {
  require(k >= 1, errc::k_out_of_range, "matching pursuit needs k >= 1");
  require(A.cols >= 1, errc::dimension_mismatch, "matching pursuit needs at least one column");
  require(A.rows == y.size(), errc::dimension_mismatch,
          "matching pursuit: y length does not match matrix rows");

  const std::size_t p = A.rows;
  const std::size_t n = A.cols;

  PursuitSolution out;
  std::vector<double> residual(y.begin(), y.end());
  std::vector<std::size_t> slot(n, n);  // atom index -> position in support

  for (std::size_t it = 0; it < k; ++it) {
    std::size_t best = 0;
    double best_abs = -1.0;
    double best_val = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = kernels::dot(A.col(j), residual.data(), p);
      const double a = std::fabs(v);
      if (a > best_abs) {
        best_abs = a;
        best_val = v;
        best = j;
      }
    }
    if (best_abs == 0.0) break;  // residual orthogonal to the whole dictionary

    if (slot[best] == n) {
      slot[best] = out.support.size();
      out.support.push_back(best);
      out.coefficients.push_back(0.0);
    }
    out.coefficients[slot[best]] += best_val;
    kernels::axpy(-best_val, A.col(best), residual.data(), p);
  }

  out.residual_norm = kernels::nrm2(residual.data(), p);
  return out;
}

SvdResult thin_svd(MatrixView X, std::size_t r) {
  require(X.rows >= 1 && X.cols >= 1, errc::dimension_mismatch, "thin_svd needs a nonempty matrix");
  const std::size_t full = std::min(X.rows, X.cols);
  if (r == 0) r = full;
  require(r <= full, errc::dimension_mismatch, "thin_svd: r exceeds min(rows, cols)");

  EigenMap mat(X.data, static_cast<Eigen::Index>(X.rows), static_cast<Eigen::Index>(X.cols));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
  require(svd.info() == Eigen::Success, errc::convergence_failure, "SVD did not converge");

  SvdResult out;
  out.rows = X.rows;
  out.cols = X.cols;
  out.rank = r;
  out.u.resize(X.rows * r);
  out.v.resize(X.cols * r);
  out.singular_values.resize(r);
  for (std::size_t j = 0; j < r; ++j) {
    out.singular_values[j] = svd.singularValues()(static_cast<Eigen::Index>(j));
    Eigen::Map<Eigen::VectorXd>(out.u.data() + j * X.rows, static_cast<Eigen::Index>(X.rows)) =
        svd.matrixU().col(static_cast<Eigen::Index>(j));
    Eigen::Map<Eigen::VectorXd>(out.v.data() + j * X.cols, static_cast<Eigen::Index>(X.cols)) =
        svd.matrixV().col(static_cast<Eigen::Index>(j));
  }
  return out;
}

}  // namespace hsu
