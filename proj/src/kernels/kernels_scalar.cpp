// Portable reference kernels. Plain loops, no manual reassociation: SIMD
// variants are tested against these.
#include "hsu/kernels.hpp"

#include <cmath>

namespace hsu::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double nrm2sq_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
  return acc;
}

double sqdist_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_abs_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::fabs(a[i]);
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void hadamard_scalar(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

constexpr KernelTable kScalarTable = {
    "scalar",        dot_scalar,   nrm2sq_scalar, sqdist_scalar,
    sum_abs_scalar,  axpy_scalar,  scale_scalar,  hadamard_scalar,
};

}  // namespace

const KernelTable& scalar_table() { return kScalarTable; }

double nrm2(const double* a, std::size_t n) { return std::sqrt(nrm2sq(a, n)); }

}  // namespace hsu::kernels
