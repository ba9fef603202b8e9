// Data-parallel double-precision kernels used by every inner loop in hsu.
//
// A KernelTable bundles one implementation of each primitive. The scalar
// table is the portable reference; AVX2 (x86-64) and NEON (aarch64) tables
// are compiled when the target supports them and picked at runtime. The
// HSU_KERNELS environment variable ("scalar", "avx2", "neon") forces a
// specific table, e.g. for reproducing results across machines.
//
// SIMD variants may reassociate sums, so reductions agree with the scalar
// reference only up to roundoff. The equivalence tests pin that contract.
#pragma once

#include <cstddef>
#include <vector>

namespace hsu::kernels {

struct KernelTable {
  const char* name;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*nrm2sq)(const double* a, std::size_t n);
  double (*sqdist)(const double* a, const double* b, std::size_t n);
  double (*sum_abs)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  void (*scale)(double alpha, double* x, std::size_t n);
  // out = a (elementwise*) b; out may alias a or b
  void (*hadamard)(const double* a, const double* b, double* out, std::size_t n);
};

// Always available.
const KernelTable& scalar_table();

// Tables compiled for this target; entries other than scalar may be null at
// runtime when the CPU lacks the instruction set.
std::vector<const KernelTable*> available_tables();

// The table selected at startup (best available unless HSU_KERNELS is set).
const KernelTable& active();

inline double dot(const double* a, const double* b, std::size_t n) { return active().dot(a, b, n); }
inline double nrm2sq(const double* a, std::size_t n) { return active().nrm2sq(a, n); }
inline double sqdist(const double* a, const double* b, std::size_t n) { return active().sqdist(a, b, n); }
inline double sum_abs(const double* a, std::size_t n) { return active().sum_abs(a, n); }
inline void axpy(double alpha, const double* x, double* y, std::size_t n) { active().axpy(alpha, x, y, n); }
inline void scale(double alpha, double* x, std::size_t n) { active().scale(alpha, x, n); }
inline void hadamard(const double* a, const double* b, double* out, std::size_t n) { active().hadamard(a, b, out, n); }

double nrm2(const double* a, std::size_t n);

}  // namespace hsu::kernels
