// Core domain types: spectra, dictionaries, hypercubes, abundance maps.
//
// Memory conventions used throughout hsu:
//   - matrices are dense column-major (column j starts at data + j*rows);
//   - hypercubes keep each pixel's spectrum contiguous, pixels in row-major
//     order, so the raw buffer doubles as the p x (rows*cols) pooled matrix;
//   - abundance maps keep each pixel's coefficient slice contiguous.
// All types are immutable in normal use; operations return new values.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "hsu/errors.hpp"

namespace hsu {

// Lightweight non-owning view of a dense column-major matrix.
struct MatrixView {
  const double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  const double* col(std::size_t j) const { return data + j * rows; }
};

struct Spectrum {
  std::string name;
  std::vector<double> values;

  std::size_t bands() const { return values.size(); }
};

// Validates finiteness and non-emptiness.
Spectrum make_spectrum(std::string name, std::vector<double> values);

// Ordered collection of named atoms over a shared band grid, stored as a
// column-major p x N matrix.
class Dictionary {
 public:
  // From parsed spectra; all atoms must share the band count, names must be
  // unique and nonempty.
  explicit Dictionary(const std::vector<Spectrum>& atoms);

  // From raw column-major storage (used by the spectra operations).
  Dictionary(std::size_t bands, std::vector<std::string> names, std::vector<double> data);

  std::size_t size() const { return names_.size(); }   // N
  std::size_t bands() const { return bands_; }         // p

  const std::string& name(std::size_t i) const { return names_[i]; }
  const std::vector<std::string>& names() const { return names_; }
  const double* col(std::size_t i) const { return data_.data() + i * bands_; }
  std::span<const double> atom(std::size_t i) const { return {col(i), bands_}; }
  MatrixView view() const { return {data_.data(), bands_, size()}; }
  const std::vector<double>& data() const { return data_; }

  // True when every atom has unit L2 norm within `tol`.
  bool is_normalized(double tol = 1e-9) const;

 private:
  std::size_t bands_ = 0;
  std::vector<std::string> names_;
  std::vector<double> data_;  // column-major p x N
};

// p-band image; pixel spectra contiguous, pixels row-major.
class HyperCube {
 public:
  HyperCube(std::size_t bands, std::size_t rows, std::size_t cols);

  std::size_t bands() const { return bands_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t pixels() const { return rows_ * cols_; }

  double* pixel(std::size_t r, std::size_t c) { return data_.data() + (r * cols_ + c) * bands_; }
  const double* pixel(std::size_t r, std::size_t c) const {
    return data_.data() + (r * cols_ + c) * bands_;
  }
  double& at(std::size_t band, std::size_t r, std::size_t c) { return pixel(r, c)[band]; }
  double at(std::size_t band, std::size_t r, std::size_t c) const { return pixel(r, c)[band]; }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  // The buffer viewed as the p x (rows*cols) pooled matrix, pixel (i,j) in
  // column i*cols + j.
  MatrixView pooled() const { return {data_.data(), bands_, pixels()}; }

 private:
  std::size_t bands_, rows_, cols_;
  std::vector<double> data_;
};

// Per-pixel coefficient rows (N dictionary atoms, optionally followed by
// compression-vector rows). Each pixel's slice is contiguous.
class AbundanceMap {
 public:
  AbundanceMap(std::size_t coeff_rows, std::size_t rows, std::size_t cols,
               std::vector<std::string> names, std::size_t sparsity_k);

  std::size_t coeff_rows() const { return coeff_rows_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t pixels() const { return rows_ * cols_; }
  std::size_t sparsity_k() const { return sparsity_k_; }
  const std::vector<std::string>& names() const { return names_; }

  double* slice(std::size_t r, std::size_t c) {
    return data_.data() + (r * cols_ + c) * coeff_rows_;
  }
  const double* slice(std::size_t r, std::size_t c) const {
    return data_.data() + (r * cols_ + c) * coeff_rows_;
  }
  double at(std::size_t row, std::size_t r, std::size_t c) const { return slice(r, c)[row]; }

  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  std::size_t nonzeros() const;

 private:
  std::size_t coeff_rows_, rows_, cols_, sparsity_k_;
  std::vector<std::string> names_;
  std::vector<double> data_;
};

bool all_finite(std::span<const double> values);

inline void require(bool condition, errc code, const std::string& message) {
  if (!condition) throw Error(code, message);
}

}  // namespace hsu
