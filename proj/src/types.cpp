#include "hsu/types.hpp"

#include <cmath>
#include <cstring>
#include <unordered_set>

#include "hsu/kernels.hpp"

namespace hsu {

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

Spectrum make_spectrum(std::string name, std::vector<double> values) {
  require(!values.empty(), errc::dimension_mismatch, "spectrum must have at least one band");
  require(all_finite(values), errc::non_finite_data, "spectrum '" + name + "' has NaN/Inf values");
  return Spectrum{std::move(name), std::move(values)};
}

namespace {

void check_names_unique(const std::vector<std::string>& names) {
  std::unordered_set<std::string_view> seen;
  for (const auto& n : names) {
    require(!n.empty(), errc::bad_config, "atom name must be nonempty");
    require(seen.insert(n).second, errc::bad_config, "duplicate atom name '" + n + "'");
  }
}

}  // namespace

Dictionary::Dictionary(const std::vector<Spectrum>& atoms) {
  require(!atoms.empty(), errc::empty_result, "dictionary needs at least one atom");
  bands_ = atoms.front().bands();
  require(bands_ > 0, errc::dimension_mismatch, "atoms must have at least one band");
  names_.reserve(atoms.size());
  data_.reserve(atoms.size() * bands_);
  for (const auto& atom : atoms) {
    require(atom.bands() == bands_, errc::dimension_mismatch,
            "atom '" + atom.name + "' has " + std::to_string(atom.bands()) + " bands, expected " +
                std::to_string(bands_));
    require(all_finite(atom.values), errc::non_finite_data,
            "atom '" + atom.name + "' has NaN/Inf values");
    names_.push_back(atom.name);
    data_.insert(data_.end(), atom.values.begin(), atom.values.end());
  }
  check_names_unique(names_);
}

Dictionary::Dictionary(std::size_t bands, std::vector<std::string> names, std::vector<double> data)
    : bands_(bands), names_(std::move(names)), data_(std::move(data)) {
  require(bands_ > 0, errc::dimension_mismatch, "dictionary band count must be positive");
  require(!names_.empty(), errc::empty_result, "dictionary needs at least one atom");
  require(data_.size() == bands_ * names_.size(), errc::dimension_mismatch,
          "dictionary storage size does not match bands * atoms");
  require(all_finite(data_), errc::non_finite_data, "dictionary has NaN/Inf values");
  check_names_unique(names_);
}

bool Dictionary::is_normalized(double tol) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::fabs(kernels::nrm2(col(i), bands_) - 1.0) > tol) return false;
  }
  return true;
}

HyperCube::HyperCube(std::size_t bands, std::size_t rows, std::size_t cols)
    : bands_(bands), rows_(rows), cols_(cols) {
  require(bands > 0 && rows > 0 && cols > 0, errc::dimension_mismatch,
          "hypercube dimensions must be positive");
  data_.assign(bands * rows * cols, 0.0);
}

AbundanceMap::AbundanceMap(std::size_t coeff_rows, std::size_t rows, std::size_t cols,
                           std::vector<std::string> names, std::size_t sparsity_k)
    : coeff_rows_(coeff_rows), rows_(rows), cols_(cols), sparsity_k_(sparsity_k),
      names_(std::move(names)) {
  require(coeff_rows > 0 && rows > 0 && cols > 0, errc::dimension_mismatch,
          "abundance map dimensions must be positive");
  require(names_.size() == coeff_rows_, errc::dimension_mismatch,
          "abundance map needs one label per coefficient row");
  data_.assign(coeff_rows * rows * cols, 0.0);
}

std::size_t AbundanceMap::nonzeros() const {
  std::size_t count = 0;
  for (double v : data_) count += (v != 0.0);
  return count;
}

}  // namespace hsu
