#include "hsu/spectra.hpp"

#include <algorithm>
#include <cmath>

#include "hsu/kernels.hpp"

namespace hsu {

Dictionary normalize(const Dictionary& dict) {
  const std::size_t p = dict.bands();
  std::vector<double> data(dict.data());
  for (std::size_t i = 0; i < dict.size(); ++i) {
    double* column = data.data() + i * p;
    const double norm = kernels::nrm2(column, p);
    require(norm > kZeroAtomTol, errc::zero_atom,
            "atom '" + dict.name(i) + "' has norm " + std::to_string(norm));
    kernels::scale(1.0 / norm, column, p);
  }
  return Dictionary(p, dict.names(), std::move(data));
}

GramSchmidtResult gram_schmidt(const Dictionary& dict, double tolerance) {
  require(tolerance > 0.0, errc::bad_config, "gram_schmidt tolerance must be positive");
  const std::size_t p = dict.bands();

  std::vector<double> basis;  // accepted orthonormal columns, column-major
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  std::vector<double> work(p);

  for (std::size_t i = 0; i < dict.size(); ++i) {
    std::copy(dict.atom(i).begin(), dict.atom(i).end(), work.begin());
    const double original_norm = kernels::nrm2(work.data(), p);
    if (original_norm <= kZeroAtomTol) {
      dropped.push_back(dict.name(i));
      continue;
    }

    // Two MGS sweeps; the second pass restores orthogonality lost to
    // cancellation when atoms are nearly dependent.
    const std::size_t accepted = kept.size();
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (std::size_t j = 0; j < accepted; ++j) {
        const double* basis_col = basis.data() + j * p;
        const double proj = kernels::dot(basis_col, work.data(), p);
        kernels::axpy(-proj, basis_col, work.data(), p);
      }
    }

    const double residual_norm = kernels::nrm2(work.data(), p);
    if (residual_norm < tolerance * original_norm) {
      dropped.push_back(dict.name(i));
      continue;
    }
    kernels::scale(1.0 / residual_norm, work.data(), p);
    basis.insert(basis.end(), work.begin(), work.end());
    kept.push_back(dict.name(i));
  }

  require(!kept.empty(), errc::empty_result, "all atoms dropped as linearly dependent");
  return {Dictionary(p, std::move(kept), std::move(basis)), std::move(dropped)};
}

namespace {

// Visits multisets of {2..max_order} indices from [0, n) in nondecreasing
// tuple order (strictly increasing when self products are disabled),
// smaller sizes first.
template <typename Visit>
void for_each_multiset(std::size_t n, std::size_t max_order, bool allow_repeats, Visit&& visit) {
  for (std::size_t order = 2; order <= max_order; ++order) {
    std::vector<std::size_t> tuple;
    auto recurse = [&](auto&& self, std::size_t first) -> void {
      if (tuple.size() == order) {
        visit(tuple);
        return;
      }
      for (std::size_t i = first; i < n; ++i) {
        tuple.push_back(i);
        self(self, allow_repeats ? i : i + 1);
        tuple.pop_back();
      }
    };
    recurse(recurse, 0);
  }
}

}  // namespace

HadamardResult hadamard_augment(const Dictionary& dict, const HadamardOptions& options) {
  require(options.max_order >= 2, errc::bad_config, "max_order must be at least 2");
  require(dict.is_normalized(), errc::not_normalized,
          "hadamard_augment requires a normalized dictionary");

  const std::size_t p = dict.bands();
  const std::size_t n = dict.size();

  std::vector<double> data(dict.data());
  std::vector<std::string> names(dict.names());
  std::size_t skipped = 0;
  std::vector<double> product(p);

  for_each_multiset(n, options.max_order, options.include_self_products,
                    [&](const std::vector<std::size_t>& tuple) {
    std::copy(dict.atom(tuple[0]).begin(), dict.atom(tuple[0]).end(), product.begin());
    for (std::size_t t = 1; t < tuple.size(); ++t) {
      kernels::hadamard(product.data(), dict.col(tuple[t]), product.data(), p);
    }
    const double norm = kernels::nrm2(product.data(), p);
    if (norm <= kZeroAtomTol) {
      ++skipped;
      return;
    }
    require(names.size() < options.max_atoms, errc::combinatorial_limit,
            "augmented dictionary would exceed " + std::to_string(options.max_atoms) + " atoms");
    kernels::scale(1.0 / norm, product.data(), p);
    data.insert(data.end(), product.begin(), product.end());
    std::string name = dict.name(tuple[0]);
    for (std::size_t t = 1; t < tuple.size(); ++t) name += "*" + dict.name(tuple[t]);
    names.push_back(std::move(name));
  });

  return {Dictionary(p, std::move(names), std::move(data)), skipped};
}

}  // namespace hsu
