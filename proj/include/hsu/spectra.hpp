// Dictionary preparation: unit normalization, modified Gram-Schmidt
// orthogonalization, and Hadamard (elementwise-product) scattering
// augmentation.
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hsu/types.hpp"

namespace hsu {

// Atoms with L2 norm at or below this are treated as the zero vector.
inline constexpr double kZeroAtomTol = 1e-10;

// Rescales every atom to unit L2 norm. Throws errc::zero_atom naming the
// first offending atom.
Dictionary normalize(const Dictionary& dict);

struct GramSchmidtResult {
  Dictionary dict;
  std::vector<std::string> dropped;  // atoms removed as linearly dependent
};

// Modified Gram-Schmidt with one reorthogonalization pass. An atom is
// dropped when its residual norm after projection falls below
// tolerance * (its pre-projection norm). Throws errc::empty_result when
// nothing survives.
GramSchmidtResult gram_schmidt(const Dictionary& dict, double tolerance = 1e-8);

struct HadamardOptions {
  std::size_t max_order = 2;          // largest number of factors per product
  bool include_self_products = true;  // allow repeated factors (a*a)
  std::size_t max_atoms = 1u << 20;   // cap on the augmented atom count
};

struct HadamardResult {
  Dictionary dict;
  std::size_t skipped_zero = 0;  // products with (near-)zero norm, silently dropped
};

// Appends every multiset product of 2..max_order atoms, renormalized, after
// the original atoms. Products are ordered by size then lexicographically by
// constituent index tuple; names join constituent names with "*" in
// dictionary order. Requires a normalized dictionary. Throws
// errc::combinatorial_limit when the result would exceed max_atoms.
HadamardResult hadamard_augment(const Dictionary& dict, const HadamardOptions& options = {});

}  // namespace hsu
