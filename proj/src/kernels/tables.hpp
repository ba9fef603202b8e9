// Internal: per-ISA kernel table getters. Each returns null when the table
// was not compiled for this target.
#pragma once

#include "hsu/kernels.hpp"

namespace hsu::kernels {

const KernelTable* avx2_table();
const KernelTable* neon_table();

}  // namespace hsu::kernels
