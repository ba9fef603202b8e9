// Runtime kernel selection: best table the CPU supports, overridable via
// the HSU_KERNELS environment variable.
#include <cstdlib>
#include <cstring>

#include "hsu/kernels.hpp"
#include "tables.hpp"

namespace hsu::kernels {
namespace {

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(_M_X64)
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
#else
  return false;
#endif
}

const KernelTable* pick_table() {
  const KernelTable* best = &scalar_table();
  if (const KernelTable* neon = neon_table()) best = neon;
  if (const KernelTable* avx2 = avx2_table(); avx2 && cpu_has_avx2_fma()) best = avx2;

  if (const char* forced = std::getenv("HSU_KERNELS")) {
    for (const KernelTable* t : available_tables()) {
      if (std::strcmp(t->name, forced) == 0) return t;
    }
    // Unknown or unsupported name: fall through to the automatic choice.
  }
  return best;
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> tables{&scalar_table()};
  if (const KernelTable* neon = neon_table()) tables.push_back(neon);
  if (const KernelTable* avx2 = avx2_table(); avx2 && cpu_has_avx2_fma()) tables.push_back(avx2);
  return tables;
}

const KernelTable& active() {
  static const KernelTable* chosen = pick_table();
  return *chosen;
}

}  // namespace hsu::kernels
