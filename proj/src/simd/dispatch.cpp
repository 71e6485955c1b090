#include <cstdlib>
#include <string_view>

#include "fracspec/simd/kernels.hpp"

namespace fracspec::simd {

#if defined(FRACSPEC_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif

const KernelTable* avx2_kernels() {
#if defined(FRACSPEC_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &kAvx2Kernels : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& select(std::string_view requested) {
  if (requested == "scalar") return scalar_kernels();
  const KernelTable* best = avx2_kernels();
  return best != nullptr ? *best : scalar_kernels();
}

const KernelTable& active() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* env = std::getenv("FRACSPEC_ISA");
    return select(env != nullptr ? std::string_view(env) : std::string_view());
  }();
  return table;
}

}  // namespace fracspec::simd
