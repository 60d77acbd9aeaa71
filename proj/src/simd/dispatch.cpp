#include <cstdlib>
#include <string_view>

#include "neutral/simd/kernels.hpp"

namespace neutral::simd {

#ifdef NEUTRAL_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#ifdef NEUTRAL_HAVE_AVX2
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("NEUTRAL_LAB_SIMD");
  const std::string_view request = env ? env : "";
  if (request == "scalar") return scalar_kernels();
  if (const KernelTable* fast = avx2_kernels()) return *fast;
  return scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace neutral::simd
