#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "mvd/numerics/kernels.hpp"

namespace mvd::kernels {
namespace {

const KernelTable* detect() noexcept {
  if (const char* env = std::getenv("MVD_SIMD"); env != nullptr && std::string_view(env) == "scalar") {
    return &scalar_table();
  }
  return avx2_supported() ? &avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& slot() noexcept {
  static std::atomic<const KernelTable*> table{detect()};
  return table;
}

}  // namespace

bool avx2_supported() noexcept {
#if defined(__x86_64__) && defined(MVD_BUILD_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() noexcept { return *slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::Avx2 && !avx2_supported()) {
    throw std::runtime_error("AVX2 backend requested but not supported on this CPU");
  }
  slot().store(b == Backend::Avx2 ? &avx2_table() : &scalar_table(), std::memory_order_relaxed);
}

}  // namespace mvd::kernels
