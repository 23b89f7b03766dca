#include "henon/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace henon::simd {

#ifdef HENON_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(HENON_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("HENON_KERNELS"); env && std::string(env) == "scalar") {
    return &scalar_kernels();
  }
  if (const KernelTable* wide = avx2_kernels()) return wide;
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> active{pick_default()};
  return active;
}

}  // namespace

const KernelTable* avx2_kernels() {
#ifdef HENON_HAVE_AVX2
  static const bool ok = cpu_has_avx2();
  return ok ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() { return *slot().load(std::memory_order_acquire); }

bool select_kernels(std::string_view which) {
  const KernelTable* t = nullptr;
  if (which == "scalar") {
    t = &scalar_kernels();
  } else if (which == "avx2") {
    t = avx2_kernels();
  } else if (which == "auto") {
    t = avx2_kernels() ? avx2_kernels() : &scalar_kernels();
  }
  if (!t) return false;
  slot().store(t, std::memory_order_release);
  return true;
}

}  // namespace henon::simd
