#include <atomic>
#include <cstdlib>
#include <string_view>

#include "roughheat/kernels.hpp"

namespace roughheat::kernels {
namespace {

Backend detect() {
  if (const char* env = std::getenv("ROUGHHEAT_SIMD")) {
    if (std::string_view(env) == "scalar") return Backend::scalar;
  }
  return avx2_available() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& current() {
  static std::atomic<Backend> b{detect()};
  return b;
}

}  // namespace

bool avx2_available() {
#if defined(ROUGHHEAT_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() { return current().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
  if (b == Backend::avx2 && !avx2_available()) b = Backend::scalar;
  current().store(b, std::memory_order_relaxed);
}

const KernelTable& active() {
#ifdef ROUGHHEAT_HAVE_AVX2
  if (active_backend() == Backend::avx2) return avx2_table();
#endif
  return scalar_table();
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

}  // namespace roughheat::kernels
