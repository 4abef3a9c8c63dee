#include <cstdlib>
#include <string>

#include "contactlab/error.hpp"
#include "contactlab/simd/kernels.hpp"

namespace contactlab::simd {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

std::string_view backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

namespace {

const KernelTable& select() {
  const KernelTable* fast = cpu_has_avx2() ? avx2_kernels() : nullptr;
  if (const char* env = std::getenv("CONTACTLAB_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return scalar_kernels();
    if (want == "avx2") {
      if (!fast) throw ValidationError("simd_unavailable", "CONTACTLAB_SIMD=avx2 but the CPU lacks AVX2");
      return *fast;
    }
    if (!want.empty()) throw ValidationError("simd_unknown", "CONTACTLAB_SIMD must be scalar or avx2, got '" + want + "'");
  }
  return fast ? *fast : scalar_kernels();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& chosen = select();
  return chosen;
}

}  // namespace contactlab::simd
