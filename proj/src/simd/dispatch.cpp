#include <atomic>
#include <cstdlib>
#include <string>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"

namespace ergodyn::simd {
namespace {

bool cpu_supports(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if defined(ERGODYN_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Backend::neon:
#if defined(ERGODYN_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table_for(Backend b) {
  switch (b) {
#if defined(ERGODYN_HAVE_AVX2)
    case Backend::avx2:
      return avx2_kernels();
#endif
#if defined(ERGODYN_HAVE_NEON)
    case Backend::neon:
      return neon_kernels();
#endif
    default:
      return scalar_kernels();
  }
}

const KernelTable* initial_table() {
  if (const char* env = std::getenv("ERGODYN_SIMD")) {
    const std::string want(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (want == backend_name(b) && cpu_supports(b)) return &table_for(b);
    }
    return &scalar_kernels();
  }
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (cpu_supports(b)) return &table_for(b);
  }
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::vector<Backend> available_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
    if (cpu_supports(b)) out.push_back(b);
  }
  return out;
}

bool backend_available(Backend b) { return cpu_supports(b); }

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

Backend active_backend() { return active().backend; }

void set_backend(Backend b) {
  if (!cpu_supports(b)) {
    throw InputError("SIMD backend '" + std::string(backend_name(b)) + "' is not available");
  }
  current().store(&table_for(b), std::memory_order_relaxed);
}

}  // namespace ergodyn::simd
