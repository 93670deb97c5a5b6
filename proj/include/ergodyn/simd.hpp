#pragma once

// Runtime-dispatched numeric kernels.
//
// Every kernel has a scalar reference implementation. Vector variants (AVX2+FMA
// on x86-64, NEON on aarch64) are compiled into separate translation units and
// selected once at startup from CPU feature bits; ERGODYN_SIMD=scalar|avx2|neon
// overrides the choice. Reductions may reassociate, so vector results agree with
// the scalar reference to rounding, not bit-for-bit.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ergodyn::simd {

enum class Backend { scalar, avx2, neon };

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // sum_k values[k] * x[index[k]]
  double (*gather_dot)(const double* values, const std::uint32_t* index, const double* x,
                       std::size_t n);
  double (*l1_distance)(const double* a, const double* b, std::size_t n);
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  // min_i w(a_i - b_i) with w(d) = min(|d|, 1 - |d|), inputs in [0,1)
  double (*min_wrap_distance_1d)(const double* a, const double* b, std::size_t n);
  // min_i max(w(ax_i - bx_i), w(ay_i - by_i))
  double (*min_wrap_distance_2d)(const double* ax, const double* ay, const double* bx,
                                 const double* by, std::size_t n);
};

const KernelTable& scalar_kernels();
#if defined(ERGODYN_HAVE_AVX2)
const KernelTable& avx2_kernels();
#endif
#if defined(ERGODYN_HAVE_NEON)
const KernelTable& neon_kernels();
#endif

// Backends compiled in and supported by the running CPU, scalar first.
std::vector<Backend> available_backends();
bool backend_available(Backend b);
std::string_view backend_name(Backend b);

const KernelTable& active();
Backend active_backend();
// Throws InputError when the backend is unavailable.
void set_backend(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}
inline double gather_dot(std::span<const double> values, std::span<const std::uint32_t> index,
                         std::span<const double> x) {
  return active().gather_dot(values.data(), index.data(), x.data(), values.size());
}
inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  return active().l1_distance(a.data(), b.data(), a.size());
}
inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  return active().max_abs_diff(a.data(), b.data(), a.size());
}

}  // namespace ergodyn::simd
