// aarch64 only. gather_dot stays scalar: NEON has no gather.

#include <arm_neon.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ergodyn/simd.hpp"

namespace ergodyn::simd {
namespace {

inline double wrap(double d) {
  d = std::fabs(d);
  return std::min(d, 1.0 - d);
}

inline float64x2_t vwrap(float64x2_t d) {
  d = vabsq_f64(d);
  return vminq_f64(d, vsubq_f64(vdupq_n_f64(1.0), d));
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += values[k] * x[index[k]];
  return s;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vabdq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

double min_wrap_distance_1d(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vminq_f64(acc, vwrap(vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i))));
  double m = vminvq_f64(acc);
  for (; i < n; ++i) m = std::min(m, wrap(a[i] - b[i]));
  return m;
}

double min_wrap_distance_2d(const double* ax, const double* ay, const double* bx,
                            const double* by, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vwrap(vsubq_f64(vld1q_f64(ax + i), vld1q_f64(bx + i)));
    const float64x2_t dy = vwrap(vsubq_f64(vld1q_f64(ay + i), vld1q_f64(by + i)));
    acc = vminq_f64(acc, vmaxq_f64(dx, dy));
  }
  double m = vminvq_f64(acc);
  for (; i < n; ++i) m = std::min(m, std::max(wrap(ax[i] - bx[i]), wrap(ay[i] - by[i])));
  return m;
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Backend::neon,        dot,         axpy,
                                 gather_dot,           l1_distance, max_abs_diff,
                                 min_wrap_distance_1d, min_wrap_distance_2d};
  return table;
}

}  // namespace ergodyn::simd
