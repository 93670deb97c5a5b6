#include <algorithm>
#include <cmath>
#include <limits>

#include "ergodyn/simd.hpp"

namespace ergodyn::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot(const double* values, const std::uint32_t* index, const double* x,
                  std::size_t n) {
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += values[k] * x[index[k]];
  return s;
}

double l1_distance(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::fabs(a[i] - b[i]);
  return s;
}

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

inline double wrap(double d) {
  d = std::fabs(d);
  return std::min(d, 1.0 - d);
}

double min_wrap_distance_1d(const double* a, const double* b, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) m = std::min(m, wrap(a[i] - b[i]));
  return m;
}

double min_wrap_distance_2d(const double* ax, const double* ay, const double* bx,
                            const double* by, std::size_t n) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    m = std::min(m, std::max(wrap(ax[i] - bx[i]), wrap(ay[i] - by[i])));
  }
  return m;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Backend::scalar,      dot,         axpy,
                                 gather_dot,           l1_distance, max_abs_diff,
                                 min_wrap_distance_1d, min_wrap_distance_2d};
  return table;
}

}  // namespace ergodyn::simd
