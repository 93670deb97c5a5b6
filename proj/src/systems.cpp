#include "ergodyn/systems.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "ergodyn/error.hpp"

namespace ergodyn {
namespace {

void check_coord(double v) {
  if (!(v >= 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << "point coordinate " << v << " outside [0,1)";
    throw InputError(os.str());
  }
}

void check_dim(const SystemSpec& spec, const Point& p) {
  if (p.dim() != spec.dim()) {
    throw InputError("point dimension " + std::to_string(p.dim()) + " does not match system " +
                     spec.describe());
  }
}

// sin(2πx) for x in [0,1) with exact zeros at 0 and 1/2.
double sin_2pi(double x) {
  if (x == 0.0 || x == 0.5) return 0.0;
  return std::sin(2.0 * std::numbers::pi * x);
}

double wrap_distance(double a, double b) {
  const double d = std::fabs(a - b);
  return std::min(d, 1.0 - d);
}

}  // namespace

Point::Point(double x) : coords_{x, 0.0}, dim_(1) { check_coord(x); }

Point::Point(double x, double y) : coords_{x, y}, dim_(2) {
  check_coord(x);
  check_coord(y);
}

Point Point::from(std::span<const double> coords) {
  if (coords.size() == 1) return Point(coords[0]);
  if (coords.size() == 2) return Point(coords[0], coords[1]);
  throw InputError("points have 1 or 2 coordinates, got " + std::to_string(coords.size()));
}

SystemSpec::SystemSpec(Family family) : family_(std::move(family)) {
  std::visit(
      [](auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CircleRotation>) {
          if (f.exact) {
            auto& q = *f.exact;
            if (q.den <= 0 || q.num <= 0 || q.num >= q.den) {
              throw InputError("rational rotation needs 0 < num < den");
            }
            const std::int64_t g = std::gcd(q.num, q.den);
            q.num /= g;
            q.den /= g;
            f.alpha = static_cast<double>(q.num) / static_cast<double>(q.den);
          }
          if (!(f.alpha > 0.0 && f.alpha < 1.0)) throw InputError("CircleRotation alpha must lie in (0,1)");
        } else if constexpr (std::is_same_v<T, NorthSouth>) {
          if (!(f.kappa > 0.0 && f.kappa < 1.0)) throw InputError("NorthSouth kappa must lie in (0,1)");
        } else if constexpr (std::is_same_v<T, TentMap>) {
          if (!(f.slope > 1.0 && f.slope <= 2.0)) throw InputError("TentMap slope must lie in (1,2]");
        } else if constexpr (std::is_same_v<T, ToralAutomorphism>) {
          const std::int64_t det = f.m11 * f.m22 - f.m12 * f.m21;
          if (det != 1 && det != -1) throw InputError("ToralAutomorphism matrix must have determinant ±1");
        }
      },
      family_);
}

SystemSpec SystemSpec::circle_rotation(double alpha) { return SystemSpec(CircleRotation{alpha, {}}); }

SystemSpec SystemSpec::rational_rotation(std::int64_t num, std::int64_t den) {
  return SystemSpec(CircleRotation{0.0, Fraction{num, den}});
}

SystemSpec SystemSpec::doubling() { return SystemSpec(DoublingMap{}); }

SystemSpec SystemSpec::north_south(double kappa) { return SystemSpec(NorthSouth{kappa}); }

SystemSpec SystemSpec::tent(double slope) { return SystemSpec(TentMap{slope}); }

SystemSpec SystemSpec::toral(std::int64_t m11, std::int64_t m12, std::int64_t m21, std::int64_t m22) {
  return SystemSpec(ToralAutomorphism{m11, m12, m21, m22});
}

std::size_t SystemSpec::dim() const { return std::holds_alternative<ToralAutomorphism>(family_) ? 2 : 1; }

std::string_view SystemSpec::family_name() const {
  static constexpr std::string_view names[] = {"CircleRotation", "DoublingMap", "NorthSouth", "TentMap",
                                               "ToralAutomorphism"};
  return names[family_.index()];
}

std::string SystemSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << family_name();
  std::visit(
      [&os](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, CircleRotation>) {
          if (f.exact) {
            os << "(alpha=" << f.exact->num << "/" << f.exact->den << ")";
          } else {
            os << "(alpha=" << f.alpha << ")";
          }
        } else if constexpr (std::is_same_v<T, NorthSouth>) {
          os << "(kappa=" << f.kappa << ")";
        } else if constexpr (std::is_same_v<T, TentMap>) {
          os << "(slope=" << f.slope << ")";
        } else if constexpr (std::is_same_v<T, ToralAutomorphism>) {
          os << "(" << f.m11 << "," << f.m12 << "," << f.m21 << "," << f.m22 << ")";
        }
      },
      family_);
  return os.str();
}

std::vector<SystemSpec> bundled_systems() {
  return {SystemSpec::circle_rotation(kGoldenConjugate), SystemSpec::rational_rotation(1, 4),
          SystemSpec::doubling(),                        SystemSpec::north_south(0.5),
          SystemSpec::tent(1.5),                         SystemSpec::toral(2, 1, 1, 1)};
}

double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

Point evaluate_map(const SystemSpec& spec, const Point& p) {
  check_dim(spec, p);
  return std::visit(
      [&p](const auto& f) -> Point {
        using T = std::decay_t<decltype(f)>;
        const double x = p[0];
        if constexpr (std::is_same_v<T, CircleRotation>) {
          return Point(wrap_unit(x + f.alpha));
        } else if constexpr (std::is_same_v<T, DoublingMap>) {
          return Point(wrap_unit(2.0 * x));
        } else if constexpr (std::is_same_v<T, NorthSouth>) {
          const double s = sin_2pi(x);
          return Point(wrap_unit(x + (s + f.kappa * s * s) / (2.0 * std::numbers::pi)));
        } else if constexpr (std::is_same_v<T, TentMap>) {
          return Point(wrap_unit(f.slope * std::min(x, 1.0 - x)));
        } else {
          const double y = p[1];
          const auto a = static_cast<double>(f.m11), b = static_cast<double>(f.m12);
          const auto c = static_cast<double>(f.m21), d = static_cast<double>(f.m22);
          return Point(wrap_unit(a * x + b * y), wrap_unit(c * x + d * y));
        }
      },
      spec.family());
}

double metric(const SystemSpec& spec, const Point& a, const Point& b) {
  check_dim(spec, a);
  check_dim(spec, b);
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) d = std::max(d, wrap_distance(a[i], b[i]));
  return d;
}

std::vector<Point> orbit(const SystemSpec& spec, const Point& p, std::size_t n) {
  check_dim(spec, p);
  std::vector<Point> out;
  out.reserve(n + 1);
  out.push_back(p);
  for (std::size_t k = 0; k < n; ++k) out.push_back(evaluate_map(spec, out.back()));
  return out;
}

}  // namespace ergodyn
