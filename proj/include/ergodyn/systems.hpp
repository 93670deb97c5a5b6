#pragma once

// Bundled map families on [0,1)^d with the wraparound (torus) metric.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ergodyn {

// A point of the d-torus, d = 1 or 2, every coordinate in [0,1).
class Point {
 public:
  Point() = default;
  explicit Point(double x);
  Point(double x, double y);
  static Point from(std::span<const double> coords);

  std::size_t dim() const { return dim_; }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return {coords_.data(), dim_}; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::array<double, 2> coords_{0.0, 0.0};
  std::size_t dim_ = 1;
};

struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct CircleRotation {
  double alpha = 0.0;
  // Set when alpha is known exactly as num/den in lowest terms.
  std::optional<Fraction> exact;
};
struct DoublingMap {};
// ω ↦ ω + (sin 2πω + κ sin² 2πω)/2π mod 1: repelling N = 0, attracting S = 1/2.
struct NorthSouth {
  double kappa = 0.5;
};
// ω ↦ slope·min(ω, 1−ω) mod 1
struct TentMap {
  double slope = 2.0;
};
// Integer matrix acting on the 2-torus, |det| = 1.
struct ToralAutomorphism {
  std::int64_t m11 = 2, m12 = 1, m21 = 1, m22 = 1;
};

class SystemSpec {
 public:
  using Family = std::variant<CircleRotation, DoublingMap, NorthSouth, TentMap, ToralAutomorphism>;

  // Validates parameters; throws InputError.
  explicit SystemSpec(Family family);

  static SystemSpec circle_rotation(double alpha);
  static SystemSpec rational_rotation(std::int64_t num, std::int64_t den);
  static SystemSpec doubling();
  static SystemSpec north_south(double kappa);
  static SystemSpec tent(double slope);
  static SystemSpec toral(std::int64_t m11, std::int64_t m12, std::int64_t m21, std::int64_t m22);

  const Family& family() const { return family_; }
  std::size_t dim() const;
  std::string_view family_name() const;
  // Compact human-readable form, e.g. "NorthSouth(kappa=0.5)".
  std::string describe() const;

  template <class F>
  const F* as() const {
    return std::get_if<F>(&family_);
  }

 private:
  Family family_;
};

inline constexpr double kGoldenConjugate = 0.6180339887498949;

// Systems swept by the resolution and identity checks.
std::vector<SystemSpec> bundled_systems();

// x − floor(x), with the rounding case x ≈ −0 folded back to 0.
double wrap_unit(double x);

Point evaluate_map(const SystemSpec& spec, const Point& p);
double metric(const SystemSpec& spec, const Point& a, const Point& b);
// n+1 points; element k is φ^k(p).
std::vector<Point> orbit(const SystemSpec& spec, const Point& p, std::size_t n);

}  // namespace ergodyn
