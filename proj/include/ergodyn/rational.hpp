#pragma once

// Exact backend: points with rational coordinates and arbitrary-size integers.
// Used for periodic orbits and for orbits of expanding maps, where floating
// point loses one bit per step.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ergodyn/systems.hpp"

namespace ergodyn {

using BigInt = boost::multiprecision::cpp_int;

// Coordinates numerators[i] / denominator, reduced mod 1 and to lowest terms
// (gcd of all numerators and the denominator is 1).
class RationalPoint {
 public:
  RationalPoint(std::vector<BigInt> numerators, BigInt denominator);
  static RationalPoint of(std::int64_t num, std::int64_t den);
  static RationalPoint of(std::int64_t num_x, std::int64_t num_y, std::int64_t den);

  std::size_t dim() const { return numerators_.size(); }
  const std::vector<BigInt>& numerators() const { return numerators_; }
  const BigInt& denominator() const { return denominator_; }

  // Nearest-double rendering of each coordinate.
  Point to_point() const;
  // "1/3" in 1D, "(1/5,2/5)" in 2D.
  std::string to_string() const;

  friend bool operator==(const RationalPoint&, const RationalPoint&) = default;
  friend bool operator<(const RationalPoint& a, const RationalPoint& b);

 private:
  std::vector<BigInt> numerators_;
  BigInt denominator_;
};

// n / d as the closest double, for 0 <= n < d of any size.
double ratio_to_double(const BigInt& n, const BigInt& d);

// φ in exact arithmetic. Supported: DoublingMap, ToralAutomorphism and
// CircleRotation with exact alpha; others throw CapabilityError.
RationalPoint evaluate_map_exact(const SystemSpec& spec, const RationalPoint& p);

struct PeriodicOrbit {
  std::size_t period = 0;
  // Starts at the smallest point, then follows φ.
  std::vector<RationalPoint> points;
  // True when every point of the space has this period (rational rotation);
  // the orbit through 0 stands for the whole family.
  bool representative = false;
};

// All periodic orbits of least period <= max_period, grouped by period, each
// listed once. Throws CapabilityError for families without an exact backend
// (the fallback is the transition-graph analysis) and ResourceError when the
// candidate enumeration exceeds the budget.
std::vector<PeriodicOrbit> periodic_orbits(const SystemSpec& spec, std::size_t max_period);

// Known exact fixed points where no full periodic-orbit enumeration exists
// (NorthSouth: N = 0 and S = 1/2). Empty otherwise.
std::vector<RationalPoint> known_fixed_points(const SystemSpec& spec);

}  // namespace ergodyn
