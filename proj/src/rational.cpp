#include "ergodyn/rational.hpp"

#include <boost/integer/common_factor.hpp>
#include <cmath>
#include <set>

#include "ergodyn/error.hpp"

namespace ergodyn {
namespace {

constexpr std::uint64_t kMaxCandidates = std::uint64_t{1} << 26;

BigInt mod_floor(const BigInt& n, const BigInt& d) {
  BigInt r = n % d;
  if (r < 0) r += d;
  return r;
}

std::size_t least_period(const SystemSpec& spec, const RationalPoint& p, std::size_t cap) {
  RationalPoint q = p;
  for (std::size_t j = 1; j <= cap; ++j) {
    q = evaluate_map_exact(spec, q);
    if (q == p) return j;
  }
  return 0;
}

std::vector<RationalPoint> collect_orbit(const SystemSpec& spec, const RationalPoint& start,
                                         std::size_t period) {
  std::vector<RationalPoint> pts{start};
  for (std::size_t j = 1; j < period; ++j) pts.push_back(evaluate_map_exact(spec, pts.back()));
  return pts;
}

std::vector<PeriodicOrbit> doubling_orbits(const SystemSpec& spec, std::size_t max_period) {
  if (max_period >= 27) {
    throw ResourceError("DoublingMap periodic orbits beyond period 26 exceed the enumeration budget");
  }
  std::vector<PeriodicOrbit> out;
  for (std::size_t p = 1; p <= max_period; ++p) {
    const std::int64_t denom = (std::int64_t{1} << p) - 1;
    std::set<RationalPoint> seen;
    for (std::int64_t k = 0; k < denom; ++k) {
      RationalPoint x = RationalPoint::of(k, denom);
      if (seen.contains(x) || least_period(spec, x, p) != p) continue;
      PeriodicOrbit orb{p, collect_orbit(spec, x, p), false};
      seen.insert(orb.points.begin(), orb.points.end());
      out.push_back(std::move(orb));
    }
  }
  return out;
}

std::vector<PeriodicOrbit> toral_orbits(const SystemSpec& spec, const ToralAutomorphism& a,
                                        std::size_t max_period) {
  std::vector<PeriodicOrbit> out;
  std::int64_t p11 = 1, p12 = 0, p21 = 0, p22 = 1;  // A^p
  for (std::size_t p = 1; p <= max_period; ++p) {
    const std::int64_t n11 = a.m11 * p11 + a.m12 * p21, n12 = a.m11 * p12 + a.m12 * p22;
    const std::int64_t n21 = a.m21 * p11 + a.m22 * p21, n22 = a.m21 * p12 + a.m22 * p22;
    p11 = n11, p12 = n12, p21 = n21, p22 = n22;
    const std::int64_t b11 = p11 - 1, b12 = p12, b21 = p21, b22 = p22 - 1;
    const std::int64_t det = std::llabs(b11 * b22 - b12 * b21);
    if (det == 0) {
      throw CapabilityError("ToralAutomorphism is not hyperbolic: A^" + std::to_string(p) +
                            " - I is singular, periodic points are not isolated; use the transition-graph backend");
    }
    if (static_cast<std::uint64_t>(det) * static_cast<std::uint64_t>(det) > kMaxCandidates) {
      throw ResourceError("period-" + std::to_string(p) + " enumeration needs " + std::to_string(det) +
                          "^2 candidates; lower max_period");
    }
    std::set<RationalPoint> seen;
    for (std::int64_t x = 0; x < det; ++x) {
      for (std::int64_t y = 0; y < det; ++y) {
        if ((b11 * x + b12 * y) % det != 0 || (b21 * x + b22 * y) % det != 0) continue;
        RationalPoint pt = RationalPoint::of(x, y, det);
        if (seen.contains(pt) || least_period(spec, pt, p) != p) continue;
        PeriodicOrbit orb{p, collect_orbit(spec, pt, p), false};
        seen.insert(orb.points.begin(), orb.points.end());
        out.push_back(std::move(orb));
      }
    }
  }
  return out;
}

}  // namespace

RationalPoint::RationalPoint(std::vector<BigInt> numerators, BigInt denominator)
    : numerators_(std::move(numerators)), denominator_(std::move(denominator)) {
  if (denominator_ <= 0) throw InputError("rational point denominator must be positive");
  if (numerators_.empty() || numerators_.size() > 2) throw InputError("rational points have 1 or 2 coordinates");
  BigInt g = denominator_;
  for (auto& n : numerators_) {
    n = mod_floor(n, denominator_);
    g = boost::integer::gcd(g, n);
  }
  if (g > 1) {
    for (auto& n : numerators_) n /= g;
    denominator_ /= g;
  }
}

RationalPoint RationalPoint::of(std::int64_t num, std::int64_t den) {
  return RationalPoint({BigInt(num)}, BigInt(den));
}

RationalPoint RationalPoint::of(std::int64_t num_x, std::int64_t num_y, std::int64_t den) {
  return RationalPoint({BigInt(num_x), BigInt(num_y)}, BigInt(den));
}

double ratio_to_double(const BigInt& n, const BigInt& d) {
  if (n == 0) return 0.0;
  // 64 extra bits of quotient are plenty for a correctly rounded 53-bit mantissa
  // unless n/d < 2^-11; scale the shift by the size gap to keep precision.
  const auto bits_d = static_cast<long>(boost::multiprecision::msb(d));
  const auto bits_n = static_cast<long>(boost::multiprecision::msb(n));
  const long shift = 64 + std::max(0L, bits_d - bits_n);
  const BigInt q = (n << shift) / d;
  return std::ldexp(q.convert_to<double>(), static_cast<int>(-shift));
}

Point RationalPoint::to_point() const {
  if (dim() == 1) return Point(wrap_unit(ratio_to_double(numerators_[0], denominator_)));
  return Point(wrap_unit(ratio_to_double(numerators_[0], denominator_)),
               wrap_unit(ratio_to_double(numerators_[1], denominator_)));
}

std::string RationalPoint::to_string() const {
  auto frac = [this](const BigInt& n) {
    if (n == 0) return std::string("0");
    const BigInt g = boost::integer::gcd(n, denominator_);
    return BigInt(n / g).str() + "/" + BigInt(denominator_ / g).str();
  };
  if (dim() == 1) return frac(numerators_[0]);
  return "(" + frac(numerators_[0]) + "," + frac(numerators_[1]) + ")";
}

bool operator<(const RationalPoint& a, const RationalPoint& b) {
  for (std::size_t i = 0; i < std::min(a.dim(), b.dim()); ++i) {
    const BigInt lhs = a.numerators_[i] * b.denominator_;
    const BigInt rhs = b.numerators_[i] * a.denominator_;
    if (lhs != rhs) return lhs < rhs;
  }
  return a.dim() < b.dim();
}

RationalPoint evaluate_map_exact(const SystemSpec& spec, const RationalPoint& p) {
  if (p.dim() != spec.dim()) throw InputError("rational point dimension does not match " + spec.describe());
  const auto& n = p.numerators();
  const auto& d = p.denominator();
  if (spec.as<DoublingMap>()) return RationalPoint({2 * n[0]}, d);
  if (const auto* a = spec.as<ToralAutomorphism>()) {
    return RationalPoint({a->m11 * n[0] + a->m12 * n[1], a->m21 * n[0] + a->m22 * n[1]}, d);
  }
  if (const auto* r = spec.as<CircleRotation>(); r && r->exact) {
    return RationalPoint({n[0] * r->exact->den + r->exact->num * d}, d * r->exact->den);
  }
  throw CapabilityError("no exact arithmetic for " + spec.describe() + "; use the floating-point orbit");
}

std::vector<PeriodicOrbit> periodic_orbits(const SystemSpec& spec, std::size_t max_period) {
  if (max_period < 1) throw InputError("max_period must be >= 1");
  if (spec.as<DoublingMap>()) return doubling_orbits(spec, max_period);
  if (const auto* a = spec.as<ToralAutomorphism>()) return toral_orbits(spec, *a, max_period);
  if (const auto* r = spec.as<CircleRotation>(); r && r->exact) {
    const auto q = static_cast<std::size_t>(r->exact->den);
    if (max_period < q) return {};
    return {PeriodicOrbit{q, collect_orbit(spec, RationalPoint::of(0, 1), q), true}};
  }
  throw CapabilityError("exact periodic orbits are unavailable for " + spec.describe() +
                        "; fall back to the transition-graph backend");
}

std::vector<RationalPoint> known_fixed_points(const SystemSpec& spec) {
  if (spec.as<NorthSouth>()) return {RationalPoint::of(0, 1), RationalPoint::of(1, 2)};
  return {};
}

}  // namespace ergodyn
