#include "ergodyn/tame.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "ergodyn/error.hpp"
#include "ergodyn/rational.hpp"
#include "ergodyn/simd.hpp"
#include "ergodyn/simplex.hpp"
#include "ergodyn/ulam.hpp"

namespace ergodyn {
namespace {

// Floating-point orbits of expanding maps lose a bit per step and collapse onto
// dyadic cycles. These maps are iterated exactly instead, starting from a
// dyadic lift of the point whose low-order bits (below 2^-60) are filled from
// √2·(salt+1), so the orbit is a true orbit of a point indistinguishable from p.
bool iterate_exactly(const SystemSpec& spec) { return spec.as<DoublingMap>() || spec.as<ToralAutomorphism>(); }

RationalPoint lift(const Point& p, std::size_t bits, std::uint64_t salt) {
  const std::size_t tail_bits = bits - 60;
  std::vector<BigInt> nums;
  for (std::size_t c = 0; c < p.dim(); ++c) {
    const BigInt head = BigInt(static_cast<std::int64_t>(std::llround(std::ldexp(p[c], 53)))) << (bits - 53);
    const BigInt scale = BigInt(2 * salt + c + 1);
    const BigInt root = boost::multiprecision::sqrt(BigInt(2) * scale * scale << (2 * tail_bits));
    const BigInt tail = root & ((BigInt(1) << tail_bits) - 1);
    nums.push_back(head + tail);
  }
  return RationalPoint(std::move(nums), BigInt(1) << bits);
}

// Calls f(k, φ^k p) for k = 0..n.
template <class F>
void for_each_iterate(const SystemSpec& spec, const Point& p, std::uint64_t n, std::uint64_t salt, F&& f) {
  if (iterate_exactly(spec)) {
    RationalPoint q = lift(p, static_cast<std::size_t>(n) + 128, salt);
    for (std::uint64_t k = 0; k <= n; ++k) {
      f(k, q.to_point());
      if (k < n) q = evaluate_map_exact(spec, q);
    }
  } else {
    Point q = p;
    for (std::uint64_t k = 0; k <= n; ++k) {
      f(k, q);
      if (k < n) q = evaluate_map(spec, q);
    }
  }
}

double sup_abs_combination(const ValueMatrix& v, std::span<const double> a) {
  double worst = 0.0;
  for (std::size_t s = 0; s < v.cols; ++s) {
    double acc = 0.0;
    for (std::size_t k = 0; k < v.rows; ++k) acc += a[k] * v.at(k, s);
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

struct FacetSolve {
  std::vector<double> y;
  std::size_t lps = 0;
  std::size_t pivots = 0;
  bool suboptimal = false;
};

// max Σy s.t. |Σ_k σ_k y_k values(k,s)| <= 1 for all s, y >= 0, by constraint
// generation: solve on a strided subset of grid points, add the most violated
// points, repeat until the solution is feasible on the whole grid (and hence
// optimal). An unbounded subproblem returns a ray, which is accepted once it
// annihilates every grid point.
FacetSolve solve_facet(const ValueMatrix& values, std::span<const double> sigma, std::size_t pivot_budget) {
  const std::size_t k = values.rows, s = values.cols;
  constexpr std::size_t kInitial = 256, kBatch = 64;
  std::vector<std::uint8_t> active(s, 0);
  std::vector<std::size_t> rows;
  const std::size_t stride = std::max<std::size_t>(1, s / kInitial);
  for (std::size_t i = 0; i < s; i += stride) {
    active[i] = 1;
    rows.push_back(i);
  }
  FacetSolve out;
  std::vector<double> a, b, c(k, 1.0);
  while (true) {
    const std::size_t m = rows.size();
    a.assign(2 * m * k, 0.0);
    b.assign(2 * m, 1.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t j = 0; j < k; ++j) {
        const double v = sigma[j] * values.at(j, rows[r]);
        a[r * k + j] = v;
        a[(m + r) * k + j] = -v;
      }
    }
    const LpResult lp = solve_lp(a, 2 * m, k, b, c, pivot_budget);
    ++out.lps;
    out.pivots += lp.pivots;
    if (lp.status == LpStatus::infeasible) return out;  // y = 0 is feasible; defensive only
    const bool ray = lp.status == LpStatus::unbounded;
    out.suboptimal = out.suboptimal || lp.status == LpStatus::budget_exhausted;
    out.y = ray ? lp.ray : lp.x;
    // Violation of the full constraint set; a ray must vanish everywhere.
    double scale = 0.0;
    for (double v : out.y) scale += v;
    const double limit = ray ? 1e-12 * scale : 1.0 + 1e-9;
    std::vector<std::pair<double, std::size_t>> violated;
    for (std::size_t i = 0; i < s; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) acc += sigma[j] * out.y[j] * values.at(j, i);
      if (std::abs(acc) > limit && !active[i]) violated.emplace_back(-std::abs(acc), i);
    }
    if (violated.empty() || out.suboptimal) return out;
    const std::size_t take = std::min(kBatch, violated.size());
    std::partial_sort(violated.begin(), violated.begin() + static_cast<std::ptrdiff_t>(take), violated.end());
    for (std::size_t t = 0; t < take; ++t) {
      active[violated[t].second] = 1;
      rows.push_back(violated[t].second);
    }
  }
}

ValueMatrix select_rows(const std::vector<std::vector<double>>& by_power, std::span<const std::uint64_t> powers) {
  ValueMatrix v;
  v.rows = powers.size();
  v.cols = by_power.front().size();
  for (auto p : powers) v.data.insert(v.data.end(), by_power[p].begin(), by_power[p].end());
  return v;
}

// Rows x(φ^p ω_s) for p = 0..max_power.
std::vector<std::vector<double>> values_by_power(const SystemSpec& spec, std::size_t function_id,
                                                 std::uint64_t max_power, std::span<const Point> grid) {
  const TrigBank bank(spec.dim());
  std::vector<std::vector<double>> out(max_power + 1, std::vector<double>(grid.size()));
  for (std::size_t s = 0; s < grid.size(); ++s) {
    for_each_iterate(spec, grid[s], max_power, s,
                     [&](std::uint64_t k, const Point& q) { out[k][s] = bank.evaluate(function_id, q); });
  }
  return out;
}

// Feature rows F_n with ‖F_{n1} − F_{n2}‖₁ = ellis_metric(n1, n2).
std::vector<std::vector<double>> ellis_features(const SystemSpec& spec, std::uint64_t horizon, std::size_t bank_size,
                                                std::size_t points) {
  if (bank_size < 1 || points < 1) throw InputError("ellis metric needs at least one function and one point");
  const TrigBank bank(spec.dim());
  const auto omega = dense_points(spec.dim(), points);
  std::vector<std::vector<double>> feat(horizon + 1, std::vector<double>(bank_size * points));
  for (std::size_t m = 0; m < points; ++m) {
    for_each_iterate(spec, omega[m], horizon, m, [&](std::uint64_t k, const Point& q) {
      for (std::size_t b = 0; b < bank_size; ++b) {
        feat[k][b * points + m] = std::ldexp(bank.evaluate(b + 1, q), -static_cast<int>(b + m + 2));
      }
    });
  }
  return feat;
}

}  // namespace

std::vector<Point> midpoint_grid(std::size_t dim, std::size_t s) {
  if (s < 1) throw InputError("grid needs at least one point");
  std::vector<Point> out;
  if (dim == 1) {
    for (std::size_t j = 0; j < s; ++j) out.emplace_back((j + 0.5) / static_cast<double>(s));
    return out;
  }
  if (dim != 2) throw InputError("grid dimension must be 1 or 2");
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(s))));
  if (side * side != s) throw InputError("2D grid size must be a perfect square");
  for (std::size_t iy = 0; iy < side; ++iy) {
    for (std::size_t ix = 0; ix < side; ++ix) {
      out.emplace_back((ix + 0.5) / static_cast<double>(side), (iy + 0.5) / static_cast<double>(side));
    }
  }
  return out;
}

ValueMatrix koopman_value_matrix(const SystemSpec& spec, std::size_t function_id,
                                 std::span<const std::uint64_t> powers, std::span<const Point> grid) {
  if (powers.empty() || grid.empty()) throw InputError("value matrix needs powers and grid points");
  for (std::size_t k = 1; k < powers.size(); ++k) {
    if (powers[k] <= powers[k - 1]) throw InputError("powers must be strictly increasing");
  }
  for (const auto& p : grid) {
    if (p.dim() != spec.dim()) throw InputError("grid point dimension does not match " + spec.describe());
  }
  return select_rows(values_by_power(spec, function_id, powers.back(), grid), powers);
}

KoehlerResult koehler_defect(const ValueMatrix& values, std::size_t pivot_budget) {
  const std::size_t k = values.rows, s = values.cols;
  if (k < 1 || s < 1) throw InputError("Koehler defect needs K >= 1 and S >= 1");
  if (k > kMaxKoehlerTerms) {
    throw ResourceError("exact Koehler defect enumerates 2^(K-1) sign patterns; K is capped at " +
                        std::to_string(kMaxKoehlerTerms));
  }
  for (double v : values.data) {
    if (!std::isfinite(v)) throw InputError("value matrix has a non-finite entry");
  }
  KoehlerResult best;
  best.defect = std::numeric_limits<double>::infinity();
  std::vector<double> sigma(k), coeff(k);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (k - 1)); ++mask) {
    // σ_0 = +1; bit j of mask flips σ_{j+1}.
    for (std::size_t j = 0; j < k; ++j) sigma[j] = (j > 0 && ((mask >> (j - 1)) & 1)) ? -1.0 : 1.0;
    FacetSolve f = solve_facet(values, sigma, pivot_budget);
    best.lps += f.lps;
    best.pivots += f.pivots;
    best.suboptimal = best.suboptimal || f.suboptimal;
    double total = 0.0;
    for (double v : f.y) total += v;
    if (!(total > 0.0)) continue;
    for (std::size_t j = 0; j < k; ++j) coeff[j] = sigma[j] * f.y[j] / total;
    const double d = sup_abs_combination(values, coeff);
    if (d < best.defect) {
      best.defect = d;
      best.coefficients = coeff;
    }
  }
  return best;
}

const char* strategy_name(TameStrategy s) { return s == TameStrategy::fixed ? "fixed" : "adversarial"; }

TamenessReport tameness_profile(const SystemSpec& spec, std::size_t function_id, std::size_t k_max,
                                std::size_t grid_size, TameStrategy strategy, std::size_t window) {
  if (k_max < 2) throw InputError("tameness profile needs K_max >= 2");
  if (k_max > kMaxKoehlerTerms) {
    throw ResourceError("K_max above " + std::to_string(kMaxKoehlerTerms) + " is not supported");
  }
  if (window < 1) throw InputError("adversarial window must be >= 1");
  TamenessReport rep;
  rep.function_id = function_id;
  rep.strategy = strategy;
  rep.grid_size = grid_size;
  const auto grid = midpoint_grid(spec.dim(), grid_size);
  const std::uint64_t max_power = strategy == TameStrategy::fixed ? k_max : 1 + (k_max - 1) * window;
  const auto by_power = values_by_power(spec, function_id, max_power, grid);

  auto record = [&rep](std::size_t k, KoehlerResult r) {
    rep.ks.push_back(k);
    rep.defects.push_back(r.defect);
    rep.coefficients.push_back(std::move(r.coefficients));
    rep.suboptimal = rep.suboptimal || r.suboptimal;
  };

  if (strategy == TameStrategy::fixed) {
    for (std::uint64_t p = 1; p <= k_max; ++p) rep.subsequence.push_back(p);
    for (std::size_t k = 2; k <= k_max; ++k) {
      const std::span<const std::uint64_t> prefix(rep.subsequence.data(), k);
      KoehlerResult r = koehler_defect(select_rows(by_power, prefix));
      // Zero-padding the previous optimum stays feasible, so never report worse.
      if (!rep.defects.empty() && r.defect > rep.defects.back()) {
        r.defect = rep.defects.back();
        r.coefficients = rep.coefficients.back();
        r.coefficients.push_back(0.0);
      }
      record(k, std::move(r));
    }
    return rep;
  }

  rep.subsequence.push_back(1);
  for (std::size_t k = 2; k <= k_max; ++k) {
    std::optional<KoehlerResult> best;
    std::uint64_t best_power = 0;
    for (std::uint64_t p = rep.subsequence.back() + 1; p <= rep.subsequence.back() + window; ++p) {
      auto trial = rep.subsequence;
      trial.push_back(p);
      KoehlerResult r = koehler_defect(select_rows(by_power, trial));
      if (!best || r.defect > best->defect) {
        best = std::move(r);
        best_power = p;
      }
    }
    rep.subsequence.push_back(best_power);
    record(k, std::move(*best));
  }
  return rep;
}

std::vector<Point> dense_points(std::size_t dim, std::size_t m) {
  // Steps √2−1 and √3−1: 1, √2, √3 are rationally independent.
  const double s2 = std::sqrt(2.0) - 1.0, s3 = std::sqrt(3.0) - 1.0;
  std::vector<Point> out;
  for (std::size_t j = 1; j <= m; ++j) {
    const double t = static_cast<double>(j);
    if (dim == 1) {
      out.emplace_back(wrap_unit(t * s2));
    } else {
      out.emplace_back(wrap_unit(t * s2), wrap_unit(t * s3));
    }
  }
  return out;
}

double ellis_metric(const SystemSpec& spec, std::uint64_t n1, std::uint64_t n2, std::size_t bank_size,
                    std::size_t points) {
  const auto feat = ellis_features(spec, std::max(n1, n2), bank_size, points);
  return simd::l1_distance(feat[n1], feat[n2]);
}

double ellis_truncation_bound(std::size_t bank_size, std::size_t points) {
  // Each omitted term is at most 2·2^{-(n+m)}; the omitted mass of the weights
  // is 1 − (1 − 2^{-B})(1 − 2^{-M}).
  const double kept = (1.0 - std::ldexp(1.0, -static_cast<int>(bank_size))) *
                      (1.0 - std::ldexp(1.0, -static_cast<int>(points)));
  return 2.0 * (1.0 - kept);
}

CoveringProfile covering_profile(const SystemSpec& spec, std::uint64_t horizon, std::span<const double> eps_list,
                                 std::size_t bank_size, std::size_t points, std::uint64_t budget) {
  if (horizon < 1) throw InputError("covering profile needs N >= 1");
  if (eps_list.empty()) throw InputError("covering profile needs at least one epsilon");
  for (double e : eps_list) {
    if (!(e > 0.0)) throw InputError("covering epsilons must be positive");
  }
  const long double work = static_cast<long double>(horizon + 1) * (horizon + 1) * bank_size * points;
  if (work > static_cast<long double>(budget)) {
    throw ResourceError("covering profile needs about " + std::to_string(static_cast<double>(work)) +
                        " feature operations; choose a smaller N");
  }
  const auto feat = ellis_features(spec, horizon, bank_size, points);
  const auto& kern = simd::active();
  const std::size_t width = bank_size * points;

  CoveringProfile prof;
  prof.horizon = horizon;
  prof.bank_size = bank_size;
  prof.points = points;
  prof.truncation_bound = ellis_truncation_bound(bank_size, points);
  prof.eps.assign(eps_list.begin(), eps_list.end());
  std::vector<std::vector<std::size_t>> greedy(prof.eps.size(), std::vector<std::size_t>(horizon + 1));
  for (std::size_t e = 0; e < prof.eps.size(); ++e) {
    std::vector<std::size_t> centers;
    for (std::uint64_t n = 0; n <= horizon; ++n) {
      bool covered = false;
      for (auto c : centers) {
        if (kern.l1_distance(feat[n].data(), feat[c].data(), width) <= prof.eps[e]) {
          covered = true;
          break;
        }
      }
      if (!covered) centers.push_back(n);
      greedy[e][n] = centers.size();
    }
  }
  prof.counts_by_horizon = greedy;
  for (std::size_t e = 0; e < prof.eps.size(); ++e) {
    for (std::size_t f = 0; f < prof.eps.size(); ++f) {
      if (prof.eps[f] > prof.eps[e]) continue;
      for (std::uint64_t n = 0; n <= horizon; ++n) {
        prof.counts_by_horizon[e][n] = std::min(prof.counts_by_horizon[e][n], greedy[f][n]);
      }
    }
    prof.counts.push_back(prof.counts_by_horizon[e][horizon]);
  }
  return prof;
}

std::vector<ExpansionRow> equicontinuity_probe(const SystemSpec& spec, std::span<const double> deltas,
                                               std::uint64_t horizon, std::span<const Point> base_points) {
  std::vector<Point> bases(base_points.begin(), base_points.end());
  if (bases.empty()) bases = midpoint_grid(spec.dim(), 64);
  std::vector<ExpansionRow> out;
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta <= 0.5)) throw InputError("probe deltas must lie in (0, 0.5]");
    ExpansionRow row;
    row.delta = delta;
    const double step = delta * (1.0 - std::ldexp(1.0, -40));
    for (std::size_t i = 0; i < bases.size(); ++i) {
      const Point& p = bases[i];
      if (p.dim() != spec.dim()) throw InputError("base point dimension does not match " + spec.describe());
      for (std::size_t axis = 0; axis < spec.dim(); ++axis) {
        std::array<double, 2> c{p[0], p.dim() == 2 ? p[1] : 0.0};
        c[axis] = wrap_unit(c[axis] + step);
        const Point q = Point::from(std::span<const double>(c.data(), p.dim()));
        if (!(metric(spec, p, q) < delta)) continue;
        std::vector<Point> orbit_p, orbit_q;
        for_each_iterate(spec, p, horizon, i, [&](std::uint64_t, const Point& x) { orbit_p.push_back(x); });
        for_each_iterate(spec, q, horizon, i, [&](std::uint64_t, const Point& x) { orbit_q.push_back(x); });
        for (std::size_t n = 0; n <= horizon; ++n) {
          row.expansion = std::max(row.expansion, metric(spec, orbit_p[n], orbit_q[n]));
        }
        ++row.pairs;
      }
    }
    out.push_back(row);
  }
  return out;
}

}  // namespace ergodyn
