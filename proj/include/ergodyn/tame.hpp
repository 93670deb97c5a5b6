#pragma once

// Diagnostics separating tame and ordinary behaviour from chaotic behaviour:
// the Köhler functional of iterated observables, the enveloping-semigroup
// metric on iterates, covering profiles under it and an equicontinuity probe.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ergodyn/systems.hpp"

namespace ergodyn {

struct ValueMatrix {
  std::size_t rows = 0;  // K powers
  std::size_t cols = 0;  // S grid points
  std::vector<double> data;

  double at(std::size_t k, std::size_t s) const { return data[k * cols + s]; }
  std::span<const double> row(std::size_t k) const { return {data.data() + k * cols, cols}; }
};

// Midpoint grid: (j+½)/S in 1D, a √S×√S tensor grid in 2D (S must be square).
std::vector<Point> midpoint_grid(std::size_t dim, std::size_t s);

// Entry (k,s) = x(φ^{n(k)} ω_s) for bank member function_id.
ValueMatrix koopman_value_matrix(const SystemSpec& spec, std::size_t function_id,
                                 std::span<const std::uint64_t> powers, std::span<const Point> grid);

inline constexpr std::size_t kMaxKoehlerTerms = 16;

struct KoehlerResult {
  double defect = 0.0;               // max_s |Σ a_k values(k,s)|
  std::vector<double> coefficients;  // Σ|a_k| = 1
  bool suboptimal = false;           // some facet LP ran out of pivots
  std::size_t lps = 0;
  std::size_t pivots = 0;
};

// min over Σ|a|=1 of max_s |Σ a_k values(k,s)|. The ℓ1 sphere is the union of
// its facets {a = σ∘y : y >= 0, Σy = 1}; on each facet the problem is the LP
// max Σy s.t. |V_σ y| <= 1, whose optimum is the reciprocal of the facet
// minimum. Facets σ and −σ coincide up to sign, so 2^{K−1} LPs are solved.
KoehlerResult koehler_defect(const ValueMatrix& values, std::size_t pivot_budget = 100000);

enum class TameStrategy { fixed, adversarial };
const char* strategy_name(TameStrategy s);

struct TamenessReport {
  std::size_t function_id = 0;
  TameStrategy strategy = TameStrategy::fixed;
  std::size_t grid_size = 0;
  std::vector<std::uint64_t> subsequence;  // n(1..K_max)
  std::vector<std::size_t> ks;             // 2..K_max
  std::vector<double> defects;
  std::vector<std::vector<double>> coefficients;
  bool suboptimal = false;
};

// Fixed strategy: n(k) = k. Adversarial: n(1) = 1, then each next power is the
// candidate among the following `window` integers that maximizes the defect.
TamenessReport tameness_profile(const SystemSpec& spec, std::size_t function_id, std::size_t k_max,
                                std::size_t grid_size, TameStrategy strategy, std::size_t window = 8);

// Points ω_1..ω_M of a Kronecker sequence with badly approximable steps.
std::vector<Point> dense_points(std::size_t dim, std::size_t m);

// Σ_{n<=B, m<=M} 2^{-(n+m)} |x_n(φ^{n1}ω_m) − x_n(φ^{n2}ω_m)| with x_n the
// non-constant bank members.
double ellis_metric(const SystemSpec& spec, std::uint64_t n1, std::uint64_t n2, std::size_t bank_size = 16,
                    std::size_t points = 16);
// Bound on the omitted tail of the double sum.
double ellis_truncation_bound(std::size_t bank_size, std::size_t points);

inline constexpr std::uint64_t kDefaultCoveringBudget = std::uint64_t{1} << 36;

struct CoveringProfile {
  std::uint64_t horizon = 0;
  std::size_t bank_size = 0;
  std::size_t points = 0;
  double truncation_bound = 0.0;
  std::vector<double> eps;
  std::vector<std::size_t> counts;  // per ε, over φ^0..φ^N
  // counts_by_horizon[e][n]: covering number of φ^0..φ^n at eps[e].
  std::vector<std::vector<std::size_t>> counts_by_horizon;
};

// Greedy first-fit ε-nets of {φ^0..φ^N} under ellis_metric. An ε'-net is an
// ε-net for every ε >= ε', so each reported count is the smallest greedy net
// found at any listed ε' <= ε; this keeps counts nonincreasing in ε, and since
// greedy nets only grow with the prefix, nondecreasing in N. Throws ResourceError when (N+1)²·B·M exceeds budget.
CoveringProfile covering_profile(const SystemSpec& spec, std::uint64_t horizon, std::span<const double> eps_list,
                                 std::size_t bank_size = 16, std::size_t points = 16,
                                 std::uint64_t budget = kDefaultCoveringBudget);

struct ExpansionRow {
  double delta = 0.0;
  double expansion = 0.0;  // max over pairs and n <= N of ρ(φⁿp, φⁿq)
  std::size_t pairs = 0;
};

// Pairs (p, p + d·e_c) with ρ < δ for each base point and coordinate axis.
// Empty base_points selects a 64-point midpoint grid.
std::vector<ExpansionRow> equicontinuity_probe(const SystemSpec& spec, std::span<const double> deltas,
                                               std::uint64_t horizon, std::span<const Point> base_points = {});

}  // namespace ergodyn
