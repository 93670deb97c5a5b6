#pragma once

// Dense two-phase simplex: maximize cᵀx subject to Ax <= b, x >= 0. Sized for
// tall problems (many constraints, few variables).

#include <cstddef>
#include <span>
#include <vector>

namespace ergodyn {

// bland: lowest-index rule throughout. dantzig_bland: most negative reduced
// cost, switching to Bland's rule after a run of degenerate pivots.
enum class PivotRule { bland, dantzig_bland };

enum class LpStatus { optimal, unbounded, infeasible, budget_exhausted };
const char* lp_status_name(LpStatus s);

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double value = 0.0;
  std::vector<double> x;
  // For unbounded problems, a nonnegative direction d with Ad <= 0 and cᵀd > 0.
  std::vector<double> ray;
  std::size_t pivots = 0;
};

// a is rows×cols row-major. On budget exhaustion during phase 2 the current
// (feasible) basic solution is returned.
LpResult solve_lp(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> b,
                  std::span<const double> c, std::size_t max_pivots = 100000,
                  PivotRule rule = PivotRule::dantzig_bland);

}  // namespace ergodyn
