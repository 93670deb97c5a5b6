#include "ergodyn/simplex.hpp"

#include <cmath>
#include <cstdint>
#include <limits>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"

namespace ergodyn {
namespace {

constexpr double kEps = 1e-11;
constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-10;
constexpr std::size_t kDegenerateRunLimit = 50;

class Tableau {
 public:
  Tableau(std::span<const double> a, std::size_t m, std::size_t n, std::span<const double> b,
          std::span<const double> c, PivotRule rule)
      : rule_(rule), m_(m), n_(n), w_(n + 2), d_((m + 2) * (n + 2), 0.0), basis_(m), nonbasis_(n + 1) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) at(i, j) = a[i * n + j];
      at(i, n) = -1.0;
      at(i, n + 1) = b[i];
      basis_[i] = static_cast<std::int64_t>(n + i);
    }
    for (std::size_t j = 0; j < n; ++j) {
      at(m, j) = -c[j];
      nonbasis_[j] = static_cast<std::int64_t>(j);
    }
    nonbasis_[n] = -1;  // phase-one artificial
    at(m + 1, n) = 1.0;
  }

  double& at(std::size_t i, std::size_t j) { return d_[i * w_ + j]; }

  void pivot(std::size_t r, std::size_t s) {
    const auto& k = simd::active();
    const double inv = 1.0 / at(r, s);
    double* row_r = &d_[r * w_];
    for (std::size_t i = 0; i < m_ + 2; ++i) {
      if (i == r) continue;
      const double dis = at(i, s);
      if (dis == 0.0) continue;
      const double f = dis * inv;
      k.axpy(-f, row_r, &d_[i * w_], w_);
      at(i, s) = -f;
    }
    for (std::size_t j = 0; j < w_; ++j) row_r[j] *= inv;
    row_r[s] = inv;
    std::swap(basis_[r], nonbasis_[s]);
    ++pivots_;
  }

  enum class Run { optimal, unbounded, budget };

  // Lowest basis index among the minimum ratios.
  std::size_t ratio_test_bland(std::size_t s) {
    std::size_t r = m_;
    double best = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      if (at(i, s) <= kPivotTol) continue;
      const double ratio = std::max(at(i, n_ + 1), 0.0) / at(i, s);
      if (r == m_ || ratio < best - kFeasTol || (ratio <= best + kFeasTol && basis_[i] < basis_[r])) {
        r = i;
        best = ratio;
      }
    }
    return r;
  }

  // Harris two-pass test: bound the step with right-hand sides relaxed by the
  // feasibility tolerance, then take the largest pivot element within it.
  std::size_t ratio_test_harris(std::size_t s) {
    double bound = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m_; ++i) {
      if (at(i, s) <= kPivotTol) continue;
      bound = std::min(bound, (std::max(at(i, n_ + 1), 0.0) + kFeasTol) / at(i, s));
    }
    std::size_t r = m_;
    for (std::size_t i = 0; i < m_; ++i) {
      if (at(i, s) <= kPivotTol) continue;
      if (std::max(at(i, n_ + 1), 0.0) / at(i, s) > bound) continue;
      if (r == m_ || at(i, s) > at(r, s)) r = i;
    }
    return r;
  }

  Run run(int phase, std::size_t budget, std::size_t* entering) {
    const std::size_t x = phase == 1 ? m_ + 1 : m_;
    // Dantzig's rule until a run of degenerate pivots suggests stalling, then
    // Bland's rule (lowest-index entering and leaving variables), which cannot
    // cycle.
    bool bland = rule_ == PivotRule::bland;
    std::size_t degenerate_run = 0;
    while (true) {
      if (pivots_ >= budget) return Run::budget;
      std::size_t s = w_;
      for (std::size_t j = 0; j <= n_; ++j) {
        if (phase == 2 && nonbasis_[j] == -1) continue;
        if (at(x, j) >= -kEps) continue;
        if (s == w_ || (bland ? nonbasis_[j] < nonbasis_[s]
                              : (at(x, j) < at(x, s) || (at(x, j) == at(x, s) && nonbasis_[j] < nonbasis_[s])))) {
          s = j;
        }
      }
      if (s == w_) return Run::optimal;
      const std::size_t r = bland ? ratio_test_bland(s) : ratio_test_harris(s);
      if (r == m_) {
        *entering = s;
        return Run::unbounded;
      }
      degenerate_run = at(r, n_ + 1) <= kFeasTol ? degenerate_run + 1 : 0;
      if (degenerate_run > kDegenerateRunLimit) bland = true;
      pivot(r, s);
    }
  }

  LpResult solve(std::size_t budget) {
    LpResult out;
    std::size_t r = 0;
    for (std::size_t i = 1; i < m_; ++i) {
      if (at(i, n_ + 1) < at(r, n_ + 1)) r = i;
    }
    std::size_t entering = 0;
    if (m_ > 0 && at(r, n_ + 1) < -kEps) {
      pivot(r, n_);
      const Run ph1 = run(1, budget, &entering);
      if (ph1 == Run::budget) {
        out.status = LpStatus::budget_exhausted;
        out.pivots = pivots_;
        return out;
      }
      if (ph1 != Run::optimal || at(m_ + 1, n_ + 1) < -1e-9) {
        out.status = LpStatus::infeasible;
        out.pivots = pivots_;
        return out;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] != -1) continue;
        std::size_t s = 0;
        for (std::size_t j = 1; j <= n_; ++j) {
          if (at(i, j) < at(i, s) || (at(i, j) == at(i, s) && nonbasis_[j] < nonbasis_[s])) s = j;
        }
        pivot(i, s);
      }
    }
    const Run ph2 = run(2, budget, &entering);
    out.pivots = pivots_;
    out.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) out.x[basis_[i]] = at(i, n_ + 1);
    }
    out.value = at(m_, n_ + 1);
    if (ph2 == Run::unbounded) {
      out.status = LpStatus::unbounded;
      out.ray.assign(n_, 0.0);
      if (nonbasis_[entering] >= 0 && static_cast<std::size_t>(nonbasis_[entering]) < n_) {
        out.ray[nonbasis_[entering]] = 1.0;
      }
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] >= 0 && static_cast<std::size_t>(basis_[i]) < n_) {
          out.ray[basis_[i]] = std::max(0.0, -at(i, entering));
        }
      }
    } else {
      out.status = ph2 == Run::optimal ? LpStatus::optimal : LpStatus::budget_exhausted;
    }
    return out;
  }

 private:
  PivotRule rule_;
  std::size_t m_, n_, w_;
  std::vector<double> d_;
  std::vector<std::int64_t> basis_, nonbasis_;
  std::size_t pivots_ = 0;
};

}  // namespace

const char* lp_status_name(LpStatus s) {
  switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::budget_exhausted: return "budget_exhausted";
  }
  return "infeasible";
}

LpResult solve_lp(std::span<const double> a, std::size_t rows, std::size_t cols, std::span<const double> b,
                  std::span<const double> c, std::size_t max_pivots, PivotRule rule) {
  if (a.size() != rows * cols || b.size() != rows || c.size() != cols) {
    throw InputError("linear program dimensions do not agree");
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw InputError("linear program has a non-finite coefficient");
  }
  Tableau t(a, rows, cols, b, c, rule);
  return t.solve(max_pivots);
}

}  // namespace ergodyn
