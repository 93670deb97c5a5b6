#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "ergodyn/simplex.hpp"

using namespace ergodyn;

namespace {

// Best vertex of {Ax <= b, x >= 0} found by enumerating every choice of
// `cols` active constraints. Returns -inf when no vertex is feasible.
double vertex_enumeration(const std::vector<double>& a, std::size_t rows, std::size_t cols,
                          const std::vector<double>& b, const std::vector<double>& c) {
  const std::size_t total = rows + cols;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<std::size_t> pick(cols);
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start, std::size_t depth) {
    if (depth == cols) {
      Eigen::MatrixXd m(cols, cols);
      Eigen::VectorXd r(cols);
      for (std::size_t i = 0; i < cols; ++i) {
        const std::size_t k = pick[i];
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = k < rows ? a[k * cols + j] : (k - rows == j ? 1.0 : 0.0);
        r(i) = k < rows ? b[k] : 0.0;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
      if (lu.rank() < static_cast<Eigen::Index>(cols)) return;
      const Eigen::VectorXd x = lu.solve(r);
      for (std::size_t j = 0; j < cols; ++j) {
        if (x(j) < -1e-9) return;
      }
      for (std::size_t i = 0; i < rows; ++i) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < cols; ++j) lhs += a[i * cols + j] * x(j);
        if (lhs > b[i] + 1e-9) return;
      }
      double v = 0.0;
      for (std::size_t j = 0; j < cols; ++j) v += c[j] * x(j);
      best = std::max(best, v);
      return;
    }
    for (std::size_t k = start; k < total; ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

void expect_feasible(const LpResult& r, const std::vector<double>& a, std::size_t rows, std::size_t cols,
                     const std::vector<double>& b) {
  for (double x : r.x) EXPECT_GE(x, -1e-9);
  for (std::size_t i = 0; i < rows; ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < cols; ++j) lhs += a[i * cols + j] * r.x[j];
    EXPECT_LE(lhs, b[i] + 1e-9);
  }
}

}  // namespace

TEST(Simplex, TextbookProblem) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 → 36 at (2, 6).
  const std::vector<double> a{1, 0, 0, 2, 3, 2}, b{4, 12, 18}, c{3, 5};
  for (auto rule : {PivotRule::bland, PivotRule::dantzig_bland}) {
    const auto r = solve_lp(a, 3, 2, b, c, 1000, rule);
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.value, 36.0, 1e-12);
    EXPECT_NEAR(r.x[0], 2.0, 1e-12);
    EXPECT_NEAR(r.x[1], 6.0, 1e-12);
  }
}

TEST(Simplex, NegativeRightHandSideNeedsPhaseOne) {
  // max x + y, −x − y <= −2 (x + y >= 2), x <= 3, y <= 1 → 4.
  const std::vector<double> a{-1, -1, 1, 0, 0, 1}, b{-2, 3, 1}, c{1, 1};
  const auto r = solve_lp(a, 3, 2, b, c);
  ASSERT_EQ(r.status, LpStatus::optimal);
  EXPECT_NEAR(r.value, 4.0, 1e-12);
}

TEST(Simplex, Infeasible) {
  const std::vector<double> a{1, 1, -1, -1}, b{1, -3}, c{1, 0};
  EXPECT_EQ(solve_lp(a, 2, 2, b, c).status, LpStatus::infeasible);
}

TEST(Simplex, UnboundedWithRay) {
  const std::vector<double> a{1, -1}, b{1}, c{1, 1};
  const auto r = solve_lp(a, 1, 2, b, c);
  ASSERT_EQ(r.status, LpStatus::unbounded);
  ASSERT_EQ(r.ray.size(), 2u);
  EXPECT_LE(r.ray[0] - r.ray[1], 1e-12);
  EXPECT_GT(r.ray[0] + r.ray[1], 0.0);
  for (double d : r.ray) EXPECT_GE(d, 0.0);
}

TEST(Simplex, BudgetExhaustionReportsStatus) {
  const std::vector<double> a{1, 0, 0, 2, 3, 2}, b{4, 12, 18}, c{3, 5};
  const auto r = solve_lp(a, 3, 2, b, c, 1);
  EXPECT_EQ(r.status, LpStatus::budget_exhausted);
  EXPECT_EQ(std::string(lp_status_name(r.status)), "budget_exhausted");
}

TEST(Simplex, DegenerateProblemTerminates) {
  // Beale's cycling example for the textbook Dantzig rule.
  const std::vector<double> a{0.25, -60, -0.04, 9, 0.5, -90, -0.02, 3, 0, 0, 1, 0}, b{0, 0, 1},
      c{0.75, -150, 0.02, -6};
  for (auto rule : {PivotRule::bland, PivotRule::dantzig_bland}) {
    const auto r = solve_lp(a, 3, 4, b, c, 1000, rule);
    ASSERT_EQ(r.status, LpStatus::optimal);
    EXPECT_NEAR(r.value, 0.05, 1e-12);
  }
}

TEST(Simplex, RandomProblemsMatchVertexEnumeration) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const std::size_t cols = 2 + t % 2, rows = 4 + t % 5;
    std::vector<double> a(rows * cols), b(rows), c(cols);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng) + 0.3;
    for (auto& v : c) v = u(rng);
    // A box keeps every instance bounded.
    for (std::size_t j = 0; j < cols; ++j) {
      std::vector<double> row(cols, 0.0);
      row[j] = 1.0;
      a.insert(a.end(), row.begin(), row.end());
      b.push_back(5.0);
    }
    const std::size_t all_rows = rows + cols;
    const double oracle = vertex_enumeration(a, all_rows, cols, b, c);
    for (auto rule : {PivotRule::bland, PivotRule::dantzig_bland}) {
      const auto r = solve_lp(a, all_rows, cols, b, c, 10000, rule);
      if (std::isinf(oracle)) {
        EXPECT_EQ(r.status, LpStatus::infeasible) << t;
        continue;
      }
      ASSERT_EQ(r.status, LpStatus::optimal) << t;
      EXPECT_NEAR(r.value, oracle, 1e-9) << t;
      expect_feasible(r, a, all_rows, cols, b);
    }
  }
}
