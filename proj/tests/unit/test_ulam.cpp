#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ergodyn/error.hpp"
#include "ergodyn/ulam.hpp"

using namespace ergodyn;

namespace {

// Exact Ulam entry for the doubling map: the share of cell i whose image
// lands in cell j, by interval arithmetic on the two preimage branches.
double doubling_exact(std::size_t m, std::size_t i, std::size_t j) {
  const double h = 1.0 / static_cast<double>(m);
  double mass = 0.0;
  for (int branch = 0; branch < 2; ++branch) {
    const double lo = (j * h + branch) / 2.0, hi = ((j + 1) * h + branch) / 2.0;
    mass += std::max(0.0, std::min(hi, (i + 1) * h) - std::max(lo, i * h));
  }
  return mass / h;
}

std::vector<double> random_measure(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(n);
  double total = 0.0;
  for (auto& x : w) total += x = u(rng);
  for (auto& x : w) x /= total;
  return w;
}

}  // namespace

TEST(Partition, CellsTileTheInterval) {
  const auto part = build_partition(SystemSpec::doubling(), 4, 8);
  EXPECT_EQ(part.n_cells(), 4u);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_DOUBLE_EQ(part.lower_corner(c)[0], 0.25 * c);
  EXPECT_EQ(part.cell_of(Point(0.2499)), 0u);
  EXPECT_EQ(part.cell_of(Point(0.25)), 1u);
  EXPECT_EQ(build_partition(SystemSpec::toral(2, 1, 1, 1), 3, 4).n_cells(), 9u);
}

TEST(Partition, SamplesStayInsideTheirCell) {
  for (const auto& spec : {SystemSpec::doubling(), SystemSpec::toral(2, 1, 1, 1)}) {
    const auto part = build_partition(spec, 7, 33, 5);
    for (std::size_t c = 0; c < part.n_cells(); ++c) {
      for (std::size_t j = 0; j < part.samples_per_cell(); ++j) EXPECT_EQ(part.cell_of(part.sample(c, j)), c);
    }
  }
}

TEST(Partition, SingleSampleIsLowerCorner) {
  const auto part = build_partition(SystemSpec::toral(2, 1, 1, 1), 4, 1);
  for (std::size_t c = 0; c < part.n_cells(); ++c) EXPECT_EQ(part.sample(c, 0), part.lower_corner(c));
}

TEST(Partition, BudgetAndValidation) {
  EXPECT_THROW(build_partition(SystemSpec::doubling(), 0, 4), InputError);
  EXPECT_THROW(build_partition(SystemSpec::doubling(), 4, 0), InputError);
  EXPECT_THROW(build_partition(SystemSpec::doubling(), 1 << 20, 1 << 10, 0, 1 << 20), ResourceError);
}

TEST(TransferMatrix, QuarterRotationIsCyclicShift) {
  for (std::size_t s : {1u, 5u, 64u}) {
    const auto spec = SystemSpec::circle_rotation(0.25);
    const auto mat = build_transfer_matrix(build_partition(spec, 4, s), spec);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(mat.at(i, j), j == (i + 1) % 4 ? 1.0 : 0.0);
    }
  }
}

TEST(TransferMatrix, RotationByMultiplesOfCellWidthIsPermutation) {
  for (std::int64_t j = 1; j < 16; ++j) {
    const auto spec = SystemSpec::rational_rotation(j, 16);
    const auto mat = build_transfer_matrix(build_partition(spec, 16, 9), spec);
    std::vector<int> col_ones(16, 0);
    for (std::size_t r = 0; r < 16; ++r) {
      ASSERT_EQ(mat.row_cols(r).size(), 1u);
      EXPECT_EQ(mat.row_values(r)[0], 1.0);
      ++col_ones[mat.row_cols(r)[0]];
    }
    for (int c : col_ones) EXPECT_EQ(c, 1);
  }
}

TEST(TransferMatrix, DoublingMatchesExactIntervalArithmetic) {
  const auto spec = SystemSpec::doubling();
  const auto mat = build_transfer_matrix(build_partition(spec, 4, 64), spec);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(mat.at(i, j), doubling_exact(4, i, j), 1e-12);
  }
  EXPECT_EQ(mat.at(0, 0), 0.5);
  EXPECT_EQ(mat.at(0, 1), 0.5);
}

TEST(TransferMatrix, SampledEntriesApproachExactOnes) {
  const auto spec = SystemSpec::doubling();
  for (std::size_t s : {16u, 64u, 256u}) {
    const auto mat = build_transfer_matrix(build_partition(spec, 12, s, 3), spec);
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t j = 0; j < 12; ++j) {
        EXPECT_LE(std::abs(mat.at(i, j) - doubling_exact(12, i, j)), 2.0 / std::sqrt(double(s)));
      }
    }
  }
}

TEST(TransferMatrix, SingleCell) {
  const auto spec = SystemSpec::circle_rotation(0.3);
  const auto mat = build_transfer_matrix(build_partition(spec, 1, 4), spec);
  EXPECT_EQ(mat.n_cells(), 1u);
  EXPECT_EQ(mat.at(0, 0), 1.0);
}

TEST(TransferMatrix, RowsStochasticAndEdgesSampled) {
  for (const auto& spec : bundled_systems()) {
    const std::size_t m = spec.dim() == 1 ? 64 : 8;
    const auto part = build_partition(spec, m, 16);
    const auto mat = build_transfer_matrix(part, spec);
    for (std::size_t i = 0; i < mat.n_cells(); ++i) {
      double sum = 0.0;
      for (double v : mat.row_values(i)) {
        EXPECT_GT(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12);
      for (auto j : mat.row_cols(i)) {
        bool hit = false;
        for (std::size_t k = 0; k < part.samples_per_cell() && !hit; ++k) {
          hit = part.cell_of(evaluate_map(spec, part.sample(i, k))) == j;
        }
        EXPECT_TRUE(hit);
      }
    }
  }
}

TEST(TransferMatrix, FromEntriesValidates) {
  EXPECT_THROW(TransferMatrix::from_dense({{0.5, 0.4}, {0.0, 1.0}}), InputError);
  EXPECT_THROW(TransferMatrix::from_dense({{1.5, -0.5}, {0.0, 1.0}}), InputError);
  EXPECT_THROW(TransferMatrix::from_entries(2, {{0, 2, 1.0}, {1, 1, 1.0}}), InputError);
  const auto m = TransferMatrix::from_entries(2, {{0, 1, 0.25}, {0, 1, 0.75}, {1, 0, 1.0}});
  EXPECT_EQ(m.at(0, 1), 1.0);
}

TEST(Operators, TransferAndKoopmanExamples) {
  const auto shift = TransferMatrix::from_dense({{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  const auto out = apply_transfer(shift, MeasureVector::one_hot(3, 0));
  EXPECT_EQ(out[1], 1.0);
  const auto back = apply_koopman(shift, CellFunction{{0.0, 1.0, 0.0}});
  EXPECT_EQ(back.values, (std::vector<double>{1.0, 0.0, 0.0}));

  const auto ds = TransferMatrix::from_dense({{0.5, 0.5, 0}, {0, 0.5, 0.5}, {0.5, 0, 0.5}});
  const auto u = apply_transfer(ds, MeasureVector::uniform(3));
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(u[i], 1.0 / 3.0, 1e-15);

  const auto spec = SystemSpec::doubling();
  const auto dm = build_transfer_matrix(build_partition(spec, 4, 16), spec);
  const auto d = apply_transfer(dm, MeasureVector::one_hot(4, 0));
  EXPECT_EQ(d[0], 0.5);
  EXPECT_EQ(d[1], 0.5);
  const auto ones = apply_koopman(dm, CellFunction{std::vector<double>(4, 1.0)});
  for (double v : ones.values) EXPECT_NEAR(v, 1.0, 1e-15);

  EXPECT_THROW(apply_transfer(dm, MeasureVector::uniform(3)), InputError);
  EXPECT_THROW(apply_koopman(dm, CellFunction{{1.0}}), InputError);
}

TEST(Operators, DualityAndMassConservation) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& spec : bundled_systems()) {
    const std::size_t m = spec.dim() == 1 ? 64 : 8;
    const auto mat = build_transfer_matrix(build_partition(spec, m, 32), spec);
    const std::size_t n = mat.n_cells();
    for (int t = 0; t < 20; ++t) {
      const MeasureVector mu(random_measure(n, rng));
      CellFunction x;
      for (std::size_t i = 0; i < n; ++i) x.values.push_back(u(rng));
      const auto pushed = apply_transfer(mat, mu);
      const auto pulled = apply_koopman(mat, x);
      EXPECT_LE(std::abs(pairing(pulled, mu.weights()) - pairing(x, pushed.weights())), 1e-12);
      double total = 0.0;
      for (double w : pushed.weights()) {
        EXPECT_GE(w, 0.0);
        total += w;
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
    }
  }
}

TEST(MeasureVector, Validation) {
  EXPECT_THROW(MeasureVector({0.5, 0.4}), InputError);
  EXPECT_THROW(MeasureVector({1.5, -0.5}), InputError);
  EXPECT_NO_THROW(MeasureVector({0.5, 0.5 + 1e-11}));
}

TEST(TestBank, ValuesAtCellCenters) {
  const auto part = build_partition(SystemSpec::doubling(), 4, 4);
  const auto one = sample_test_bank(part, 1);
  ASSERT_EQ(one.size(), 1u);
  for (double v : one[0].values) EXPECT_EQ(v, 1.0);

  const auto bank = sample_test_bank(part, 3);
  ASSERT_EQ(bank.size(), 3u);
  for (std::size_t c = 0; c < 4; ++c) {
    const double w = 0.125 + 0.25 * c;
    EXPECT_NEAR(bank[1].values[c], std::cos(2 * std::numbers::pi * w), 1e-15);
    EXPECT_NEAR(bank[2].values[c], std::sin(2 * std::numbers::pi * w), 1e-15);
  }
  EXPECT_NEAR(bank[1].values[0], std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(bank[1].values[1], -std::sqrt(0.5), 1e-15);
}

TEST(TestBank, SupNormAtMostOneIn1DAnd2D) {
  for (const auto& spec : {SystemSpec::doubling(), SystemSpec::toral(2, 1, 1, 1)}) {
    const auto part = build_partition(spec, 8, 4);
    for (const auto& x : sample_test_bank(part, 25)) EXPECT_LE(x.sup_norm(), 1.0 + 1e-15);
  }
}

TEST(TestBank, TensorProductsIn2D) {
  const TrigBank bank(2);
  const Point p(0.1, 0.3);
  for (std::size_t id = 0; id < 25; ++id) {
    const auto f = bank.factors(id);
    const TrigBank one(1);
    EXPECT_NEAR(bank.evaluate(id, p), one.evaluate(f[0], Point(0.1)) * one.evaluate(f[1], Point(0.3)), 1e-15);
  }
}
