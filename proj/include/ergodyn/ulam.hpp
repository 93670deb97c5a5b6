#pragma once

// Uniform partitions of [0,1)^d and the sampled Ulam approximation of the
// transfer operator V (pushforward of measures). Measures are row vectors and
// act by μ ↦ μV̂; observables are column vectors and the Koopman action is V̂x.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ergodyn/systems.hpp"

namespace ergodyn {

inline constexpr std::uint64_t kDefaultSampleBudget = std::uint64_t{1} << 28;

class Partition {
 public:
  // Throws InputError for m < 1, s < 1 or dim not in {1,2}; ResourceError
  // when m^dim · s exceeds sample_budget.
  Partition(std::size_t dim, std::size_t cells_per_axis, std::size_t samples_per_cell,
            std::uint64_t seed = 0, std::uint64_t sample_budget = kDefaultSampleBudget);

  std::size_t dim() const { return dim_; }
  std::size_t cells_per_axis() const { return m_; }
  std::size_t samples_per_cell() const { return s_; }
  std::size_t n_cells() const { return n_cells_; }
  std::uint64_t seed() const { return seed_; }

  // Sample j of a cell. Sample 0 is the lower-left corner; then the midpoint
  // (and edge midpoints in 2D); then a seeded low-discrepancy fill.
  Point sample(std::size_t cell, std::size_t j) const;
  Point center(std::size_t cell) const;
  Point lower_corner(std::size_t cell) const;
  // Cell index: ix + m·iy.
  std::size_t cell_of(const Point& p) const;
  std::array<std::size_t, 2> cell_coords(std::size_t cell) const;
  // Offsets of the samples inside the unit cell.
  const std::vector<std::array<double, 2>>& offsets() const { return offsets_; }

 private:
  std::size_t dim_;
  std::size_t m_;
  std::size_t s_;
  std::size_t n_cells_;
  std::uint64_t seed_;
  std::vector<std::array<double, 2>> offsets_;
};

Partition build_partition(const SystemSpec& spec, std::size_t m, std::size_t s, std::uint64_t seed = 0,
                          std::uint64_t sample_budget = kDefaultSampleBudget);

// Probability vector on cells.
class MeasureVector {
 public:
  MeasureVector() = default;
  // Throws InputError unless weights are nonnegative and sum to 1 within 1e-10.
  explicit MeasureVector(std::vector<double> weights);
  static MeasureVector one_hot(std::size_t n, std::size_t cell);
  static MeasureVector uniform(std::size_t n);

  std::size_t size() const { return weights_.size(); }
  std::span<const double> weights() const { return weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<double> weights_;
};

struct CellFunction {
  std::vector<double> values;
  std::size_t size() const { return values.size(); }
  double sup_norm() const;
};

// Sparse row-stochastic matrix, stored as CSR together with its transpose so
// both products are row gathers.
class TransferMatrix {
 public:
  struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
  };

  // Duplicate (row, col) pairs are summed. Throws InputError on out-of-range
  // indices, negative values or a row sum differing from 1 by more than 1e-12.
  static TransferMatrix from_entries(std::size_t n, std::vector<Entry> entries);
  static TransferMatrix from_dense(const std::vector<std::vector<double>>& rows);

  std::size_t n_cells() const { return n_; }
  std::size_t nnz() const { return cols_.size(); }
  double at(std::size_t i, std::size_t j) const;
  std::span<const std::uint32_t> row_cols(std::size_t i) const;
  std::span<const double> row_values(std::size_t i) const;
  std::span<const std::uint32_t> col_rows(std::size_t j) const;
  std::span<const double> col_values(std::size_t j) const;
  std::vector<Entry> entries() const;

  // out = μV̂ (sizes unchecked)
  void push_forward(std::span<const double> mu, std::span<double> out) const;
  // out = V̂x
  void pull_back(std::span<const double> x, std::span<double> out) const;

  const std::optional<Partition>& partition() const { return partition_; }
  const std::optional<SystemSpec>& system() const { return system_; }

 private:
  friend TransferMatrix build_transfer_matrix(const Partition&, const SystemSpec&);

  std::size_t n_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::uint32_t> cols_;
  std::vector<double> vals_;
  std::vector<std::size_t> t_ptr_;
  std::vector<std::uint32_t> t_rows_;
  std::vector<double> t_vals_;
  std::optional<Partition> partition_;
  std::optional<SystemSpec> system_;
};

// Entry (i,j) = #{samples of cell i with φ(sample) in cell j} / s.
TransferMatrix build_transfer_matrix(const Partition& part, const SystemSpec& spec);

MeasureVector apply_transfer(const TransferMatrix& mat, const MeasureVector& mu);
CellFunction apply_koopman(const TransferMatrix& mat, const CellFunction& x);

// Trigonometric observables: 1, cos 2πkω, sin 2πkω (k = 1, 2, ...) in 1D and
// their tensor products in 2D, ordered by max frequency index. Every member
// has continuous sup-norm 1.
class TrigBank {
 public:
  explicit TrigBank(std::size_t dim);
  std::size_t dim() const { return dim_; }
  double evaluate(std::size_t id, const Point& p) const;
  // 1D member index pair for 2D id; (id, 0) in 1D.
  std::array<std::size_t, 2> factors(std::size_t id) const;

 private:
  std::size_t dim_;
};

// Bank members 0..count-1 evaluated at cell centers.
std::vector<CellFunction> sample_test_bank(const Partition& part, std::size_t count);

double pairing(const CellFunction& x, std::span<const double> mu);

}  // namespace ergodyn
