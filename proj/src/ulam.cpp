#include "ergodyn/ulam.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"

namespace ergodyn {
namespace {

double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double r = 0.0;
  double f = 1.0 / static_cast<double>(base);
  double scale = f;
  while (i > 0) {
    r += static_cast<double>(i % base) * scale;
    i /= base;
    scale *= f;
  }
  return r;
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<std::array<double, 2>> make_offsets(std::size_t dim, std::size_t s, std::uint64_t seed) {
  std::vector<std::array<double, 2>> out;
  out.reserve(s);
  std::array<double, 2> shift{0.0, 0.0};
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    shift = {unit_from_bits(rng()), unit_from_bits(rng())};
  }
  if (dim == 1) {
    // Van der Corput base 2 starts 0, 1/2: corner, then midpoint.
    for (std::size_t j = 0; j < s; ++j) {
      const double v = radical_inverse(j, 2);
      out.push_back({j < 2 ? v : wrap_unit(v + shift[0]), 0.0});
    }
    return out;
  }
  const std::array<std::array<double, 2>, 4> strata{{{0.0, 0.0}, {0.5, 0.5}, {0.5, 0.0}, {0.0, 0.5}}};
  for (std::size_t j = 0; j < s; ++j) {
    if (j < strata.size()) {
      out.push_back(strata[j]);
    } else {
      const auto k = static_cast<std::uint64_t>(j - strata.size() + 1);
      out.push_back({wrap_unit(radical_inverse(k, 2) + shift[0]), wrap_unit(radical_inverse(k, 3) + shift[1])});
    }
  }
  return out;
}

// Coordinate (i + off)/m kept inside [i/m, (i+1)/m).
double cell_coordinate(std::size_t i, double off, std::size_t m) {
  const double md = static_cast<double>(m);
  double v = (static_cast<double>(i) + off) / md;
  const double hi = static_cast<double>(i + 1) / md;
  if (v >= hi) v = std::nextafter(hi, 0.0);
  return v;
}

std::size_t axis_cell(double v, std::size_t m) {
  const auto i = static_cast<std::size_t>(v * static_cast<double>(m));
  return std::min(i, m - 1);
}

}  // namespace

Partition::Partition(std::size_t dim, std::size_t cells_per_axis, std::size_t samples_per_cell,
                     std::uint64_t seed, std::uint64_t sample_budget)
    : dim_(dim), m_(cells_per_axis), s_(samples_per_cell), n_cells_(0), seed_(seed) {
  if (dim_ != 1 && dim_ != 2) throw InputError("partition dimension must be 1 or 2");
  if (m_ < 1) throw InputError("cells_per_axis must be >= 1");
  if (s_ < 1) throw InputError("samples_per_cell must be >= 1");
  if (m_ > (std::size_t{1} << 24)) throw ResourceError("cells_per_axis exceeds 2^24");
  n_cells_ = dim_ == 1 ? m_ : m_ * m_;
  const long double total = static_cast<long double>(n_cells_) * static_cast<long double>(s_);
  if (total > static_cast<long double>(sample_budget)) {
    throw ResourceError("partition needs " + std::to_string(n_cells_) + " cells x " + std::to_string(s_) +
                        " samples, above the budget of " + std::to_string(sample_budget) + " samples");
  }
  offsets_ = make_offsets(dim_, s_, seed_);
}

std::array<std::size_t, 2> Partition::cell_coords(std::size_t cell) const {
  if (dim_ == 1) return {cell, 0};
  return {cell % m_, cell / m_};
}

Point Partition::sample(std::size_t cell, std::size_t j) const {
  const auto c = cell_coords(cell);
  const auto& off = offsets_[j];
  if (dim_ == 1) return Point(cell_coordinate(c[0], off[0], m_));
  return Point(cell_coordinate(c[0], off[0], m_), cell_coordinate(c[1], off[1], m_));
}

Point Partition::center(std::size_t cell) const {
  const auto c = cell_coords(cell);
  const double md = static_cast<double>(m_);
  if (dim_ == 1) return Point((static_cast<double>(c[0]) + 0.5) / md);
  return Point((static_cast<double>(c[0]) + 0.5) / md, (static_cast<double>(c[1]) + 0.5) / md);
}

Point Partition::lower_corner(std::size_t cell) const {
  const auto c = cell_coords(cell);
  const double md = static_cast<double>(m_);
  if (dim_ == 1) return Point(static_cast<double>(c[0]) / md);
  return Point(static_cast<double>(c[0]) / md, static_cast<double>(c[1]) / md);
}

std::size_t Partition::cell_of(const Point& p) const {
  if (p.dim() != dim_) throw InputError("point dimension does not match partition");
  if (dim_ == 1) return axis_cell(p[0], m_);
  return axis_cell(p[0], m_) + m_ * axis_cell(p[1], m_);
}

Partition build_partition(const SystemSpec& spec, std::size_t m, std::size_t s, std::uint64_t seed,
                          std::uint64_t sample_budget) {
  return Partition(spec.dim(), m, s, seed, sample_budget);
}

MeasureVector::MeasureVector(std::vector<double> weights) : weights_(std::move(weights)) {
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("measure weights must be finite and nonnegative");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-10) throw InputError("measure weights must sum to 1");
}

MeasureVector MeasureVector::one_hot(std::size_t n, std::size_t cell) {
  if (cell >= n) throw InputError("one-hot cell out of range");
  std::vector<double> w(n, 0.0);
  w[cell] = 1.0;
  return MeasureVector(std::move(w));
}

MeasureVector MeasureVector::uniform(std::size_t n) {
  if (n == 0) throw InputError("uniform measure needs at least one cell");
  return MeasureVector(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double CellFunction::sup_norm() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::fabs(v));
  return m;
}

TransferMatrix TransferMatrix::from_entries(std::size_t n, std::vector<Entry> entries) {
  if (n == 0) throw InputError("transfer matrix needs at least one cell");
  for (const auto& e : entries) {
    if (e.row >= n || e.col >= n) throw InputError("transfer matrix entry index out of range");
    if (!(e.value >= 0.0) || !std::isfinite(e.value)) throw InputError("transfer matrix entries must be nonnegative");
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.row != b.row ? a.row < b.row : a.col < b.col; });
  TransferMatrix t;
  t.n_ = n;
  t.row_ptr_.assign(n + 1, 0);
  std::uint32_t last_row = UINT32_MAX, last_col = UINT32_MAX;
  for (const auto& e : entries) {
    if (e.value == 0.0) continue;
    if (e.row == last_row && e.col == last_col) {
      t.vals_.back() += e.value;
      continue;
    }
    t.cols_.push_back(e.col);
    t.vals_.push_back(e.value);
    ++t.row_ptr_[e.row + 1];
    last_row = e.row;
    last_col = e.col;
  }
  for (std::size_t i = 0; i < n; ++i) t.row_ptr_[i + 1] += t.row_ptr_[i];
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double v : t.row_values(i)) sum += v;
    if (std::fabs(sum - 1.0) > 1e-12) {
      throw InputError("row " + std::to_string(i) + " of the transfer matrix sums to " + std::to_string(sum));
    }
  }
  t.t_ptr_.assign(n + 1, 0);
  for (auto c : t.cols_) ++t.t_ptr_[c + 1];
  for (std::size_t j = 0; j < n; ++j) t.t_ptr_[j + 1] += t.t_ptr_[j];
  t.t_rows_.resize(t.cols_.size());
  t.t_vals_.resize(t.cols_.size());
  std::vector<std::size_t> fill(t.t_ptr_.begin(), t.t_ptr_.end() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = t.row_ptr_[i]; k < t.row_ptr_[i + 1]; ++k) {
      const auto pos = fill[t.cols_[k]]++;
      t.t_rows_[pos] = static_cast<std::uint32_t>(i);
      t.t_vals_[pos] = t.vals_[k];
    }
  }
  return t;
}

TransferMatrix TransferMatrix::from_dense(const std::vector<std::vector<double>>& rows) {
  std::vector<Entry> entries;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw InputError("dense transfer matrix must be square");
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (rows[i][j] != 0.0) {
        entries.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), rows[i][j]});
      }
    }
  }
  return from_entries(rows.size(), std::move(entries));
}

double TransferMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<std::uint32_t>(j));
  if (it == cols.end() || *it != j) return 0.0;
  return row_values(i)[static_cast<std::size_t>(it - cols.begin())];
}

std::span<const std::uint32_t> TransferMatrix::row_cols(std::size_t i) const {
  return {cols_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const double> TransferMatrix::row_values(std::size_t i) const {
  return {vals_.data() + row_ptr_[i], row_ptr_[i + 1] - row_ptr_[i]};
}

std::span<const std::uint32_t> TransferMatrix::col_rows(std::size_t j) const {
  return {t_rows_.data() + t_ptr_[j], t_ptr_[j + 1] - t_ptr_[j]};
}

std::span<const double> TransferMatrix::col_values(std::size_t j) const {
  return {t_vals_.data() + t_ptr_[j], t_ptr_[j + 1] - t_ptr_[j]};
}

std::vector<TransferMatrix::Entry> TransferMatrix::entries() const {
  std::vector<Entry> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
      out.push_back({static_cast<std::uint32_t>(i), cols_[k], vals_[k]});
    }
  }
  return out;
}

void TransferMatrix::push_forward(std::span<const double> mu, std::span<double> out) const {
  const auto& k = simd::active();
  for (std::size_t j = 0; j < n_; ++j) {
    out[j] = k.gather_dot(t_vals_.data() + t_ptr_[j], t_rows_.data() + t_ptr_[j], mu.data(),
                          t_ptr_[j + 1] - t_ptr_[j]);
  }
}

void TransferMatrix::pull_back(std::span<const double> x, std::span<double> out) const {
  const auto& k = simd::active();
  for (std::size_t i = 0; i < n_; ++i) {
    out[i] = k.gather_dot(vals_.data() + row_ptr_[i], cols_.data() + row_ptr_[i], x.data(),
                          row_ptr_[i + 1] - row_ptr_[i]);
  }
}

TransferMatrix build_transfer_matrix(const Partition& part, const SystemSpec& spec) {
  if (part.dim() != spec.dim()) throw InputError("partition and system dimensions differ");
  const std::size_t n = part.n_cells();
  const std::size_t s = part.samples_per_cell();
  const double inv_s = 1.0 / static_cast<double>(s);
  std::vector<TransferMatrix::Entry> entries;
  std::vector<std::uint32_t> hits(s);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      hits[j] = static_cast<std::uint32_t>(part.cell_of(evaluate_map(spec, part.sample(i, j))));
    }
    std::sort(hits.begin(), hits.end());
    for (std::size_t a = 0; a < s;) {
      std::size_t b = a;
      while (b < s && hits[b] == hits[a]) ++b;
      entries.push_back({static_cast<std::uint32_t>(i), hits[a], static_cast<double>(b - a) * inv_s});
      a = b;
    }
  }
  TransferMatrix t = TransferMatrix::from_entries(n, std::move(entries));
  t.partition_ = part;
  t.system_ = spec;
  return t;
}

MeasureVector apply_transfer(const TransferMatrix& mat, const MeasureVector& mu) {
  if (mu.size() != mat.n_cells()) throw InputError("measure size does not match transfer matrix");
  std::vector<double> out(mat.n_cells());
  mat.push_forward(mu.weights(), out);
  return MeasureVector(std::move(out));
}

CellFunction apply_koopman(const TransferMatrix& mat, const CellFunction& x) {
  if (x.size() != mat.n_cells()) throw InputError("function size does not match transfer matrix");
  CellFunction out{std::vector<double>(mat.n_cells())};
  mat.pull_back(x.values, out.values);
  return out;
}

TrigBank::TrigBank(std::size_t dim) : dim_(dim) {
  if (dim_ != 1 && dim_ != 2) throw InputError("bank dimension must be 1 or 2");
}

std::array<std::size_t, 2> TrigBank::factors(std::size_t id) const {
  if (dim_ == 1) return {id, 0};
  // Pairs with max(i,j) = r come in lexicographic order; there are 2r+1 of them.
  std::size_t r = 0;
  std::size_t remaining = id;
  while (remaining >= 2 * r + 1) {
    remaining -= 2 * r + 1;
    ++r;
  }
  if (remaining < r) return {remaining, r};
  if (remaining == r) return {r, r};
  return {r, remaining - r - 1};
}

namespace {
double trig_1d(std::size_t id, double x) {
  if (id == 0) return 1.0;
  const auto k = static_cast<double>((id + 1) / 2);
  const double arg = 2.0 * std::numbers::pi * k * x;
  return (id % 2 == 1) ? std::cos(arg) : std::sin(arg);
}
}  // namespace

double TrigBank::evaluate(std::size_t id, const Point& p) const {
  if (p.dim() != dim_) throw InputError("point dimension does not match bank");
  const auto f = factors(id);
  if (dim_ == 1) return trig_1d(f[0], p[0]);
  return trig_1d(f[0], p[0]) * trig_1d(f[1], p[1]);
}

std::vector<CellFunction> sample_test_bank(const Partition& part, std::size_t count) {
  if (count < 1) throw InputError("test bank count must be >= 1");
  const TrigBank bank(part.dim());
  std::vector<CellFunction> out(count);
  for (std::size_t id = 0; id < count; ++id) {
    out[id].values.resize(part.n_cells());
    for (std::size_t c = 0; c < part.n_cells(); ++c) out[id].values[c] = bank.evaluate(id, part.center(c));
  }
  return out;
}

double pairing(const CellFunction& x, std::span<const double> mu) {
  if (x.size() != mu.size()) throw InputError("pairing size mismatch");
  return simd::dot(x.values, mu);
}

}  // namespace ergodyn
