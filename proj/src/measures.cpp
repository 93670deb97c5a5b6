#include "ergodyn/measures.hpp"

#include <algorithm>
#include <iterator>
#include <unordered_map>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"

namespace ergodyn {
namespace {

ClassMeasure solve_class(const TransferMatrix& mat, const CellSet& cells, const StationaryOptions& opts) {
  const std::size_t k = cells.size();
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  for (std::uint32_t i = 0; i < k; ++i) local.emplace(cells[i], i);
  // Restricted block as an entry list; a terminal class keeps all its mass.
  struct Local {
    std::uint32_t row, col;
    double value;
  };
  std::vector<Local> block;
  for (std::uint32_t i = 0; i < k; ++i) {
    const auto cols = mat.row_cols(cells[i]);
    const auto vals = mat.row_values(cells[i]);
    for (std::size_t t = 0; t < cols.size(); ++t) {
      const auto it = local.find(cols[t]);
      if (it != local.end()) block.push_back({i, it->second, vals[t]});
    }
  }
  std::vector<double> mu(k, 1.0 / static_cast<double>(k)), next(k);
  auto step = [&] {
    std::fill(next.begin(), next.end(), 0.0);
    for (const auto& e : block) next[e.col] += mu[e.row] * e.value;
    return simd::l1_distance(mu, next);
  };

  ClassMeasure out;
  out.cells = cells;
  double res = step();
  while (res > opts.tolerance && out.iterations < opts.max_iterations) {
    for (std::size_t i = 0; i < k; ++i) mu[i] = 0.5 * (mu[i] + next[i]);
    ++out.iterations;
    res = step();
  }
  double total = 0.0;
  for (double x : mu) total += x;
  std::vector<double> full(mat.n_cells(), 0.0);
  for (std::size_t i = 0; i < k; ++i) full[cells[i]] = mu[i] / total;

  std::vector<double> image(mat.n_cells());
  mat.push_forward(full, image);
  out.residual = simd::l1_distance(full, image);
  out.converged = out.residual <= opts.tolerance;
  out.measure = MeasureVector(std::move(full));
  return out;
}

}  // namespace

std::size_t ErgodicMeasureSet::n_failed() const {
  return static_cast<std::size_t>(std::count_if(classes.begin(), classes.end(),
                                                [](const ClassMeasure& c) { return !c.converged; }));
}

ErgodicMeasureSet stationary_measures(const TransferMatrix& mat, const MinimalSetReport& report,
                                      const StationaryOptions& opts) {
  if (report.component_of.size() != mat.n_cells()) {
    throw InputError("minimal-set report and transfer matrix come from different partitions");
  }
  ErgodicMeasureSet out;
  for (const auto& cells : report.terminal_sccs) out.classes.push_back(solve_class(mat, cells, opts));
  return out;
}

ErgodicMeasureSet stationary_measures(const TransferMatrix& mat, const TransitionGraph& g,
                                      const StationaryOptions& opts) {
  return stationary_measures(mat, minimal_invariant_sets(g), opts);
}

MeasureVector birkhoff_measure(const SystemSpec& spec, const Point& p, std::uint64_t n, const Partition& part) {
  if (n < 1) throw InputError("Birkhoff measure needs n >= 1");
  if (p.dim() != part.dim()) throw InputError("point dimension does not match the partition");
  std::vector<std::uint64_t> counts(part.n_cells(), 0);
  Point q = p;
  for (std::uint64_t j = 0; j < n; ++j) {
    ++counts[part.cell_of(q)];
    if (j + 1 < n) q = evaluate_map(spec, q);
  }
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return MeasureVector(std::move(w));
}

MeasureVector birkhoff_measure(const SystemSpec& spec, const RationalPoint& p, std::uint64_t n,
                               const Partition& part) {
  if (n < 1) throw InputError("Birkhoff measure needs n >= 1");
  std::vector<std::uint64_t> counts(part.n_cells(), 0);
  RationalPoint q = p;
  for (std::uint64_t j = 0; j < n; ++j) {
    ++counts[part.cell_of(q.to_point())];
    if (j + 1 < n) q = evaluate_map_exact(spec, q);
  }
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = static_cast<double>(counts[i]) / static_cast<double>(n);
  return MeasureVector(std::move(w));
}

CellSet support(std::span<const double> mu, double threshold) {
  if (!(threshold >= 0.0)) throw InputError("support threshold must be >= 0");
  CellSet out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > threshold) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

CellSet support(const MeasureVector& mu, double threshold) { return support(mu.weights(), threshold); }

std::vector<bool> support_minimality_check(const ErgodicMeasureSet& ms, const MinimalSetReport& report,
                                           double threshold) {
  std::vector<bool> out;
  for (const auto& c : ms.classes) {
    const CellSet s = support(c.measure, threshold);
    out.push_back(std::find(report.terminal_sccs.begin(), report.terminal_sccs.end(), s) !=
                  report.terminal_sccs.end());
  }
  return out;
}

AttractionComparison attraction_center_vs_minimal_union(const ErgodicMeasureSet& ms, const MinimalSetReport& report,
                                                        double threshold) {
  AttractionComparison out;
  for (const auto& c : ms.classes) {
    const CellSet s = support(c.measure, threshold);
    out.z.insert(out.z.end(), s.begin(), s.end());
  }
  for (const auto& t : report.terminal_sccs) out.m.insert(out.m.end(), t.begin(), t.end());
  for (auto* set : {&out.z, &out.m}) {
    std::sort(set->begin(), set->end());
    set->erase(std::unique(set->begin(), set->end()), set->end());
  }
  std::set_symmetric_difference(out.z.begin(), out.z.end(), out.m.begin(), out.m.end(),
                                std::back_inserter(out.symmetric_difference));
  out.equal = out.symmetric_difference.empty();
  return out;
}

}  // namespace ergodyn
