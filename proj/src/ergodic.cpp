#include "ergodyn/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"
#include "ergodyn/topology.hpp"

namespace ergodyn {
namespace {

void check_size(const TransferMatrix& mat, std::size_t n, const char* what) {
  if (n != mat.n_cells()) {
    throw InputError(std::string(what) + " has " + std::to_string(n) + " entries, matrix has " +
                     std::to_string(mat.n_cells()) + " cells");
  }
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

using Dense = std::vector<double>;

// C = A·B for n×n row-major matrices.
Dense matmul(const Dense& a, const Dense& b, std::size_t n) {
  Dense c(n * n, 0.0);
  const auto& k = simd::active();
  for (std::size_t i = 0; i < n; ++i) {
    double* ci = &c[i * n];
    for (std::size_t j = 0; j < n; ++j) {
      const double aij = a[i * n + j];
      if (aij != 0.0) k.axpy(aij, &b[j * n], ci, n);
    }
  }
  return c;
}

// Row sums drift by rounding; pin them back to 1.
void renormalize_rows(Dense& q, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += q[i * n + j];
    for (std::size_t j = 0; j < n; ++j) q[i * n + j] /= s;
  }
}

// Induced ∞-norm of V̂Q − Q.
double residual_vq(const TransferMatrix& mat, const Dense& q, std::size_t n) {
  const auto& k = simd::active();
  std::vector<double> row(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(row.begin(), row.end(), 0.0);
    const auto cols = mat.row_cols(i);
    const auto vals = mat.row_values(i);
    for (std::size_t t = 0; t < cols.size(); ++t) k.axpy(vals[t], &q[cols[t] * n], row.data(), n);
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(row[j] - q[i * n + j]);
    worst = std::max(worst, s);
  }
  return worst;
}

double residual_idem(const Dense& q, std::size_t n) {
  const Dense q2 = matmul(q, q, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += std::abs(q2[i * n + j] - q[i * n + j]);
    worst = std::max(worst, s);
  }
  return worst;
}

double l1_residual(const TransferMatrix& mat, std::span<const double> mu, std::vector<double>& scratch) {
  mat.push_forward(mu, scratch);
  return simd::l1_distance(mu, scratch);
}

}  // namespace

ErgodicSchedule::ErgodicSchedule(std::vector<ScheduleTerm> terms, std::string label)
    : terms_(std::move(terms)), label_(std::move(label)) {
  if (terms_.empty()) throw InputError("schedule needs at least one term");
  long double total = 0.0L;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!(terms_[i].weight >= 0.0) || !std::isfinite(terms_[i].weight)) {
      throw InputError("schedule weight " + std::to_string(i) + " is negative or not finite");
    }
    if (i > 0 && terms_[i].power <= terms_[i - 1].power) {
      throw InputError("schedule powers must be strictly increasing");
    }
    total += terms_[i].weight;
  }
  if (std::abs(total - 1.0L) > 1e-12L) throw InputError("schedule weights must sum to 1");
}

std::string ErgodicSchedule::describe() const {
  if (!label_.empty()) return label_;
  return "custom(" + std::to_string(terms_.size()) + " terms, powers " + std::to_string(min_power()) + ".." +
         std::to_string(max_power()) + ")";
}

ErgodicSchedule ErgodicSchedule::mix(double a, const ErgodicSchedule& s1, const ErgodicSchedule& s2) {
  if (!(a >= 0.0 && a <= 1.0)) throw InputError("mixing weight must lie in [0,1]");
  std::map<std::uint64_t, double> merged;
  for (const auto& t : s1.terms()) merged[t.power] += a * t.weight;
  for (const auto& t : s2.terms()) merged[t.power] += (1.0 - a) * t.weight;
  std::vector<ScheduleTerm> terms;
  for (const auto& [p, w] : merged) terms.push_back({p, w});
  return ErgodicSchedule(std::move(terms));
}

ErgodicSchedule cesaro_schedule(std::uint64_t n) {
  if (n < 1) throw InputError("Cesaro length must be >= 1");
  std::vector<ScheduleTerm> terms(n);
  const double w = 1.0 / static_cast<double>(n);
  for (std::uint64_t k = 0; k < n; ++k) terms[k] = {k, w};
  return ErgodicSchedule(std::move(terms), "cesaro(" + std::to_string(n) + ")");
}

ErgodicSchedule window_schedule(std::uint64_t b, std::uint64_t l) {
  if (l < 1) throw InputError("window length must be >= 1");
  std::vector<ScheduleTerm> terms(l);
  const double w = 1.0 / static_cast<double>(l);
  for (std::uint64_t k = 0; k < l; ++k) terms[k] = {b + k, w};
  return ErgodicSchedule(std::move(terms), "window(" + std::to_string(b) + "," + std::to_string(l) + ")");
}

std::vector<double> apply_schedule_raw(const TransferMatrix& mat, const ErgodicSchedule& sch,
                                       std::span<const double> v) {
  check_size(mat, v.size(), "vector");
  const std::size_t n = v.size();
  std::vector<double> cur(v.begin(), v.end()), next(n), acc(n, 0.0);
  std::uint64_t p = 0;
  for (const auto& t : sch.terms()) {
    for (; p < t.power; ++p) {
      mat.push_forward(cur, next);
      cur.swap(next);
    }
    simd::axpy(t.weight, cur, acc);
  }
  return acc;
}

MeasureVector apply_schedule(const TransferMatrix& mat, const ErgodicSchedule& sch, const MeasureVector& mu) {
  auto w = apply_schedule_raw(mat, sch, mu.weights());
  for (double& x : w) x = std::max(x, 0.0);
  return MeasureVector(std::move(w));
}

double ergodicity_defect(const TransferMatrix& mat, const ErgodicSchedule& sch, std::span<const CellFunction> bank,
                         std::span<const MeasureVector> probes) {
  if (bank.empty() || probes.empty()) throw InputError("ergodicity defect needs a nonempty bank and probe set");
  double worst = 0.0;
  std::vector<double> diff(mat.n_cells());
  for (const auto& mu : probes) {
    check_size(mat, mu.size(), "probe");
    mat.push_forward(mu.weights(), diff);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = mu[i] - diff[i];
    const auto t = apply_schedule_raw(mat, sch, diff);
    for (const auto& x : bank) worst = std::max(worst, std::abs(simd::dot(x.values, t)));
  }
  return worst;
}

double weakstar_distance(std::span<const double> mu1, std::span<const double> mu2,
                         std::span<const CellFunction> bank) {
  if (mu1.size() != mu2.size()) throw InputError("weak* distance between measures of different sizes");
  double worst = 0.0;
  for (const auto& x : bank) {
    if (x.size() != mu1.size()) throw InputError("test function size does not match the measures");
    worst = std::max(worst, std::abs(simd::dot(x.values, mu1) - simd::dot(x.values, mu2)));
  }
  return worst;
}

double weakstar_distance(const MeasureVector& mu1, const MeasureVector& mu2, std::span<const CellFunction> bank) {
  return weakstar_distance(mu1.weights(), mu2.weights(), bank);
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::not_converged: return "not_converged";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

std::size_t tail_start(std::size_t n) {
  if (n < 2) return 0;
  return std::min(3 * n / 4, n - 2);
}

ConvergenceReport convergence_from_pairings(std::vector<std::vector<double>> pairings,
                                            std::vector<double> ergodicity_defects,
                                            std::vector<std::string> descriptions, const ConvergenceOptions& opts) {
  ConvergenceReport rep;
  rep.tolerance = opts.tol;
  rep.defect_threshold = opts.defect_threshold;
  rep.schedules = std::move(descriptions);
  rep.ergodicity_defects = std::move(ergodicity_defects);
  rep.pairings = std::move(pairings);
  const std::size_t n = rep.pairings.size();
  if (n == 0) {
    rep.cause = "no schedules";
    return rep;
  }
  for (std::size_t i = tail_start(n); i < n; ++i) rep.schedule_indices.push_back(i);
  const std::size_t t = rep.schedule_indices.size();
  rep.pairwise_defects.assign(t, std::vector<double>(t, 0.0));
  for (std::size_t a = 0; a < t; ++a) {
    for (std::size_t b = a + 1; b < t; ++b) {
      const auto& pa = rep.pairings[rep.schedule_indices[a]];
      const auto& pb = rep.pairings[rep.schedule_indices[b]];
      double d = 0.0;
      for (std::size_t k = 0; k < pa.size(); ++k) d = std::max(d, std::abs(pa[k] - pb[k]));
      rep.pairwise_defects[a][b] = rep.pairwise_defects[b][a] = d;
      rep.max_tail_defect = std::max(rep.max_tail_defect, d);
    }
  }
  for (auto i : rep.schedule_indices) {
    if (rep.ergodicity_defects[i] > opts.defect_threshold) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "schedule %s has ergodicity defect %.3g above threshold %.3g",
                    rep.schedules[i].c_str(), rep.ergodicity_defects[i], opts.defect_threshold);
      rep.cause = buf;
      rep.verdict = Verdict::inconclusive;
      return rep;
    }
  }
  if (t < 2) {
    rep.cause = "need at least two schedules to compare";
  } else if (rep.max_tail_defect <= opts.tol) {
    rep.verdict = Verdict::converged;
  } else if (rep.max_tail_defect >= 10.0 * opts.tol) {
    rep.verdict = Verdict::not_converged;
    rep.cause = "tail schedules disagree by at least ten times the tolerance";
  } else {
    rep.cause = "tail defect lies between the tolerance and ten times the tolerance";
  }
  return rep;
}

ConvergenceReport convergence_diagnostic(const TransferMatrix& mat, std::span<const ErgodicSchedule> schedules,
                                         const MeasureVector& mu0, std::span<const CellFunction> bank,
                                         const ConvergenceOptions& opts) {
  check_size(mat, mu0.size(), "initial measure");
  if (bank.empty()) throw InputError("convergence diagnostic needs a nonempty test bank");
  std::vector<std::vector<double>> pairings;
  std::vector<double> defects;
  std::vector<std::string> names;
  std::optional<MeasureVector> last;
  const MeasureVector probes[] = {mu0};
  for (const auto& sch : schedules) {
    MeasureVector mu = apply_schedule(mat, sch, mu0);
    std::vector<double> p;
    for (const auto& x : bank) p.push_back(pairing(x, mu.weights()));
    pairings.push_back(std::move(p));
    defects.push_back(ergodicity_defect(mat, sch, bank, probes));
    names.push_back(sch.describe());
    last = std::move(mu);
  }
  auto rep = convergence_from_pairings(std::move(pairings), std::move(defects), std::move(names), opts);
  if (rep.verdict == Verdict::converged) rep.limit = std::move(last);
  return rep;
}

ConvergenceReport orbit_convergence_diagnostic(const SystemSpec& spec, const RationalPoint& omega,
                                               std::span<const ErgodicSchedule> schedules, std::size_t bank_size,
                                               const ConvergenceOptions& opts) {
  if (bank_size == 0) throw InputError("convergence diagnostic needs a nonempty test bank");
  std::uint64_t horizon = 0;
  for (const auto& s : schedules) horizon = std::max(horizon, s.max_power() + 1);
  const TrigBank bank(spec.dim());
  // values[j*bank_size + b] = x_b(φ^j ω)
  std::vector<double> values((horizon + 1) * bank_size);
  RationalPoint p = omega;
  for (std::uint64_t j = 0; j <= horizon; ++j) {
    const Point q = p.to_point();
    for (std::size_t b = 0; b < bank_size; ++b) values[j * bank_size + b] = bank.evaluate(b, q);
    if (j < horizon) p = evaluate_map_exact(spec, p);
  }
  std::vector<std::vector<double>> pairings;
  std::vector<double> defects;
  std::vector<std::string> names;
  for (const auto& s : schedules) {
    std::vector<double> pr(bank_size, 0.0), shift(bank_size, 0.0);
    for (const auto& t : s.terms()) {
      for (std::size_t b = 0; b < bank_size; ++b) {
        const double v0 = values[t.power * bank_size + b];
        const double v1 = values[(t.power + 1) * bank_size + b];
        pr[b] += t.weight * v0;
        shift[b] += t.weight * (v0 - v1);
      }
    }
    pairings.push_back(std::move(pr));
    defects.push_back(max_abs(shift));
    names.push_back(s.describe());
  }
  return convergence_from_pairings(std::move(pairings), std::move(defects), std::move(names), opts);
}

KernelEstimate kernel_projection_estimate(const TransferMatrix& mat, std::uint64_t n) {
  if (n < 1) throw InputError("kernel estimate needs n >= 1");
  const std::size_t m = mat.n_cells();
  if (m > kDenseCellLimit) {
    throw ResourceError("kernel projection is dense; " + std::to_string(m) + " cells exceed the limit of " +
                        std::to_string(kDenseCellLimit));
  }
  Dense v(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto cols = mat.row_cols(i);
    const auto vals = mat.row_values(i);
    for (std::size_t t = 0; t < cols.size(); ++t) v[i * m + cols[t]] = vals[t];
  }
  Dense c(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) c[i * m + i] = 1.0;

  // C_{2L} = C_L (I + V̂^L)/2
  KernelEstimate est;
  est.n_cells = m;
  Dense p = v;
  std::uint64_t len = 1;
  while (len < n) {
    const Dense cp = matmul(c, p, m);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = 0.5 * (c[k] + cp[k]);
    len *= 2;
    if (len < n) p = matmul(p, p, m);
  }
  renormalize_rows(c, m);
  est.cesaro_length = len;

  Dense w(m * m);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = 0.5 * v[k];
  for (std::size_t i = 0; i < m; ++i) w[i * m + i] += 0.5;
  // W^(2^j) converges to the kernel projection itself; once squaring stops
  // changing it, further refinement cannot lower the residual.
  double res = residual_vq(mat, c, m);
  bool settled = false;
  for (int j = 0; j < 64 && res > 1e-13 && !settled; ++j) {
    c = matmul(c, w, m);
    renormalize_rows(c, m);
    ++est.refinements;
    res = residual_vq(mat, c, m);
    Dense w2 = matmul(w, w, m);
    double change = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) change = std::max(change, std::abs(w2[k] - w[k]));
    settled = change <= 1e-15;
    w = std::move(w2);
  }
  est.q = std::move(c);
  est.residual_vq = res;
  est.residual_idem = residual_idem(est.q, m);
  est.stabilized = res <= 1e-13 || settled;
  return est;
}

LimitMeasure limit_measure_per_point(const TransferMatrix& mat, const Partition& part, const SystemSpec& spec,
                                     const Point& omega, std::uint64_t n, double support_threshold) {
  if (n < 1) throw InputError("limit measure needs n >= 1");
  if (omega.dim() != spec.dim()) throw InputError("point dimension does not match " + spec.describe());
  check_size(mat, part.n_cells(), "partition");
  const std::size_t cell = part.cell_of(omega);
  auto mu = apply_schedule_raw(mat, cesaro_schedule(n), MeasureVector::one_hot(mat.n_cells(), cell).weights());

  std::vector<double> next(mu.size());
  const std::uint64_t max_iter = std::max<std::uint64_t>(100000, (std::uint64_t{1} << 28) / (mat.nnz() + 1));
  double res = l1_residual(mat, mu, next);
  for (std::uint64_t it = 0; it < max_iter && res > 1e-13; ++it) {
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = 0.5 * (mu[i] + next[i]);
    res = l1_residual(mat, mu, next);
  }
  double total = 0.0;
  for (double x : mu) total += x;
  for (double& x : mu) x /= total;

  LimitMeasure out;
  out.residual = l1_residual(mat, mu, next);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (mu[i] > support_threshold) out.support.push_back(i);
  }
  out.measure = MeasureVector(std::move(mu));

  const auto rep = minimal_invariant_sets(TransitionGraph::from_matrix(mat));
  std::vector<std::uint8_t> terminal(rep.sccs.size(), 0);
  for (const auto& t : rep.terminal_sccs) terminal[rep.component_of[t.front()]] = 1;
  const auto comp = rep.component_of[out.support.front()];
  out.ergodic = terminal[comp] != 0;
  for (auto i : out.support) out.ergodic = out.ergodic && rep.component_of[i] == comp;
  return out;
}

LimitMeasure limit_measure_exact(const Partition& part, const SystemSpec& spec, const RationalPoint& omega,
                                 std::uint64_t max_steps) {
  std::map<RationalPoint, std::uint64_t> seen;
  std::vector<RationalPoint> path;
  RationalPoint p = omega;
  std::uint64_t cycle_start = 0;
  for (std::uint64_t j = 0;; ++j) {
    if (j > max_steps) {
      throw ResourceError("exact orbit of " + omega.to_string() + " did not close within " +
                          std::to_string(max_steps) + " steps");
    }
    auto [it, inserted] = seen.emplace(p, j);
    if (!inserted) {
      cycle_start = it->second;
      break;
    }
    path.push_back(p);
    p = evaluate_map_exact(spec, p);
  }
  std::vector<double> w(part.n_cells(), 0.0);
  const double unit = 1.0 / static_cast<double>(path.size() - cycle_start);
  for (std::size_t j = cycle_start; j < path.size(); ++j) w[part.cell_of(path[j].to_point())] += unit;
  LimitMeasure out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] > 0.0) out.support.push_back(i);
  }
  out.measure = MeasureVector(std::move(w));
  out.ergodic = true;
  out.backend = "exact";
  return out;
}

}  // namespace ergodyn
