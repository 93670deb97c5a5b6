#pragma once

// Ergodic schedules (finite convex combinations of powers of V), their
// ergodicity defect, weak* Cauchy diagnostics and the kernel projection Q.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ergodyn/rational.hpp"
#include "ergodyn/systems.hpp"
#include "ergodyn/ulam.hpp"

namespace ergodyn {

struct ScheduleTerm {
  std::uint64_t power = 0;
  double weight = 0.0;
};

class ErgodicSchedule {
 public:
  // Throws InputError unless powers are strictly increasing, weights are
  // nonnegative and sum to 1 within 1e-12.
  explicit ErgodicSchedule(std::vector<ScheduleTerm> terms, std::string label = {});

  const std::vector<ScheduleTerm>& terms() const { return terms_; }
  std::uint64_t max_power() const { return terms_.back().power; }
  std::uint64_t min_power() const { return terms_.front().power; }
  std::string describe() const;

  // a·s1 ⊕ (1−a)·s2, merging equal powers.
  static ErgodicSchedule mix(double a, const ErgodicSchedule& s1, const ErgodicSchedule& s2);

 private:
  std::vector<ScheduleTerm> terms_;
  std::string label_;
};

ErgodicSchedule cesaro_schedule(std::uint64_t n);
ErgodicSchedule window_schedule(std::uint64_t b, std::uint64_t l);

// Σ a_k · v V̂^{n_k} for a signed row vector v.
std::vector<double> apply_schedule_raw(const TransferMatrix& mat, const ErgodicSchedule& sch,
                                       std::span<const double> v);
MeasureVector apply_schedule(const TransferMatrix& mat, const ErgodicSchedule& sch, const MeasureVector& mu);

// max over bank × probes of |(x, T(I−V̂)μ)|.
double ergodicity_defect(const TransferMatrix& mat, const ErgodicSchedule& sch, std::span<const CellFunction> bank,
                         std::span<const MeasureVector> probes);

double weakstar_distance(std::span<const double> mu1, std::span<const double> mu2,
                         std::span<const CellFunction> bank);
double weakstar_distance(const MeasureVector& mu1, const MeasureVector& mu2, std::span<const CellFunction> bank);

enum class Verdict { converged, not_converged, inconclusive };
const char* verdict_name(Verdict v);

struct ConvergenceOptions {
  double tol = 1e-2;
  // Tail schedules whose ergodicity defect exceeds this make the verdict
  // inconclusive.
  double defect_threshold = 0.05;
};

struct ConvergenceReport {
  std::vector<std::string> schedules;  // descriptions, in input order
  std::vector<std::size_t> schedule_indices;  // tail indices compared
  // pairwise_defects[i][j]: weak* distance between tail schedules i and j.
  std::vector<std::vector<double>> pairwise_defects;
  std::vector<double> ergodicity_defects;  // one per input schedule
  double max_tail_defect = 0.0;
  Verdict verdict = Verdict::inconclusive;
  std::string cause;
  std::optional<MeasureVector> limit;
  double tolerance = 0.0;
  double defect_threshold = 0.0;
  // Per schedule, the bank pairings (x_b, μ_i).
  std::vector<std::vector<double>> pairings;
};

// First index of the last quartile among n schedules (at least two compared
// when n >= 2).
std::size_t tail_start(std::size_t n);

ConvergenceReport convergence_diagnostic(const TransferMatrix& mat, std::span<const ErgodicSchedule> schedules,
                                         const MeasureVector& mu0, std::span<const CellFunction> bank,
                                         const ConvergenceOptions& opts = {});

// Same test along the exact orbit of a rational point: μ_i is Σ a_k δ_{φ^{n_k}ω},
// paired pointwise against bank members 0..bank_size-1.
ConvergenceReport orbit_convergence_diagnostic(const SystemSpec& spec, const RationalPoint& omega,
                                               std::span<const ErgodicSchedule> schedules, std::size_t bank_size,
                                               const ConvergenceOptions& opts = {});

// Shared verdict logic on precomputed pairings and defects.
ConvergenceReport convergence_from_pairings(std::vector<std::vector<double>> pairings,
                                            std::vector<double> ergodicity_defects,
                                            std::vector<std::string> descriptions, const ConvergenceOptions& opts);

inline constexpr std::size_t kDenseCellLimit = 1024;

struct KernelEstimate {
  std::size_t n_cells = 0;
  std::vector<double> q;  // row-major
  double residual_vq = 0.0;
  double residual_idem = 0.0;
  std::uint64_t cesaro_length = 0;
  std::size_t refinements = 0;
  bool stabilized = false;

  std::span<const double> row(std::size_t i) const { return {q.data() + i * n_cells, n_cells}; }
  double at(std::size_t i, std::size_t j) const { return q[i * n_cells + j]; }
};

// Cesàro mean of length >= n by doubling, then refined with powers of the lazy
// chain (I+V̂)/2, which shares the kernel projection and converges
// geometrically. Throws ResourceError above kDenseCellLimit cells.
KernelEstimate kernel_projection_estimate(const TransferMatrix& mat, std::uint64_t n);

struct LimitMeasure {
  MeasureVector measure;
  bool ergodic = false;
  std::vector<std::size_t> support;
  double residual = 0.0;  // ‖μV̂ − μ‖₁
  std::string backend = "matrix";
};

// Cesàro limit of δ_cell(ω): n Cesàro steps, then lazy iteration to a
// stationary vector. The flag holds when the support sits inside one terminal
// class of the transition graph.
LimitMeasure limit_measure_per_point(const TransferMatrix& mat, const Partition& part, const SystemSpec& spec,
                                     const Point& omega, std::uint64_t n, double support_threshold = 1e-12);

// Exact variant for rational points of systems with exact arithmetic: the
// orbit is eventually periodic and the limit is the empirical measure of the
// cycle. Throws ResourceError when no cycle appears within max_steps.
LimitMeasure limit_measure_exact(const Partition& part, const SystemSpec& spec, const RationalPoint& omega,
                                 std::uint64_t max_steps = 1u << 20);

}  // namespace ergodyn
