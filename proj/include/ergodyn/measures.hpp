#pragma once

// Invariant measures of the discretized system: per-class stationary vectors,
// Birkhoff empirical measures, supports and their relation to minimal sets.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ergodyn/rational.hpp"
#include "ergodyn/systems.hpp"
#include "ergodyn/topology.hpp"
#include "ergodyn/ulam.hpp"

namespace ergodyn {

inline constexpr double kDefaultSupportThreshold = 1e-12;

struct StationaryOptions {
  double tolerance = 1e-10;  // ℓ1 residual ‖μV̂ − μ‖₁
  std::uint64_t max_iterations = 1000000;
};

struct ClassMeasure {
  CellSet cells;  // the terminal class
  MeasureVector measure;
  double residual = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

struct ErgodicMeasureSet {
  std::vector<ClassMeasure> classes;
  std::size_t n_failed() const;
};

// One stationary measure per terminal class, by damped power iteration
// (average of consecutive iterates, so periodic classes converge) started
// from the uniform measure on the class.
ErgodicMeasureSet stationary_measures(const TransferMatrix& mat, const MinimalSetReport& report,
                                      const StationaryOptions& opts = {});
ErgodicMeasureSet stationary_measures(const TransferMatrix& mat, const TransitionGraph& g,
                                      const StationaryOptions& opts = {});

// Empirical measure of the cells visited by ω, φω, ..., φ^{n-1}ω.
MeasureVector birkhoff_measure(const SystemSpec& spec, const Point& p, std::uint64_t n, const Partition& part);
MeasureVector birkhoff_measure(const SystemSpec& spec, const RationalPoint& p, std::uint64_t n,
                               const Partition& part);

CellSet support(std::span<const double> mu, double threshold = kDefaultSupportThreshold);
CellSet support(const MeasureVector& mu, double threshold = kDefaultSupportThreshold);

// Per class measure: its support equals one terminal component.
std::vector<bool> support_minimality_check(const ErgodicMeasureSet& ms, const MinimalSetReport& report,
                                           double threshold = kDefaultSupportThreshold);

struct AttractionComparison {
  CellSet z;  // union of supports of the ergodic measures
  CellSet m;  // union of terminal components
  CellSet symmetric_difference;
  bool equal = false;
};

AttractionComparison attraction_center_vs_minimal_union(const ErgodicMeasureSet& ms, const MinimalSetReport& report,
                                                        double threshold = kDefaultSupportThreshold);

}  // namespace ergodyn
