#pragma once

// Transition-graph structure: orbit closures, minimal sets, the unique-minimal-
// set condition and the proximality relation.

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ergodyn/rational.hpp"
#include "ergodyn/systems.hpp"
#include "ergodyn/ulam.hpp"

namespace ergodyn {

using CellSet = std::vector<std::uint32_t>;  // sorted, unique

// i → j iff some sample of cell i lands in cell j.
class TransitionGraph {
 public:
  static TransitionGraph from_matrix(const TransferMatrix& mat);
  // Synthetic graphs; throws InputError when a node has no successor.
  static TransitionGraph from_edges(std::size_t n, std::vector<std::pair<std::uint32_t, std::uint32_t>> edges);

  std::size_t n_cells() const { return ptr_.size() - 1; }
  std::size_t n_edges() const { return succ_.size(); }
  std::span<const std::uint32_t> successors(std::size_t i) const {
    return {succ_.data() + ptr_[i], ptr_[i + 1] - ptr_[i]};
  }
  bool has_edge(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::size_t> ptr_{0};
  std::vector<std::uint32_t> succ_;
};

TransitionGraph build_transition_graph(const Partition& part, const SystemSpec& spec);

// Forward-reachable cells including the start, ascending.
CellSet reachable_closure(const TransitionGraph& g, std::size_t cell);

struct MinimalSetReport {
  // Strongly connected components, sinks of the condensation first.
  std::vector<CellSet> sccs;
  std::vector<std::uint32_t> component_of;
  // Components without edges leaving them: finite-resolution minimal sets.
  std::vector<CellSet> terminal_sccs;
  // Per cell, indices into terminal_sccs reachable from it.
  std::vector<std::vector<std::uint32_t>> witnesses;
  std::string backend = "graph";
  std::string note;

  bool strongly_connected() const { return sccs.size() == 1; }
};

MinimalSetReport minimal_invariant_sets(const TransitionGraph& g);

struct ConditionCReport {
  std::size_t resolution = 0;
  std::size_t max_period = 0;
  bool graph_verdict = false;
  // Cells whose closure holds zero or several terminal components.
  CellSet graph_violations;
  std::optional<bool> exact_verdict;
  std::string exact_note;
  // Distinct periodic orbits (or fixed points) backing the exact verdict.
  std::vector<PeriodicOrbit> witnesses;
  bool verdict = false;
  bool discrepancy = false;
};

// Each orbit closure contains exactly one minimal set. Graph backend at the
// partition's resolution; exact backend for the algebraic families.
ConditionCReport condition_C(const SystemSpec& spec, const Partition& part, std::size_t max_period);

inline constexpr std::uint64_t kDefaultPairBudget = std::uint64_t{1} << 33;

struct ProximalityGraph {
  std::vector<Point> points;
  std::size_t horizon = 0;
  double eps = 0.0;
  // Row-major n×n adjacency, reflexive and symmetric.
  std::vector<std::uint8_t> adjacency;
  // min over 0..horizon of the metric, row-major n×n.
  std::vector<double> min_distance;

  std::size_t size() const { return points.size(); }
  bool edge(std::size_t a, std::size_t b) const { return adjacency[a * points.size() + b] != 0; }
  std::size_t n_edges() const;  // unordered pairs including self-pairs
};

// Pair (a,b) is an edge iff min_{0<=n<=N} ρ(φⁿa, φⁿb) < eps. Throws
// ResourceError when pairs·(N+1) exceeds pair_budget.
ProximalityGraph proximality_graph(const SystemSpec& spec, std::span<const Point> points, std::size_t horizon,
                                   double eps, std::uint64_t pair_budget = kDefaultPairBudget);
// Synthetic graph from an adjacency list of unordered pairs.
ProximalityGraph proximality_from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

struct TransitivityReport {
  double defect = 0.0;
  std::uint64_t two_step_paths = 0;
  std::uint64_t violations = 0;
  bool sampled = false;
  std::vector<std::array<std::size_t, 3>> violating_triples;  // first few
};

// Fraction of ordered triples (a,b,c) of distinct points with edges ab, bc but
// not ac. Above 200 points, 10^5 random triples are drawn from seed.
TransitivityReport transitivity_defect(const ProximalityGraph& pg, std::uint64_t seed = 0x5eed);

}  // namespace ergodyn
