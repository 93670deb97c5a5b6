#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"
#include "ergodyn/tame.hpp"
#include "ergodyn/topology.hpp"

using namespace ergodyn;

namespace {

TransitionGraph graph_of(const SystemSpec& spec, std::size_t m, std::size_t s = 64) {
  return build_transition_graph(build_partition(spec, m, s), spec);
}

std::vector<std::string> orbit_strings(const PeriodicOrbit& o) {
  std::vector<std::string> out;
  for (const auto& p : o.points) out.push_back(p.to_string());
  return out;
}

}  // namespace

TEST(TransitionGraph, EdgesMatchUlamSupport) {
  for (const auto& spec : bundled_systems()) {
    const auto part = build_partition(spec, spec.dim() == 1 ? 64 : 8, 16);
    const auto mat = build_transfer_matrix(part, spec);
    const auto g = build_transition_graph(part, spec);
    ASSERT_EQ(g.n_cells(), mat.n_cells());
    EXPECT_EQ(g.n_edges(), mat.nnz());
    for (std::size_t i = 0; i < g.n_cells(); ++i) {
      EXPECT_GE(g.successors(i).size(), 1u);
      for (std::size_t j = 0; j < g.n_cells(); ++j) EXPECT_EQ(g.has_edge(i, j), mat.at(i, j) > 0.0);
    }
  }
}

TEST(TransitionGraph, FromEdgesRejectsSinks) {
  EXPECT_THROW(TransitionGraph::from_edges(3, {{0, 1}, {1, 0}}), InputError);
}

TEST(TransitionGraph, QuarterRotationIsOneFourCycle) {
  const auto g = graph_of(SystemSpec::circle_rotation(0.25), 4);
  for (std::size_t i = 0; i < 4; ++i) {
    ASSERT_EQ(g.successors(i).size(), 1u);
    EXPECT_EQ(g.successors(i)[0], (i + 1) % 4);
    EXPECT_EQ(reachable_closure(g, i), (CellSet{0, 1, 2, 3}));
  }
  const auto rep = minimal_invariant_sets(g);
  ASSERT_EQ(rep.terminal_sccs.size(), 1u);
  EXPECT_EQ(rep.terminal_sccs[0], (CellSet{0, 1, 2, 3}));
}

TEST(TransitionGraph, DoublingIsStronglyConnected) {
  const auto g = graph_of(SystemSpec::doubling(), 4);
  EXPECT_TRUE(minimal_invariant_sets(g).strongly_connected());
  EXPECT_EQ(reachable_closure(g, 2).size(), 4u);
}

TEST(TransitionGraph, NorthSouthFlowsToSouth) {
  const auto spec = SystemSpec::north_south(0.5);
  const auto part = build_partition(spec, 64, 64);
  const auto g = build_transition_graph(part, spec);
  const std::uint32_t s_cell = static_cast<std::uint32_t>(part.cell_of(Point(0.5)));
  EXPECT_TRUE(g.has_edge(0, 0));
  EXPECT_GE(g.successors(0).size(), 2u);
  const auto rep = minimal_invariant_sets(g);
  ASSERT_EQ(rep.terminal_sccs.size(), 1u);
  EXPECT_EQ(rep.terminal_sccs[0], (CellSet{s_cell}));
  for (std::size_t c = 0; c < 64; ++c) {
    const auto closure = reachable_closure(g, c);
    EXPECT_TRUE(std::binary_search(closure.begin(), closure.end(), s_cell));
  }
  // From a cell between N and S the closure runs up to S (the fold near S
  // overshoots by a cell) and never reaches the far side of N.
  const auto from_10 = reachable_closure(g, 10);
  EXPECT_EQ(from_10.front(), 10u);
  EXPECT_TRUE(std::binary_search(from_10.begin(), from_10.end(), s_cell));
  EXPECT_LE(from_10.back(), s_cell + 1);
}

TEST(MinimalSets, TwoDisjointCyclesGiveTwoTerminalComponents) {
  const auto g = TransitionGraph::from_edges(5, {{0, 1}, {1, 0}, {2, 3}, {3, 2}, {4, 0}, {4, 2}});
  const auto rep = minimal_invariant_sets(g);
  ASSERT_EQ(rep.terminal_sccs.size(), 2u);
  std::set<CellSet> got(rep.terminal_sccs.begin(), rep.terminal_sccs.end());
  EXPECT_TRUE(got.count(CellSet{0, 1}));
  EXPECT_TRUE(got.count(CellSet{2, 3}));
  EXPECT_EQ(rep.witnesses[4].size(), 2u);
  EXPECT_EQ(rep.witnesses[0].size(), 1u);
  EXPECT_EQ(rep.sccs.size(), 3u);
}

TEST(MinimalSets, TerminalComponentsAreClosedAndDisjoint) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const std::size_t n = 30;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
    for (std::uint32_t i = 0; i < n; ++i) {
      edges.emplace_back(i, pick(rng));
      if (rng() % 3 == 0) edges.emplace_back(i, pick(rng));
    }
    const auto g = TransitionGraph::from_edges(n, edges);
    const auto rep = minimal_invariant_sets(g);
    std::vector<int> owner(n, -1);
    for (std::size_t k = 0; k < rep.terminal_sccs.size(); ++k) {
      for (auto c : rep.terminal_sccs[k]) {
        EXPECT_EQ(owner[c], -1);
        owner[c] = static_cast<int>(k);
      }
    }
    for (std::size_t k = 0; k < rep.terminal_sccs.size(); ++k) {
      for (auto c : rep.terminal_sccs[k]) {
        for (auto d : g.successors(c)) EXPECT_EQ(owner[d], static_cast<int>(k));
        EXPECT_EQ(reachable_closure(g, c), rep.terminal_sccs[k]);
      }
    }
    // Every closure holds at least one terminal component, and the witnesses list exactly those.
    for (std::size_t c = 0; c < n; ++c) {
      const auto closure = reachable_closure(g, c);
      std::set<int> seen;
      for (auto d : closure) {
        if (owner[d] >= 0) seen.insert(owner[d]);
      }
      EXPECT_FALSE(seen.empty());
      EXPECT_EQ(seen.size(), rep.witnesses[c].size());
    }
  }
}

TEST(ConditionC, GoldenRotationHolds) {
  const auto spec = SystemSpec::circle_rotation(kGoldenConjugate);
  const auto rep = condition_C(spec, build_partition(spec, 64, 16), 4);
  EXPECT_TRUE(rep.graph_verdict);
  EXPECT_TRUE(rep.verdict);
  EXPECT_TRUE(rep.witnesses.empty());
}

TEST(ConditionC, NorthSouthHoldsAtEveryResolution) {
  const auto spec = SystemSpec::north_south(0.5);
  for (int k = 4; k <= 10; ++k) {
    const auto rep = condition_C(spec, build_partition(spec, std::size_t{1} << k, 64), 4);
    EXPECT_TRUE(rep.graph_verdict) << k;
    EXPECT_TRUE(rep.verdict) << k;
    EXPECT_FALSE(rep.discrepancy);
    ASSERT_EQ(rep.witnesses.size(), 2u);  // the fixed points N and S
  }
}

TEST(ConditionC, DoublingFailsWithExactWitnesses) {
  const auto spec = SystemSpec::doubling();
  const auto rep = condition_C(spec, build_partition(spec, 64, 16), 2);
  ASSERT_TRUE(rep.exact_verdict.has_value());
  EXPECT_FALSE(*rep.exact_verdict);
  EXPECT_FALSE(rep.verdict);
  EXPECT_TRUE(rep.graph_verdict);
  EXPECT_TRUE(rep.discrepancy);
  ASSERT_EQ(rep.witnesses.size(), 2u);
  EXPECT_EQ(orbit_strings(rep.witnesses[0]), (std::vector<std::string>{"0"}));
  EXPECT_EQ(orbit_strings(rep.witnesses[1]), (std::vector<std::string>{"1/3", "2/3"}));
}

TEST(ConditionC, CatMapFailsExactly) {
  const auto spec = SystemSpec::toral(2, 1, 1, 1);
  const auto rep = condition_C(spec, build_partition(spec, 8, 16), 2);
  ASSERT_TRUE(rep.exact_verdict.has_value());
  EXPECT_FALSE(rep.verdict);
}

TEST(Proximality, IrrationalRotationHasOnlySelfPairs) {
  const auto spec = SystemSpec::circle_rotation(kGoldenConjugate);
  const std::vector<Point> pts{Point(0.1), Point(0.35), Point(0.6)};
  for (std::size_t n : {0u, 10u, 1000u}) {
    const auto pg = proximality_graph(spec, pts, n, 0.2);
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) EXPECT_EQ(pg.edge(a, b), a == b);
    }
    EXPECT_EQ(pg.n_edges(), 3u);
  }
}

TEST(Proximality, DoublingHalfShiftCollides) {
  const auto spec = SystemSpec::doubling();
  const std::vector<Point> pts{Point(0.15625), Point(0.65625)};
  const auto pg = proximality_graph(spec, pts, 1, 1e-12);
  EXPECT_TRUE(pg.edge(0, 1));
  EXPECT_EQ(pg.min_distance[1], 0.0);
}

TEST(Proximality, NorthSouthSameSidePointsBecomeProximal) {
  const auto spec = SystemSpec::north_south(0.5);
  const std::vector<Point> pts{Point(0.1), Point(0.3), Point(0.7), Point(0.9)};
  const auto pg = proximality_graph(spec, pts, 500, 1e-6);
  EXPECT_TRUE(pg.edge(0, 1));
  EXPECT_TRUE(pg.edge(2, 3));
  const auto tr = transitivity_defect(pg);
  EXPECT_EQ(tr.defect, 0.0);
}

TEST(Proximality, ReflexiveSymmetricAndMonotoneInHorizon) {
  for (const auto& spec : bundled_systems()) {
    const auto pts = dense_points(spec.dim(), 40);
    const auto short_h = proximality_graph(spec, pts, 20, 1e-2);
    const auto long_h = proximality_graph(spec, pts, 200, 1e-2);
    for (std::size_t a = 0; a < pts.size(); ++a) {
      EXPECT_TRUE(short_h.edge(a, a));
      for (std::size_t b = 0; b < pts.size(); ++b) {
        EXPECT_EQ(short_h.edge(a, b), short_h.edge(b, a));
        if (short_h.edge(a, b)) {
          EXPECT_TRUE(long_h.edge(a, b));
        }
      }
    }
  }
}

TEST(Proximality, SimdAndScalarOrbitsAgree) {
  const auto spec = SystemSpec::toral(2, 1, 1, 1);
  const auto pts = dense_points(2, 30);
  const auto saved = simd::active_backend();
  std::vector<std::vector<double>> dists;
  for (auto b : simd::available_backends()) {
    simd::set_backend(b);
    dists.push_back(proximality_graph(spec, pts, 50, 1e-3).min_distance);
  }
  simd::set_backend(saved);
  for (const auto& d : dists) EXPECT_EQ(d, dists.front());
}

TEST(Proximality, PairBudget) {
  const auto pts = dense_points(1, 100);
  EXPECT_THROW(proximality_graph(SystemSpec::doubling(), pts, 1000, 1e-3, 1000), ResourceError);
}

TEST(Transitivity, SyntheticGraphs) {
  std::vector<std::pair<std::size_t, std::size_t>> complete;
  for (std::size_t a = 0; a < 6; ++a) {
    for (std::size_t b = a + 1; b < 6; ++b) complete.emplace_back(a, b);
  }
  EXPECT_EQ(transitivity_defect(proximality_from_pairs(6, complete)).defect, 0.0);
  const auto diag = transitivity_defect(proximality_from_pairs(6, {}));
  EXPECT_EQ(diag.defect, 0.0);
  EXPECT_EQ(diag.two_step_paths, 0u);
  const auto path = transitivity_defect(proximality_from_pairs(3, {{0, 1}, {1, 2}}));
  EXPECT_EQ(path.defect, 1.0);
  ASSERT_FALSE(path.violating_triples.empty());
}

TEST(Transitivity, SampledMatchesExactOnLargeGraph) {
  // Two cliques joined by a bridge; the exact defect is counted directly.
  const std::size_t n = 260;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if ((a < 130) == (b < 130)) pairs.emplace_back(a, b);
    }
  }
  pairs.emplace_back(0, 130);
  const auto pg = proximality_from_pairs(n, pairs);
  std::uint64_t paths = 0, bad = 0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (a == b || b == c || a == c || !pg.edge(a, b) || !pg.edge(b, c)) continue;
        ++paths;
        bad += !pg.edge(a, c);
      }
    }
  }
  const double exact = static_cast<double>(bad) / static_cast<double>(paths);
  const auto tr = transitivity_defect(pg, 42);
  EXPECT_TRUE(tr.sampled);
  EXPECT_NEAR(tr.defect, exact, 0.01);
  EXPECT_EQ(transitivity_defect(pg, 42).defect, tr.defect);
}
