#include "ergodyn/topology.hpp"

#include <algorithm>
#include <deque>
#include <random>

#include "ergodyn/error.hpp"
#include "ergodyn/simd.hpp"

namespace ergodyn {
namespace {

CellSet merge_sets(const CellSet& a, const CellSet& b) {
  CellSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// Iterative Tarjan. Components come out sinks first.
std::vector<CellSet> tarjan(const TransitionGraph& g) {
  const std::size_t n = g.n_cells();
  constexpr std::uint32_t kUnvisited = UINT32_MAX;
  std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0);
  std::vector<std::uint8_t> on_stack(n, 0);
  std::vector<std::uint32_t> stack;
  std::vector<std::pair<std::uint32_t, std::size_t>> call;  // node, next successor slot
  std::vector<CellSet> out;
  std::uint32_t counter = 0;

  for (std::uint32_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, slot] = call.back();
      const auto succ = g.successors(v);
      if (slot < succ.size()) {
        const std::uint32_t w = succ[slot++];
        if (index[w] == kUnvisited) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      const std::uint32_t done = v;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        CellSet comp;
        std::uint32_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != done);
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

}  // namespace

TransitionGraph TransitionGraph::from_matrix(const TransferMatrix& mat) {
  TransitionGraph g;
  g.ptr_.assign(1, 0);
  for (std::size_t i = 0; i < mat.n_cells(); ++i) {
    const auto cols = mat.row_cols(i);
    g.succ_.insert(g.succ_.end(), cols.begin(), cols.end());
    g.ptr_.push_back(g.succ_.size());
  }
  return g;
}

TransitionGraph TransitionGraph::from_edges(std::size_t n,
                                            std::vector<std::pair<std::uint32_t, std::uint32_t>> edges) {
  for (const auto& [a, b] : edges) {
    if (a >= n || b >= n) throw InputError("graph edge index out of range");
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  TransitionGraph g;
  g.ptr_.assign(n + 1, 0);
  for (const auto& [a, b] : edges) {
    ++g.ptr_[a + 1];
    g.succ_.push_back(b);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (g.ptr_[i + 1] == 0) throw InputError("node " + std::to_string(i) + " has no outgoing edge");
    g.ptr_[i + 1] += g.ptr_[i];
  }
  return g;
}

bool TransitionGraph::has_edge(std::size_t i, std::size_t j) const {
  const auto s = successors(i);
  return std::binary_search(s.begin(), s.end(), static_cast<std::uint32_t>(j));
}

TransitionGraph build_transition_graph(const Partition& part, const SystemSpec& spec) {
  return TransitionGraph::from_matrix(build_transfer_matrix(part, spec));
}

CellSet reachable_closure(const TransitionGraph& g, std::size_t cell) {
  if (cell >= g.n_cells()) throw InputError("cell index out of range");
  std::vector<std::uint8_t> seen(g.n_cells(), 0);
  std::deque<std::uint32_t> queue{static_cast<std::uint32_t>(cell)};
  seen[cell] = 1;
  CellSet out;
  while (!queue.empty()) {
    const auto v = queue.front();
    queue.pop_front();
    out.push_back(v);
    for (auto w : g.successors(v)) {
      if (!seen[w]) {
        seen[w] = 1;
        queue.push_back(w);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

MinimalSetReport minimal_invariant_sets(const TransitionGraph& g) {
  MinimalSetReport rep;
  rep.sccs = tarjan(g);
  rep.component_of.assign(g.n_cells(), 0);
  for (std::uint32_t c = 0; c < rep.sccs.size(); ++c) {
    for (auto v : rep.sccs[c]) rep.component_of[v] = c;
  }
  // Sinks come first, so successors' terminal sets are final when visited.
  std::vector<std::vector<std::uint32_t>> reach(rep.sccs.size());
  for (std::uint32_t c = 0; c < rep.sccs.size(); ++c) {
    bool terminal = true;
    for (auto v : rep.sccs[c]) {
      for (auto w : g.successors(v)) {
        const auto d = rep.component_of[w];
        if (d != c) {
          terminal = false;
          reach[c] = merge_sets(reach[c], reach[d]);
        }
      }
    }
    if (terminal) {
      reach[c] = {static_cast<std::uint32_t>(rep.terminal_sccs.size())};
      rep.terminal_sccs.push_back(rep.sccs[c]);
    }
  }
  rep.witnesses.resize(g.n_cells());
  for (std::size_t v = 0; v < g.n_cells(); ++v) rep.witnesses[v] = reach[rep.component_of[v]];
  rep.note =
      "terminal components approximate minimal sets; repelling minimal sets can be absorbed into transient "
      "components at finite resolution";
  return rep;
}

ConditionCReport condition_C(const SystemSpec& spec, const Partition& part, std::size_t max_period) {
  const TransitionGraph g = build_transition_graph(part, spec);
  const MinimalSetReport rep = minimal_invariant_sets(g);
  ConditionCReport out;
  out.resolution = part.cells_per_axis();
  out.max_period = max_period;
  for (std::uint32_t v = 0; v < g.n_cells(); ++v) {
    if (rep.witnesses[v].size() != 1) out.graph_violations.push_back(v);
  }
  out.graph_verdict = out.graph_violations.empty();

  const bool expanding_algebraic = spec.as<DoublingMap>() || spec.as<ToralAutomorphism>();
  const auto* rotation = spec.as<CircleRotation>();
  if (expanding_algebraic) {
    auto orbits = periodic_orbits(spec, max_period);
    if (rep.strongly_connected() && orbits.size() >= 2) {
      out.exact_verdict = false;
      orbits.resize(2);
      out.witnesses = std::move(orbits);
      out.exact_note =
          "transition graph is strongly connected at the finest resolution, so a dense orbit's closure holds "
          "two distinct periodic orbits";
    } else {
      out.exact_note = "exact backend inconclusive: needs strong connectivity and two periodic orbits";
    }
  } else if (rotation && rotation->exact) {
    out.exact_verdict = true;
    out.witnesses = periodic_orbits(spec, static_cast<std::size_t>(rotation->exact->den));
    out.exact_note = "rational rotation: every orbit is periodic and its closure is itself a minimal set";
  } else if (spec.as<NorthSouth>()) {
    for (const auto& fp : known_fixed_points(spec)) out.witnesses.push_back(PeriodicOrbit{1, {fp}, false});
    out.exact_note = "fixed points N and S are their own orbit closures; other cells follow the graph backend";
  } else {
    out.exact_note = "no exact backend for " + spec.describe();
  }
  out.verdict = out.exact_verdict.value_or(out.graph_verdict);
  out.discrepancy = out.exact_verdict.has_value() && *out.exact_verdict != out.graph_verdict;
  return out;
}

std::size_t ProximalityGraph::n_edges() const {
  std::size_t count = 0;
  for (std::size_t a = 0; a < size(); ++a) {
    for (std::size_t b = a; b < size(); ++b) count += edge(a, b) ? 1 : 0;
  }
  return count;
}

ProximalityGraph proximality_graph(const SystemSpec& spec, std::span<const Point> points, std::size_t horizon,
                                   double eps, std::uint64_t pair_budget) {
  if (!(eps > 0.0)) throw InputError("proximality eps must be positive");
  const std::size_t n = points.size();
  const long double work = 0.5L * n * (n - 1) * static_cast<long double>(horizon + 1);
  if (work > static_cast<long double>(pair_budget)) {
    throw ResourceError("proximality needs " + std::to_string(static_cast<double>(work)) +
                        " metric evaluations; subsample the points or shorten the horizon");
  }
  const std::size_t dim = spec.dim();
  const std::size_t len = horizon + 1;
  // Structure of arrays: coordinate c of point i at step k is coords[(i*dim + c)*len + k].
  std::vector<double> coords(n * dim * len);
  for (std::size_t i = 0; i < n; ++i) {
    Point p = points[i];
    for (std::size_t k = 0; k < len; ++k) {
      for (std::size_t c = 0; c < dim; ++c) coords[(i * dim + c) * len + k] = p[c];
      if (k + 1 < len) p = evaluate_map(spec, p);
    }
  }
  ProximalityGraph pg;
  pg.points.assign(points.begin(), points.end());
  pg.horizon = horizon;
  pg.eps = eps;
  pg.adjacency.assign(n * n, 0);
  pg.min_distance.assign(n * n, 0.0);
  const auto& k = simd::active();
  for (std::size_t a = 0; a < n; ++a) {
    pg.adjacency[a * n + a] = 1;
    for (std::size_t b = a + 1; b < n; ++b) {
      const double* pa = &coords[a * dim * len];
      const double* pb = &coords[b * dim * len];
      const double d = dim == 1 ? k.min_wrap_distance_1d(pa, pb, len)
                                : k.min_wrap_distance_2d(pa, pa + len, pb, pb + len, len);
      pg.min_distance[a * n + b] = pg.min_distance[b * n + a] = d;
      const std::uint8_t e = d < eps ? 1 : 0;
      pg.adjacency[a * n + b] = pg.adjacency[b * n + a] = e;
    }
  }
  return pg;
}

ProximalityGraph proximality_from_pairs(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  ProximalityGraph pg;
  pg.points.assign(n, Point(0.0));
  pg.adjacency.assign(n * n, 0);
  pg.min_distance.assign(n * n, 1.0);
  for (std::size_t a = 0; a < n; ++a) {
    pg.adjacency[a * n + a] = 1;
    pg.min_distance[a * n + a] = 0.0;
  }
  for (const auto& [a, b] : pairs) {
    if (a >= n || b >= n) throw InputError("pair index out of range");
    pg.adjacency[a * n + b] = pg.adjacency[b * n + a] = 1;
    pg.min_distance[a * n + b] = pg.min_distance[b * n + a] = 0.0;
  }
  return pg;
}

TransitivityReport transitivity_defect(const ProximalityGraph& pg, std::uint64_t seed) {
  TransitivityReport rep;
  const std::size_t n = pg.size();
  auto record = [&rep](std::size_t a, std::size_t b, std::size_t c) {
    ++rep.violations;
    if (rep.violating_triples.size() < 16) rep.violating_triples.push_back({a, b, c});
  };
  if (n <= 200) {
    std::vector<std::size_t> nbrs;
    for (std::size_t b = 0; b < n; ++b) {
      nbrs.clear();
      for (std::size_t a = 0; a < n; ++a) {
        if (a != b && pg.edge(a, b)) nbrs.push_back(a);
      }
      for (auto a : nbrs) {
        for (auto c : nbrs) {
          if (a == c) continue;
          ++rep.two_step_paths;
          if (!pg.edge(a, c)) record(a, b, c);
        }
      }
    }
  } else {
    rep.sampled = true;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < 100000; ++t) {
      const std::size_t a = rng() % n, b = rng() % n, c = rng() % n;
      if (a == b || b == c || a == c) continue;
      if (!pg.edge(a, b) || !pg.edge(b, c)) continue;
      ++rep.two_step_paths;
      if (!pg.edge(a, c)) record(a, b, c);
    }
  }
  rep.defect = rep.two_step_paths == 0
                   ? 0.0
                   : static_cast<double>(rep.violations) / static_cast<double>(rep.two_step_paths);
  return rep;
}

}  // namespace ergodyn
