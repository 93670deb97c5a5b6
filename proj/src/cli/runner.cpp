#include "ergodyn/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "ergodyn/cli/schema.hpp"
#include "ergodyn/ergodic.hpp"
#include "ergodyn/error.hpp"
#include "ergodyn/measures.hpp"
#include "ergodyn/tame.hpp"
#include "ergodyn/topology.hpp"
#include "ergodyn/ulam.hpp"

namespace ergodyn::cli {
namespace {

using nlohmann::json;

json context(std::uint64_t resolution, std::uint64_t horizon, double tolerance) {
  return {{"resolution", std::max<std::uint64_t>(resolution, 1)}, {"horizon", horizon}, {"tolerance", tolerance}};
}

json verdict(const std::string& name, json value, const json& ctx) {
  return {{"name", name}, {"value", std::move(value)}, {"context", ctx}};
}

json table(std::vector<std::string> columns, json rows) {
  return {{"columns", std::move(columns)}, {"rows", std::move(rows)}};
}

json point_json(const Point& p) {
  if (p.dim() == 1) return p[0];
  return json::array({p[0], p[1]});
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Shared objects built on first use, in dependency order.
class Workspace {
 public:
  explicit Workspace(const AnalysisConfig& cfg) : cfg_(cfg) {}

  const Partition& partition() {
    if (!part_) part_ = build_partition(cfg_.system, cfg_.m, cfg_.samples, cfg_.seed);
    return *part_;
  }
  const TransferMatrix& matrix() {
    if (!mat_) mat_ = build_transfer_matrix(partition(), cfg_.system);
    return *mat_;
  }
  const TransitionGraph& graph() {
    if (!graph_) graph_ = TransitionGraph::from_matrix(matrix());
    return *graph_;
  }
  const MinimalSetReport& minimal_sets() {
    if (!minimal_) minimal_ = minimal_invariant_sets(graph());
    return *minimal_;
  }
  const std::vector<CellFunction>& bank() {
    if (!bank_) bank_ = sample_test_bank(partition(), cfg_.bank_size);
    return *bank_;
  }

 private:
  const AnalysisConfig& cfg_;
  std::optional<Partition> part_;
  std::optional<TransferMatrix> mat_;
  std::optional<TransitionGraph> graph_;
  std::optional<MinimalSetReport> minimal_;
  std::optional<std::vector<CellFunction>> bank_;
};

json run_convergence(const AnalysisConfig& cfg, Workspace& ws, std::string& overall) {
  const auto& s = *cfg.convergence;
  std::vector<ErgodicSchedule> schedules;
  for (auto n : s.cesaro) schedules.push_back(cesaro_schedule(n));
  for (auto [b, l] : s.windows) schedules.push_back(window_schedule(b, l));
  std::uint64_t horizon = 0;
  for (const auto& sch : schedules) horizon = std::max(horizon, sch.max_power());

  const auto& mat = ws.matrix();
  const auto& part = ws.partition();
  ConvergenceOptions opts{s.tol, s.defect_threshold};
  std::vector<double> worst_defect(schedules.size(), 0.0);
  json probes = json::array();
  bool any_not = false;
  bool all_conv = true;
  double max_tail = 0.0;
  for (const auto& p : cfg.probes) {
    const std::size_t cell = part.cell_of(p);
    const auto rep = convergence_diagnostic(mat, schedules, MeasureVector::one_hot(part.n_cells(), cell), ws.bank(), opts);
    for (std::size_t i = 0; i < schedules.size(); ++i) {
      worst_defect[i] = std::max(worst_defect[i], rep.ergodicity_defects[i]);
    }
    any_not |= rep.verdict == Verdict::not_converged;
    all_conv &= rep.verdict == Verdict::converged;
    max_tail = std::max(max_tail, rep.max_tail_defect);
    probes.push_back({{"point", point_json(p)},
                      {"cell", cell},
                      {"verdict", verdict_name(rep.verdict)},
                      {"max_tail_defect", rep.max_tail_defect},
                      {"cause", rep.cause}});
  }
  const Verdict v = any_not ? Verdict::not_converged : (all_conv ? Verdict::converged : Verdict::inconclusive);
  overall = verdict_name(v);

  json rows = json::array();
  json sched = json::array();
  for (std::size_t i = 0; i < schedules.size(); ++i) {
    rows.push_back({schedules[i].terms().size(), worst_defect[i]});
    sched.push_back({{"schedule", schedules[i].describe()}, {"ergodicity_defect", worst_defect[i]}});
  }
  const json ctx = context(part.n_cells(), horizon, s.tol);
  return {{"verdicts", {verdict("convergence", overall, ctx), verdict("max_tail_defect", max_tail, ctx)}},
          {"probes", probes},
          {"schedules", sched},
          {"defect_threshold", s.defect_threshold},
          {"table", table({"n", "defect"}, rows)}};
}

json run_kernel(const AnalysisConfig& cfg, Workspace& ws) {
  const auto est = kernel_projection_estimate(ws.matrix(), cfg.kernel->n);
  const auto& part = ws.partition();
  json rows = json::array();
  for (std::size_t i = 0; i < est.n_cells; ++i) {
    for (std::size_t j = 0; j < est.n_cells; ++j) {
      if (std::abs(est.at(i, j)) > 1e-12) rows.push_back({i, j, est.at(i, j)});
    }
  }
  json probes = json::array();
  for (const auto& p : cfg.probes) {
    const auto cell = part.cell_of(p);
    const auto row = est.row(cell);
    const auto top = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    probes.push_back({{"point", point_json(p)}, {"cell", cell}, {"limit_cell", top}, {"limit_mass", row[top]}});
  }
  const json ctx = context(part.n_cells(), est.cesaro_length, 1e-8);
  return {{"verdicts",
           {verdict("residual_vq", est.residual_vq, ctx), verdict("residual_idempotent", est.residual_idem, ctx),
            verdict("stabilized", est.stabilized, ctx)}},
          {"cesaro_length", est.cesaro_length},
          {"refinements", est.refinements},
          {"probes", probes},
          {"table", table({"row", "col", "value"}, rows)}};
}

json run_minimal_sets(Workspace& ws) {
  const auto& rep = ws.minimal_sets();
  const auto& mat = ws.matrix();
  json rows = json::array();
  for (const auto& e : mat.entries()) rows.push_back({e.row, e.col, e.value});
  const json ctx = context(mat.n_cells(), 0, 0.0);
  return {{"verdicts",
           {verdict("minimal_sets", rep.terminal_sccs.size(), ctx),
            verdict("strongly_connected", rep.strongly_connected(), ctx)}},
          {"components", rep.sccs.size()},
          {"terminal_components", rep.terminal_sccs},
          {"backend", rep.backend},
          {"table", table({"source", "target", "weight"}, rows)}};
}

json run_condition_c(const AnalysisConfig& cfg, Workspace& ws, std::optional<bool>& verdict_out) {
  const auto rep = condition_C(cfg.system, ws.partition(), cfg.condition_c->max_period);
  verdict_out = rep.verdict;
  const json ctx = context(rep.resolution, rep.max_period, 0.0);
  json verdicts = {verdict("condition_C", rep.verdict, ctx), verdict("graph_verdict", rep.graph_verdict, ctx),
                   verdict("discrepancy", rep.discrepancy, ctx)};
  if (rep.exact_verdict) verdicts.push_back(verdict("exact_verdict", *rep.exact_verdict, ctx));
  json witnesses = json::array();
  json rows = json::array();
  for (std::size_t w = 0; w < rep.witnesses.size(); ++w) {
    json pts = json::array();
    for (const auto& p : rep.witnesses[w].points) {
      pts.push_back(p.to_string());
      rows.push_back({w, rep.witnesses[w].period, p.to_string()});
    }
    witnesses.push_back({{"period", rep.witnesses[w].period}, {"points", pts}});
  }
  return {{"verdicts", verdicts},
          {"graph_violations", rep.graph_violations},
          {"exact_note", rep.exact_note},
          {"witnesses", witnesses},
          {"table", table({"orbit", "period", "point"}, rows)}};
}

json run_proximality(const AnalysisConfig& cfg, bool& transitive) {
  const auto& s = *cfg.proximality;
  const auto pts = dense_points(cfg.system.dim(), s.points);
  const auto pg = proximality_graph(cfg.system, pts, s.horizon, s.eps);
  const auto tr = transitivity_defect(pg, s.triple_seed);
  transitive = tr.violations == 0;
  json rows = json::array();
  for (std::size_t a = 0; a < pg.size(); ++a) {
    for (std::size_t b = a + 1; b < pg.size(); ++b) rows.push_back({a, b, pg.min_distance[a * pg.size() + b]});
  }
  json triples = json::array();
  for (const auto& t : tr.violating_triples) triples.push_back(t);
  const json ctx = context(pg.size(), s.horizon, s.eps);
  return {{"verdicts",
           {verdict("transitive", transitive, ctx), verdict("transitivity_defect", tr.defect, ctx),
            verdict("proximal_pairs", pg.n_edges(), ctx)}},
          {"sampled", tr.sampled},
          {"two_step_paths", tr.two_step_paths},
          {"violations", tr.violations},
          {"violating_triples", triples},
          {"table", table({"a", "b", "min_distance"}, rows)}};
}

json run_measures(const AnalysisConfig& cfg, Workspace& ws, bool& supports_ok) {
  const auto& s = *cfg.measures;
  const auto& mat = ws.matrix();
  const auto& part = ws.partition();
  const auto& minimal = ws.minimal_sets();
  const auto ms = stationary_measures(mat, minimal);
  const auto checks = support_minimality_check(ms, minimal, s.support_threshold);
  const auto att = attraction_center_vs_minimal_union(ms, minimal, s.support_threshold);
  supports_ok = std::all_of(checks.begin(), checks.end(), [](bool b) { return b; });

  json classes = json::array();
  json rows = json::array();
  for (std::size_t c = 0; c < ms.classes.size(); ++c) {
    const auto& cm = ms.classes[c];
    classes.push_back({{"cells", cm.cells},
                       {"residual", cm.residual},
                       {"iterations", cm.iterations},
                       {"converged", cm.converged},
                       {"support_is_minimal", static_cast<bool>(checks[c])}});
    for (auto cell : support(cm.measure, s.support_threshold)) rows.push_back({c, cell, cm.measure[cell]});
  }
  json probes = json::array();
  bool all_ergodic = true;
  for (const auto& p : cfg.probes) {
    const auto lim = limit_measure_per_point(mat, part, cfg.system, p, s.limit_n, s.support_threshold);
    const auto emp = birkhoff_measure(cfg.system, p, s.birkhoff_n, part);
    double gap = 0.0;
    for (std::size_t i = 0; i < part.n_cells(); ++i) gap += std::abs(emp[i] - lim.measure[i]);
    all_ergodic &= lim.ergodic;
    probes.push_back({{"point", point_json(p)},
                      {"limit_ergodic", lim.ergodic},
                      {"limit_support", lim.support},
                      {"limit_residual", lim.residual},
                      {"birkhoff_l1_gap", gap}});
  }
  const json ctx = context(part.n_cells(), s.limit_n, s.support_threshold);
  return {{"verdicts",
           {verdict("support_minimality", supports_ok, ctx),
            verdict("attraction_center_equals_minimal_union", att.equal, ctx),
            verdict("limit_ergodic_all_probes", all_ergodic, ctx),
            verdict("stationary_failures", ms.n_failed(), ctx)}},
          {"classes", classes},
          {"attraction_center", att.z},
          {"minimal_union", att.m},
          {"probes", probes},
          {"birkhoff_n", s.birkhoff_n},
          {"table", table({"class", "cell", "weight"}, rows)}};
}

json run_tameness(const AnalysisConfig& cfg, double& last_defect) {
  const auto& s = *cfg.tameness;
  const auto rep = tameness_profile(cfg.system, s.function_id, s.k_max, s.grid, s.strategy, s.window);
  json rows = json::array();
  for (std::size_t i = 0; i < rep.ks.size(); ++i) rows.push_back({rep.ks[i], rep.defects[i]});
  last_defect = rep.defects.empty() ? 0.0 : rep.defects.back();
  const json ctx = context(rep.grid_size, s.k_max, 1e-10);
  return {{"verdicts", {verdict("defect_at_kmax", last_defect, ctx), verdict("suboptimal", rep.suboptimal, ctx)}},
          {"function", rep.function_id},
          {"strategy", strategy_name(rep.strategy)},
          {"subsequence", rep.subsequence},
          {"coefficients", rep.coefficients},
          {"table", table({"K", "defect"}, rows)}};
}

json run_covering(const AnalysisConfig& cfg, std::vector<std::pair<double, std::size_t>>& final_counts) {
  const auto& s = *cfg.covering;
  const auto prof = covering_profile(cfg.system, s.horizon, s.eps, s.bank, s.points);
  json verdicts = json::array();
  json rows = json::array();
  for (std::size_t e = 0; e < prof.eps.size(); ++e) {
    const json ctx = context(prof.bank_size * prof.points, prof.horizon, prof.eps[e]);
    verdicts.push_back(verdict("covering_number", prof.counts[e], ctx));
    const auto& by_n = prof.counts_by_horizon[e];
    if (prof.horizon >= 2) {
      const double ratio = static_cast<double>(by_n[prof.horizon]) / static_cast<double>(by_n[prof.horizon / 2]);
      verdicts.push_back(verdict("doubling_ratio", ratio, ctx));
    }
    for (std::size_t n = 0; n < by_n.size(); ++n) rows.push_back({n, prof.eps[e], by_n[n]});
    final_counts.emplace_back(prof.eps[e], prof.counts[e]);
  }
  return {{"verdicts", verdicts},
          {"truncation_bound", prof.truncation_bound},
          {"table", table({"N", "epsilon", "count"}, rows)}};
}

json run_equicontinuity(const AnalysisConfig& cfg, double& worst) {
  const auto& s = *cfg.equicontinuity;
  const auto rows_in = equicontinuity_probe(cfg.system, s.deltas, s.horizon);
  json verdicts = json::array();
  json rows = json::array();
  worst = 0.0;
  for (const auto& r : rows_in) {
    verdicts.push_back(verdict("expansion", r.expansion, context(r.pairs, s.horizon, r.delta)));
    rows.push_back({r.delta, r.expansion});
    worst = std::max(worst, r.expansion / r.delta);
  }
  return {{"verdicts", verdicts}, {"table", table({"delta", "expansion"}, rows)}};
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_cell(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  }
  if (v.is_number_float()) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
    return buf;
  }
  return v.dump();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ResourceError("cannot write " + path.string());
}

}  // namespace

const std::vector<std::string>& analysis_ids() {
  static const std::vector<std::string> ids{"convergence", "kernel",   "minimal_sets", "condition_c",   "proximality",
                                            "measures",    "tameness", "covering",     "equicontinuity"};
  return ids;
}

json run_analyses(const AnalysisConfig& cfg, bool with_timestamp) {
  Workspace ws(cfg);
  const auto& part = ws.partition();
  json analyses = json::object();
  json summary = json::array();

  std::string convergence;
  std::optional<bool> cond_c;
  std::optional<bool> transitive;
  if (cfg.convergence) analyses["convergence"] = run_convergence(cfg, ws, convergence);
  if (cfg.kernel) {
    analyses["kernel"] = run_kernel(cfg, ws);
    summary.push_back("Kernel projection: residual ||VQ-Q|| = " +
                      fmt("%.3g", analyses["kernel"]["verdicts"][0]["value"].get<double>()));
  }
  if (cfg.minimal_sets) {
    analyses["minimal_sets"] = run_minimal_sets(ws);
    summary.push_back("Minimal sets: " + std::to_string(ws.minimal_sets().terminal_sccs.size()) +
                      " terminal component(s) at " + std::to_string(part.n_cells()) + " cells");
  }
  if (cfg.condition_c) {
    analyses["condition_c"] = run_condition_c(cfg, ws, cond_c);
    std::string line = std::string("Unique minimal set criterion: condition(C)=") + (*cond_c ? "true" : "false");
    if (!convergence.empty()) {
      line += ", convergence=" + convergence;
      if (convergence == "inconclusive") {
        line += ": inconclusive";
      } else if (*cond_c) {
        line += convergence == "converged" ? ": consistent" : ": inconsistent";
      } else {
        line += convergence == "not_converged" ? ": consistent"
                                               : ": not contradicted (failure needs a specific orbit and schedule)";
      }
    }
    summary.push_back(line);
  }
  if (cfg.proximality) {
    bool t = false;
    analyses["proximality"] = run_proximality(cfg, t);
    transitive = t;
    std::string line = std::string("Proximal transitivity: transitive=") + (t ? "true" : "false");
    if (!convergence.empty()) {
      line += ", convergence=" + convergence;
      if (t) line += convergence == "not_converged" ? ": inconsistent" : ": consistent";
    }
    summary.push_back(line);
  }
  if (cfg.measures) {
    bool ok = false;
    analyses["measures"] = run_measures(cfg, ws, ok);
    summary.push_back(std::string("Ergodic measure supports: supports equal minimal sets=") + (ok ? "true" : "false") +
                      (ok ? ": consistent" : ": inconsistent"));
  }
  if (cfg.tameness) {
    double d = 0.0;
    analyses["tameness"] = run_tameness(cfg, d);
    summary.push_back("Tameness profile: defect(K=" + std::to_string(cfg.tameness->k_max) + ") = " + fmt("%.6g", d) +
                      " (" + strategy_name(cfg.tameness->strategy) + " subsequence)");
  }
  if (cfg.covering) {
    std::vector<std::pair<double, std::size_t>> counts;
    analyses["covering"] = run_covering(cfg, counts);
    std::string line = "Covering growth at N=" + std::to_string(cfg.covering->horizon) + ":";
    for (auto [e, c] : counts) line += " eps=" + fmt("%g", e) + " count=" + std::to_string(c) + ";";
    line.pop_back();
    summary.push_back(line);
  }
  if (cfg.equicontinuity) {
    double worst = 0.0;
    analyses["equicontinuity"] = run_equicontinuity(cfg, worst);
    summary.push_back("Equicontinuity probe: max expansion/delta = " + fmt("%.4g", worst) + " over " +
                      std::to_string(cfg.equicontinuity->horizon) + " steps");
  }
  if (!convergence.empty() && !cond_c && !transitive) summary.push_back("Ergodic nets: convergence=" + convergence);

  json report = {{"schema", kReportSchemaId},
                 {"generated_at", with_timestamp ? utc_now() : std::string()},
                 {"config", cfg.raw},
                 {"system", cfg.system.describe()},
                 {"partition",
                  {{"dim", part.dim()},
                   {"cells_per_axis", part.cells_per_axis()},
                   {"cells", part.n_cells()},
                   {"samples_per_cell", part.samples_per_cell()},
                   {"seed", part.seed()}}},
                 {"analyses", analyses},
                 {"summary", summary}};
  return report;
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

RunOutput run_and_write(const AnalysisConfig& cfg, const std::string& output_dir) {
  RunOutput out;
  out.report = run_analyses(cfg);
  const std::filesystem::path dir = output_dir.empty() ? cfg.output_dir : output_dir;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ResourceError("cannot create output directory " + dir.string() + ": " + ec.message());
  const auto path = dir / (cfg.prefix + ".json");
  write_file(path, dump_report(out.report));
  out.report_path = path.string();
  for (const auto& id : analysis_ids()) {
    if (out.report["analyses"].contains(id)) {
      out.csv_paths.push_back(write_plot_data(out.report, id, dir.string(), cfg.prefix));
    }
  }
  return out;
}

std::string plot_csv(const json& report, const std::string& analysis) {
  if (!report.contains("analyses") || !report["analyses"].contains(analysis)) {
    throw InputError("report has no analysis '" + analysis + "'");
  }
  const auto& a = report["analyses"][analysis];
  if (!a.contains("table")) throw InputError("analysis '" + analysis + "' carries no tabular data");
  const auto& t = a["table"];
  std::ostringstream os;
  const auto& cols = t["columns"];
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i].get<std::string>();
  os << '\n';
  for (const auto& row : t["rows"]) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string write_plot_data(const json& report, const std::string& analysis, const std::string& directory,
                            const std::string& prefix) {
  const auto text = plot_csv(report, analysis);
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw ResourceError("cannot create output directory " + directory + ": " + ec.message());
  const auto path = std::filesystem::path(directory) / (prefix + "_" + analysis + ".csv");
  write_file(path, text);
  return path.string();
}

json systems_catalog() {
  return json::array({
      {{"family", "CircleRotation"},
       {"dim", 1},
       {"parameters",
        {{"alpha", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}}},
         {"alpha_exact", {{"type", "string"}, {"pattern", "^[0-9]+/[0-9]+$"}}}}},
       {"required", json::array()},
       {"note", "one of alpha or alpha_exact; alpha_exact enables exact periodic orbits"}},
      {{"family", "DoublingMap"}, {"dim", 1}, {"parameters", json::object()}, {"required", json::array()}},
      {{"family", "NorthSouth"},
       {"dim", 1},
       {"parameters", {{"kappa", {{"type", "number"}, {"exclusiveMinimum", 0}, {"exclusiveMaximum", 1}, {"default", 0.5}}}}},
       {"required", json::array()}},
      {{"family", "TentMap"},
       {"dim", 1},
       {"parameters", {{"slope", {{"type", "number"}, {"exclusiveMinimum", 1}, {"maximum", 2}}}}},
       {"required", {"slope"}}},
      {{"family", "ToralAutomorphism"},
       {"dim", 2},
       {"parameters",
        {{"matrix",
          {{"type", "array"},
           {"minItems", 2},
           {"maxItems", 2},
           {"items", {{"type", "array"}, {"minItems", 2}, {"maxItems", 2}, {"items", {{"type", "integer"}}}}},
           {"determinant", json::array({-1, 1})}}}}},
       {"required", {"matrix"}}},
  });
}

}  // namespace ergodyn::cli
