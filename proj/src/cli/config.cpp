#include "ergodyn/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ergodyn/cli/schema.hpp"
#include "ergodyn/error.hpp"

namespace ergodyn::cli {
namespace {

using nlohmann::json;

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  return obj.contains(key) ? obj[key].get<T>() : fallback;
}

Point parse_point(const json& p, std::size_t dim, const std::string& path) {
  if (p.is_number()) {
    if (dim != 1) throw InputError(path + ": expected a coordinate pair for a 2D system");
    return Point(p.get<double>());
  }
  if (dim != 2) throw InputError(path + ": expected a single coordinate for a 1D system");
  return Point(p[0].get<double>(), p[1].get<double>());
}

std::vector<Point> default_probes(std::size_t dim, std::size_t count) {
  std::vector<Point> out;
  if (dim == 1) {
    for (std::size_t i = 0; i < count; ++i) out.emplace_back((i + 0.5) / static_cast<double>(count));
    return out;
  }
  const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
  for (std::size_t i = 0; i < count; ++i) {
    out.emplace_back((i % side + 0.5) / static_cast<double>(side), (i / side + 0.5) / static_cast<double>(side));
  }
  return out;
}

// Rewraps an InputError from a constructor with the field it came from.
template <class F>
auto at_field(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

}  // namespace

SystemSpec parse_system(const json& sys) {
  const auto family = sys.at("family").get<std::string>();
  auto need = [&](const char* key) -> const json& {
    if (!sys.contains(key)) throw InputError(std::string("$.system.") + key + ": is required for " + family);
    return sys[key];
  };
  const std::string p = "$.system.";
  if (family == "CircleRotation") {
    if (sys.contains("alpha_exact")) {
      const auto text = sys["alpha_exact"].get<std::string>();
      const auto slash = text.find('/');
      return at_field(p + "alpha_exact", [&] {
        return SystemSpec::rational_rotation(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
      });
    }
    return at_field(p + "alpha", [&] { return SystemSpec::circle_rotation(need("alpha").get<double>()); });
  }
  if (family == "DoublingMap") return SystemSpec::doubling();
  if (family == "NorthSouth") {
    return at_field(p + "kappa", [&] { return SystemSpec::north_south(get_or(sys, "kappa", 0.5)); });
  }
  if (family == "TentMap") {
    return at_field(p + "slope", [&] { return SystemSpec::tent(need("slope").get<double>()); });
  }
  const auto& m = need("matrix");
  return at_field(p + "matrix", [&] {
    return SystemSpec::toral(m[0][0].get<std::int64_t>(), m[0][1].get<std::int64_t>(), m[1][0].get<std::int64_t>(),
                             m[1][1].get<std::int64_t>());
  });
}

AnalysisConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (const auto issues = validate(config_schema(), doc); !issues.empty()) {
    throw InputError("config does not match schema ergodyn.config/1:\n" + format_issues(issues));
  }
  AnalysisConfig cfg;
  cfg.raw = doc;
  cfg.system = parse_system(doc["system"]);
  const std::size_t dim = cfg.system.dim();
  cfg.m = dim == 1 ? 64 : 16;
  if (doc.contains("partition")) {
    cfg.m = get_or<std::size_t>(doc["partition"], "m", cfg.m);
    cfg.samples = get_or<std::size_t>(doc["partition"], "samples", cfg.samples);
  }
  cfg.seed = get_or<std::uint64_t>(doc, "seed", 0);
  cfg.bank_size = get_or<std::size_t>(doc, "bank_size", cfg.bank_size);
  if (doc.contains("probes")) {
    for (std::size_t i = 0; i < doc["probes"].size(); ++i) {
      cfg.probes.push_back(parse_point(doc["probes"][i], dim, "$.probes[" + std::to_string(i) + "]"));
    }
  } else {
    cfg.probes = default_probes(dim, get_or<std::size_t>(doc, "probe_count", 16));
  }
  if (doc.contains("output")) {
    cfg.output_dir = get_or<std::string>(doc["output"], "directory", cfg.output_dir);
    cfg.prefix = get_or<std::string>(doc["output"], "prefix", cfg.prefix);
  }

  if (doc.contains("convergence")) {
    const auto& s = doc["convergence"];
    ConvergenceSettings c;
    if (s.contains("cesaro")) c.cesaro = s["cesaro"].get<std::vector<std::uint64_t>>();
    if (s.contains("windows")) {
      for (const auto& w : s["windows"]) {
        if (w[1].get<std::uint64_t>() < 1) throw InputError("$.convergence.windows: window length must be >= 1");
        c.windows.emplace_back(w[0].get<std::uint64_t>(), w[1].get<std::uint64_t>());
      }
    }
    if (c.cesaro.empty() && c.windows.empty()) {
      for (int k = 4; k <= 10; ++k) c.cesaro.push_back(std::uint64_t{1} << k);
    }
    c.tol = get_or(s, "tol", c.tol);
    c.defect_threshold = get_or(s, "defect_threshold", c.defect_threshold);
    cfg.convergence = c;
  }
  if (doc.contains("kernel")) cfg.kernel = KernelSettings{get_or<std::uint64_t>(doc["kernel"], "n", 4096)};
  cfg.minimal_sets = doc.contains("minimal_sets");
  if (doc.contains("condition_c")) {
    cfg.condition_c = ConditionCSettings{get_or<std::size_t>(doc["condition_c"], "max_period", 4)};
  }
  if (doc.contains("proximality")) {
    const auto& s = doc["proximality"];
    ProximalitySettings p;
    p.points = get_or(s, "points", p.points);
    p.horizon = get_or(s, "horizon", p.horizon);
    p.eps = get_or(s, "eps", p.eps);
    p.triple_seed = get_or(s, "triple_seed", p.triple_seed);
    cfg.proximality = p;
  }
  if (doc.contains("measures")) {
    const auto& s = doc["measures"];
    MeasureSettings ms;
    ms.support_threshold = get_or(s, "support_threshold", ms.support_threshold);
    ms.birkhoff_n = get_or(s, "birkhoff_n", ms.birkhoff_n);
    ms.limit_n = get_or(s, "limit_n", ms.limit_n);
    cfg.measures = ms;
  }
  if (doc.contains("tameness")) {
    const auto& s = doc["tameness"];
    TamenessSettings t;
    t.function_id = get_or(s, "function", t.function_id);
    t.k_max = get_or(s, "k_max", t.k_max);
    t.grid = get_or(s, "grid", t.grid);
    t.strategy = get_or<std::string>(s, "strategy", "fixed") == "fixed" ? TameStrategy::fixed : TameStrategy::adversarial;
    t.window = get_or(s, "window", t.window);
    if (dim == 2) {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(t.grid))));
      if (side * side != t.grid) throw InputError("$.tameness.grid: must be a perfect square for a 2D system");
    }
    cfg.tameness = t;
  }
  if (doc.contains("covering")) {
    const auto& s = doc["covering"];
    CoveringSettings c;
    c.horizon = get_or(s, "horizon", c.horizon);
    if (s.contains("eps")) c.eps = s["eps"].get<std::vector<double>>();
    c.bank = get_or(s, "bank", c.bank);
    c.points = get_or(s, "points", c.points);
    cfg.covering = c;
  }
  if (doc.contains("equicontinuity")) {
    const auto& s = doc["equicontinuity"];
    EquicontinuitySettings e;
    if (s.contains("deltas")) e.deltas = s["deltas"].get<std::vector<double>>();
    e.horizon = get_or(s, "horizon", e.horizon);
    cfg.equicontinuity = e;
  }
  return cfg;
}

AnalysisConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace ergodyn::cli
