#pragma once

// Analysis configuration: JSON validated against the published schema, then
// resolved into typed settings with defaults filled in.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ergodyn/systems.hpp"
#include "ergodyn/tame.hpp"

namespace ergodyn::cli {

struct ConvergenceSettings {
  std::vector<std::uint64_t> cesaro;                               // lengths
  std::vector<std::pair<std::uint64_t, std::uint64_t>> windows;    // (start, length)
  double tol = 1e-2;
  double defect_threshold = 0.05;
};

struct KernelSettings {
  std::uint64_t n = 4096;
};

struct ConditionCSettings {
  std::size_t max_period = 4;
};

struct ProximalitySettings {
  std::size_t points = 100;
  std::size_t horizon = 1000;
  double eps = 1e-3;
  std::uint64_t triple_seed = 0x5eed;
};

struct MeasureSettings {
  double support_threshold = 1e-12;
  std::uint64_t birkhoff_n = 100000;
  std::uint64_t limit_n = 4096;
};

struct TamenessSettings {
  std::size_t function_id = 1;
  std::size_t k_max = 8;
  std::size_t grid = 4096;
  TameStrategy strategy = TameStrategy::fixed;
  std::size_t window = 8;
};

struct CoveringSettings {
  std::uint64_t horizon = 1024;
  std::vector<double> eps{0.05, 0.1, 0.2};
  std::size_t bank = 16;
  std::size_t points = 16;
};

struct EquicontinuitySettings {
  std::vector<double> deltas{1e-3, 1e-2};
  std::uint64_t horizon = 20;
};

struct AnalysisConfig {
  nlohmann::json raw;  // the validated input, echoed into the report
  SystemSpec system = SystemSpec::doubling();
  std::size_t m = 64;  // cells per axis
  std::size_t samples = 64;
  std::uint64_t seed = 0;
  std::size_t bank_size = 9;
  std::vector<Point> probes;
  std::string output_dir = ".";
  std::string prefix = "report";

  // A present section requests that analysis.
  std::optional<ConvergenceSettings> convergence;
  std::optional<KernelSettings> kernel;
  bool minimal_sets = false;
  std::optional<ConditionCSettings> condition_c;
  std::optional<ProximalitySettings> proximality;
  std::optional<MeasureSettings> measures;
  std::optional<TamenessSettings> tameness;
  std::optional<CoveringSettings> covering;
  std::optional<EquicontinuitySettings> equicontinuity;
};

// Throws InputError naming the offending line (syntax) or field path (schema
// and parameter checks).
AnalysisConfig parse_config(const std::string& text);
AnalysisConfig load_config(const std::string& path);

SystemSpec parse_system(const nlohmann::json& system);

}  // namespace ergodyn::cli
