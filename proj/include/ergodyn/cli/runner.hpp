#pragma once

// Analysis orchestration for the command-line tool: config in, versioned JSON
// report and CSV side files out.

#include <string>
#include <vector>

#include "json.hpp"

#include "ergodyn/cli/config.hpp"

namespace ergodyn::cli {

inline constexpr const char* kReportSchemaId = "ergodyn.report/1";
inline constexpr const char* kOutputDirEnv = "ERGODYN_OUTPUT_DIR";

// Runs every analysis whose section is present. Partition and transfer matrix
// are built once and shared. The report holds no timestamp when
// with_timestamp is false, otherwise generated_at is the current UTC time.
nlohmann::json run_analyses(const AnalysisConfig& cfg, bool with_timestamp = true);

// Analysis ids in report order.
const std::vector<std::string>& analysis_ids();

// Deterministic serialization: sorted keys, two-space indent.
std::string dump_report(const nlohmann::json& report);

struct RunOutput {
  nlohmann::json report;
  std::string report_path;
  std::vector<std::string> csv_paths;
};

// run_analyses plus file output. output_dir overrides the configured
// directory when nonempty.
RunOutput run_and_write(const AnalysisConfig& cfg, const std::string& output_dir = {});

// Plot-ready CSV of one analysis; throws InputError when the report has no
// such analysis.
std::string plot_csv(const nlohmann::json& report, const std::string& analysis);
std::string write_plot_data(const nlohmann::json& report, const std::string& analysis, const std::string& directory,
                            const std::string& prefix);

// Bundled families with parameter schemas, in a fixed order.
nlohmann::json systems_catalog();

}  // namespace ergodyn::cli
