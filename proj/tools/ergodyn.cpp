// ergodyn: run analyses from a JSON config, list bundled systems, export CSV.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "ergodyn/cli/config.hpp"
#include "ergodyn/cli/runner.hpp"
#include "ergodyn/cli/schema.hpp"
#include "ergodyn/error.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;

std::string env_output_dir() {
  const char* v = std::getenv(ergodyn::cli::kOutputDirEnv);
  return v ? v : "";
}

int cmd_run(const std::string& config_path) {
  const auto cfg = ergodyn::cli::load_config(config_path);
  const auto out = ergodyn::cli::run_and_write(cfg, env_output_dir());
  for (const auto& line : out.report["summary"]) std::cout << line.get<std::string>() << '\n';
  std::cout << "report: " << out.report_path << '\n';
  for (const auto& p : out.csv_paths) std::cout << "csv: " << p << '\n';
  return 0;
}

int cmd_plotdata(const std::string& report_path, const std::string& analysis) {
  std::ifstream in(report_path);
  if (!in) throw ergodyn::InputError("cannot read report " + report_path);
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ergodyn::InputError(std::string("report is not valid JSON: ") + e.what());
  }
  if (const auto issues = ergodyn::cli::validate(ergodyn::cli::report_schema(), report); !issues.empty()) {
    throw ergodyn::InputError("report does not match schema " + std::string(ergodyn::cli::kReportSchemaId) + ":\n" +
                              ergodyn::cli::format_issues(issues));
  }
  std::string dir = env_output_dir();
  if (dir.empty()) {
    dir = std::filesystem::path(report_path).parent_path().string();
    if (dir.empty()) dir = ".";
  }
  const auto stem = std::filesystem::path(report_path).stem().string();
  std::cout << ergodyn::cli::write_plot_data(report, analysis, dir, stem) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ergodic-theory diagnostics for bundled dynamical systems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run the analyses requested by a JSON config");
  run->add_option("config", config_path, "Path to the config file")->required();

  app.add_subcommand("systems", "Print the catalog of bundled systems as JSON");

  std::string report_path;
  std::string analysis;
  auto* plot = app.add_subcommand("plotdata", "Write the CSV table of one analysis from a report");
  plot->add_option("report", report_path, "Path to a report JSON file")->required();
  plot->add_option("analysis", analysis, "Analysis id, e.g. convergence or tameness")->required();

  app.footer(std::string("Environment: ") + ergodyn::cli::kOutputDirEnv +
             " overrides the output directory.\nExit codes: 0 success, 2 config or input error, 3 resource limit.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (app.got_subcommand("systems")) {
      std::cout << ergodyn::cli::systems_catalog().dump(2) << '\n';
      return 0;
    }
    return cmd_plotdata(report_path, analysis);
  } catch (const ergodyn::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ergodyn::CapabilityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ergodyn::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
}
