// madelung-lab: scenario runner over the madelung_lab library.
#include <CLI11.hpp>

#include <cstdlib>
#include <iomanip>
#include <iostream>

#include "mlab/errors.hpp"
#include "mlab/scenario_config.hpp"
#include "mlab/scenarios.hpp"

namespace {

constexpr int exit_config_error = 2;

void print_result(const mlab::ScenarioResult& r) {
  std::cout << (r.pass ? "PASS " : "FAIL ") << r.name;
  if (r.seed) std::cout << " (seed " << *r.seed << ")";
  std::cout << "  " << std::fixed << std::setprecision(2) << r.seconds << " s\n";
  if (!r.error.empty()) std::cout << "  error: " << r.error << "\n";
  for (const auto& c : r.report["checks"]) {
    if (!c["pass"].get<bool>()) {
      std::cout << "  failed: " << c["name"].get<std::string>() << ": " << c["value"].dump() << " "
                << c["relation"].get<std::string>() << " " << c["threshold"].dump() << "\n";
    }
  }
  if (r.report["details"].contains("failing_conditions")) {
    const auto& f = r.report["details"]["failing_conditions"];
    if (!f.empty()) std::cout << "  failing condition indices: " << f.dump() << "\n";
  }
}

int run(const std::string& config_path, const mlab::RunOptions& options) {
  try {
    mlab::SuiteConfig config = mlab::parse_config_file(config_path);
    if (const char* env = std::getenv("MADELUNG_LAB_SEED")) mlab::apply_seed_override(config, env);
    const mlab::SuiteOutcome outcome = mlab::run_suite(config, options);
    std::size_t passed = 0;
    for (const auto& r : outcome.results) {
      print_result(r);
      passed += r.pass ? 1 : 0;
    }
    std::cout << passed << "/" << outcome.results.size() << " scenarios passed; reports in " << options.out_dir
              << "\n";
    return outcome.exit_code;
  } catch (const mlab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return exit_config_error;
  }
}

int list() {
  for (const auto& s : mlab::scenario_registry()) {
    std::cout << std::left << std::setw(22) << s.name << s.summary << (s.randomized ? " [seeded]" : "") << "\n";
  }
  return 0;
}

int describe(const std::string& name) {
  if (const mlab::ScenarioInfo* info = mlab::find_scenario(name)) {
    std::cout << mlab::describe_scenario(*info);
    return 0;
  }
  std::cerr << "unknown scenario '" << name << "'\n";
  const auto sug = mlab::suggest_scenarios(name);
  if (!sug.empty()) {
    std::cerr << "did you mean:\n";
    for (const auto& s : sug) std::cerr << "  " << s << "\n";
  }
  std::cerr << "run 'madelung-lab list' for all scenarios\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Executable certification of the Madelung-type scenarios"};
  app.require_subcommand(1);

  std::string config_path, name;
  mlab::RunOptions options;
  std::string only;
  auto* run_cmd = app.add_subcommand("run", "run the scenarios of a TOML config");
  run_cmd->add_option("config", config_path, "scenario config file")->required();
  run_cmd->add_option("--only", only, "run only the scenario with this name");
  run_cmd->add_flag("--parallel", options.parallel, "run scenarios concurrently");
  run_cmd->add_option("--out", options.out_dir, "output directory")->capture_default_str();

  auto* list_cmd = app.add_subcommand("list", "list built-in scenarios");
  auto* describe_cmd = app.add_subcommand("describe", "describe one scenario");
  describe_cmd->add_option("name", name, "scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  if (*run_cmd) {
    if (!only.empty()) options.only = only;
    return run(config_path, options);
  }
  if (*list_cmd) return list();
  return describe(name);
}
