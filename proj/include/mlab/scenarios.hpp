#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mlab/field.hpp"
#include "mlab/scenario_config.hpp"

namespace mlab {

using Json = nlohmann::ordered_json;

/// Registry entry of a built-in scenario kind.
struct ScenarioInfo {
  std::string name;
  std::string summary;      ///< one line for `list`
  std::string description;  ///< what is certified and where it comes from, for `describe`
  std::string pass_policy;
  bool randomized = false;  ///< needs a seed
  std::vector<std::string> params;    ///< accepted top-level keys with defaults, "key = default"
  std::vector<std::string> bindings;  ///< accepted generator sub-tables
};

const std::vector<ScenarioInfo>& scenario_registry();
const ScenarioInfo* find_scenario(const std::string& name);
/// Registry names close to `name` (edit distance or shared prefix), best first.
std::vector<std::string> suggest_scenarios(const std::string& name);
std::string describe_scenario(const ScenarioInfo& info);

struct ScenarioResult {
  std::string name;
  std::string kind;
  std::optional<std::uint64_t> seed;
  bool pass = false;
  Json report;              ///< deterministic content only
  std::string error;        ///< set when the scenario threw
  double seconds = 0.0;     ///< wall time, written to the metadata file
  std::vector<std::pair<std::string, RealField>> fields;  ///< written as CSV next to the report
};

using ScenarioRun = std::function<ScenarioResult()>;

/// Reads and validates every parameter of the scenario (ConfigError on problems) and
/// returns the deferred computation. `config_dir` anchors relative file paths.
ScenarioRun prepare_scenario(const ScenarioSpec& spec, std::optional<std::uint64_t> suite_seed,
                             const std::string& config_dir = ".");

struct RunOptions {
  std::string out_dir = "madelung-lab-out";
  std::optional<std::string> only;
  bool parallel = false;
};

struct SuiteOutcome {
  std::vector<ScenarioResult> results;
  int exit_code = 0;  ///< 0 all pass, 1 some scenario failed
};

/// Validates the whole suite first (throws ConfigError without running anything), then runs
/// the scenarios in declaration order (or concurrently with `parallel`) and writes
/// <out>/<scenario>/report.json, metadata.json and any field CSVs.
SuiteOutcome run_suite(const SuiteConfig& config, const RunOptions& options);

/// The report as written to disk.
std::string report_text(const ScenarioResult& result);

/// Built-in suite with every registered scenario at its defaults.
SuiteConfig builtin_suite(std::uint64_t seed = 20261014);

}  // namespace mlab
