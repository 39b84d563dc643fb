#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace mlab {

/// A scalar, flag, string or number list read from the config.
using ParamValue = std::variant<double, bool, std::string, std::vector<double>>;

/// A table of parameters with the key path of the table, so that lookups can raise
/// ConfigError naming the exact offending key.
class ParamTable {
 public:
  ParamTable() = default;
  explicit ParamTable(std::string path) : path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void set(const std::string& key, ParamValue v) { values_[key] = std::move(v); }
  bool has(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, ParamValue>& values() const { return values_; }

  double number(const std::string& key, double fallback) const;
  double positive(const std::string& key, double fallback) const;
  std::size_t count(const std::string& key, std::size_t fallback, std::size_t minimum = 1) const;
  bool flag(const std::string& key, bool fallback) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  std::vector<double> list(const std::string& key, std::vector<double> fallback,
                           std::optional<std::size_t> length = std::nullopt) const;

  /// Throws ConfigError for the first key not in `known`.
  void require_known(const std::vector<std::string>& known) const;

 private:
  std::string path_;
  std::map<std::string, ParamValue> values_;
};

/// A named generator with its own parameters, e.g. [scenario.potential] or [scenario.rho].
struct GeneratorBinding {
  std::string generator;
  ParamTable params;  ///< everything except the generator key
};

struct ScenarioSpec {
  std::string name;
  std::string kind;
  std::size_t index = 0;          ///< position in the config, used in key paths
  std::optional<std::uint64_t> seed;
  ParamTable params;              ///< top-level scalar keys of the scenario
  ParamTable tolerance;           ///< [scenario.tolerance] overrides
  std::map<std::string, GeneratorBinding> bindings;  ///< sub-tables with a generator key
  std::optional<std::string> output;  ///< subdirectory name override

  std::string key_path(const std::string& key) const;
};

struct SuiteConfig {
  std::string name = "suite";
  std::string source;  ///< file name or "<string>"
  std::optional<std::uint64_t> seed;
  std::vector<ScenarioSpec> scenarios;
};

/// Parses a TOML document. Structural problems raise ConfigError with the key path;
/// generator names and scenario parameters are validated later by prepare_scenario.
SuiteConfig parse_config_string(const std::string& text, const std::string& source = "<string>");
SuiteConfig parse_config_file(const std::string& path);

/// Applies an integer seed string from the environment to every scenario (and the suite).
/// Throws ConfigError("MADELUNG_LAB_SEED", ...) when the value is not an unsigned integer.
void apply_seed_override(SuiteConfig& config, const std::string& value);

}  // namespace mlab
