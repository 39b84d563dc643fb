#include "mlab/scenario_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "mlab/errors.hpp"

namespace mlab {

namespace {

const char* type_name(const ParamValue& v) {
  switch (v.index()) {
    case 0: return "a number";
    case 1: return "a boolean";
    case 2: return "a string";
    default: return "a number list";
  }
}

ParamValue convert(const toml::node& node, const std::string& path) {
  if (auto i = node.as_integer()) return static_cast<double>(i->get());
  if (auto f = node.as_floating_point()) return f->get();
  if (auto b = node.as_boolean()) return b->get();
  if (auto s = node.as_string()) return s->get();
  if (auto arr = node.as_array()) {
    std::vector<double> out;
    for (std::size_t k = 0; k < arr->size(); ++k) {
      const toml::node& el = *arr->get(k);
      if (auto i = el.as_integer()) {
        out.push_back(static_cast<double>(i->get()));
      } else if (auto f = el.as_floating_point()) {
        out.push_back(f->get());
      } else {
        throw ConfigError(path + "[" + std::to_string(k) + "]", "list entries must be numbers");
      }
    }
    return out;
  }
  throw ConfigError(path, "unsupported value type");
}

std::uint64_t read_seed(const toml::node& node, const std::string& path) {
  auto i = node.as_integer();
  if (!i || i->get() < 0) throw ConfigError(path, "seed must be a non-negative integer");
  return static_cast<std::uint64_t>(i->get());
}

ParamTable read_flat_table(const toml::table& t, const std::string& path, const std::set<std::string>& skip = {}) {
  ParamTable out(path);
  for (const auto& [k, v] : t) {
    const std::string key(k.str());
    if (skip.count(key)) continue;
    if (v.is_table()) throw ConfigError(path + "." + key, "nested tables are not allowed here");
    out.set(key, convert(v, path + "." + key));
  }
  return out;
}

ScenarioSpec read_scenario(const toml::table& t, std::size_t index) {
  ScenarioSpec s;
  s.index = index;
  const std::string base = "scenario[" + std::to_string(index) + "]";
  s.params = ParamTable(base);
  s.tolerance = ParamTable(base + ".tolerance");
  for (const auto& [k, v] : t) {
    const std::string key(k.str());
    const std::string path = base + "." + key;
    if (key == "name" || key == "kind" || key == "output") {
      auto str = v.as_string();
      if (!str || str->get().empty()) throw ConfigError(path, "must be a non-empty string");
      (key == "name" ? s.name : key == "kind" ? s.kind : s.output.emplace()) = str->get();
    } else if (key == "seed") {
      s.seed = read_seed(v, path);
    } else if (key == "tolerance") {
      auto tt = v.as_table();
      if (!tt) throw ConfigError(path, "must be a table");
      s.tolerance = read_flat_table(*tt, path);
      for (const auto& [tk, tv] : s.tolerance.values()) {
        if (tv.index() != 0 || !(std::get<double>(tv) > 0.0)) {
          throw ConfigError(s.tolerance.key_path(tk), "tolerances must be positive numbers");
        }
      }
    } else if (auto sub = v.as_table()) {
      auto gen = sub->get("generator");
      if (!gen) throw ConfigError(path + ".generator", "missing; sub-tables bind a named generator");
      auto gs = gen->as_string();
      if (!gs) throw ConfigError(path + ".generator", "must be a string");
      GeneratorBinding b{gs->get(), read_flat_table(*sub, path, {"generator"})};
      s.bindings.emplace(key, std::move(b));
    } else {
      s.params.set(key, convert(v, path));
    }
  }
  if (s.name.empty()) throw ConfigError(base + ".name", "missing");
  if (s.kind.empty()) s.kind = s.name;
  return s;
}

}  // namespace

double ParamTable::number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.index() != 0) {
    throw ConfigError(key_path(key), std::string("expected a number, got ") + type_name(it->second));
  }
  return std::get<double>(it->second);
}

double ParamTable::positive(const std::string& key, double fallback) const {
  const double v = number(key, fallback);
  if (!(v > 0.0)) throw ConfigError(key_path(key), "must be positive");
  return v;
}

std::size_t ParamTable::count(const std::string& key, std::size_t fallback, std::size_t minimum) const {
  const double v = number(key, static_cast<double>(fallback));
  if (v != std::floor(v) || v < static_cast<double>(minimum) || v > 1e9) {
    throw ConfigError(key_path(key), "must be an integer >= " + std::to_string(minimum));
  }
  return static_cast<std::size_t>(v);
}

bool ParamTable::flag(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.index() != 1) {
    throw ConfigError(key_path(key), std::string("expected a boolean, got ") + type_name(it->second));
  }
  return std::get<bool>(it->second);
}

std::string ParamTable::text(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.index() != 2) {
    throw ConfigError(key_path(key), std::string("expected a string, got ") + type_name(it->second));
  }
  return std::get<std::string>(it->second);
}

std::vector<double> ParamTable::list(const std::string& key, std::vector<double> fallback,
                                     std::optional<std::size_t> length) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (it->second.index() != 3) {
    throw ConfigError(key_path(key), std::string("expected a number list, got ") + type_name(it->second));
  }
  const auto& v = std::get<std::vector<double>>(it->second);
  if (length && v.size() != *length) {
    throw ConfigError(key_path(key), "expected " + std::to_string(*length) + " entries");
  }
  return v;
}

void ParamTable::require_known(const std::vector<std::string>& known) const {
  for (const auto& [k, v] : values_) {
    bool ok = false;
    for (const std::string& n : known) ok = ok || n == k;
    if (!ok) {
      std::string list;
      for (const std::string& n : known) list += (list.empty() ? "" : ", ") + n;
      throw ConfigError(key_path(k), "unknown key (expected one of: " + (list.empty() ? "none" : list) + ")");
    }
  }
}

std::string ScenarioSpec::key_path(const std::string& key) const {
  return "scenario[" + std::to_string(index) + "]." + key;
}

SuiteConfig parse_config_string(const std::string& text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream where;
    where << "line " << e.source().begin.line << ", column " << e.source().begin.column;
    throw ConfigError(source, "TOML syntax error at " + where.str() + ": " + std::string(e.description()));
  }
  SuiteConfig cfg;
  cfg.source = source;
  for (const auto& [k, v] : root) {
    const std::string key(k.str());
    if (key == "suite") {
      auto t = v.as_table();
      if (!t) throw ConfigError("suite", "must be a table");
      for (const auto& [sk, sv] : *t) {
        const std::string skey(sk.str());
        if (skey == "name") {
          auto s = sv.as_string();
          if (!s) throw ConfigError("suite.name", "must be a string");
          cfg.name = s->get();
        } else if (skey == "seed") {
          cfg.seed = read_seed(sv, "suite.seed");
        } else {
          throw ConfigError("suite." + skey, "unknown key (expected name or seed)");
        }
      }
    } else if (key == "scenario") {
      auto arr = v.as_array();
      if (!arr) throw ConfigError("scenario", "must be an array of tables ([[scenario]])");
      for (std::size_t i = 0; i < arr->size(); ++i) {
        auto t = arr->get(i)->as_table();
        if (!t) throw ConfigError("scenario[" + std::to_string(i) + "]", "must be a table");
        cfg.scenarios.push_back(read_scenario(*t, i));
      }
    } else {
      throw ConfigError(key, "unknown top-level key (expected suite or scenario)");
    }
  }
  if (cfg.scenarios.empty()) throw ConfigError("scenario", "the config declares no scenarios");
  std::set<std::string> names;
  for (const ScenarioSpec& s : cfg.scenarios) {
    if (!names.insert(s.name).second) throw ConfigError(s.key_path("name"), "duplicate scenario name '" + s.name + "'");
  }
  return cfg;
}

SuiteConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str(), path);
}

void apply_seed_override(SuiteConfig& config, const std::string& value) {
  std::uint64_t seed = 0;
  const char* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, seed);
  if (value.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("MADELUNG_LAB_SEED", "must be an unsigned integer, got '" + value + "'");
  }
  config.seed = seed;
  for (ScenarioSpec& s : config.scenarios) s.seed = seed;
}

}  // namespace mlab
