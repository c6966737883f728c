#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <json.hpp>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rotogo/cmaes.hpp"
#include "rotogo/parser.hpp"
#include "rotogo/planning.hpp"

namespace rotogo {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ObjectiveMode { robustness, rotogo };

inline std::string mode_name(ObjectiveMode m) { return m == ObjectiveMode::rotogo ? "rotogo" : "robustness"; }

inline ObjectiveMode mode_from_name(const std::string& s) {
  if (s == "rotogo") return ObjectiveMode::rotogo;
  if (s == "robustness") return ObjectiveMode::robustness;
  throw ConfigError("unknown objective mode '" + s + "' (expected robustness or rotogo)");
}

struct PlannerConfig {
  int via_points = 4;
  CmaesConfig cmaes;
  PlanLimits limits;
};

/// Environment disturbance parameterization: one Gaussian step of the given
/// per-axis standard deviation every `period` seconds.
struct NoiseModel {
  double period = 0.005;
  double std = 0.05;
};

/// Named noise presets. "default" is the library default. The other three are
/// alternative parameterizations given as per-step variances in cm^2
/// ("sec7": 4 every 0.02 s, "table2": 3 every 0.005 s, "appendix": 5 every
/// 0.005 s). Append "_m2" to read the same numbers as m^2.
inline NoiseModel noise_preset(const std::string& name) {
  if (name == "default") return {0.005, 0.05};
  if (name == "static") return {0.005, 0.0};
  if (name == "sec7") return {0.02, std::sqrt(4.0) * 0.01};
  if (name == "table2") return {0.005, std::sqrt(3.0) * 0.01};
  if (name == "appendix") return {0.005, std::sqrt(5.0) * 0.01};
  if (name == "sec7_m2") return {0.02, std::sqrt(4.0)};
  if (name == "table2_m2") return {0.005, std::sqrt(3.0)};
  if (name == "appendix_m2") return {0.005, std::sqrt(5.0)};
  throw ConfigError("unknown noise preset '" + name + "'");
}

inline const std::vector<std::string>& noise_preset_names() {
  static const std::vector<std::string> names = {"default", "static",   "sec7",    "table2",
                                                 "appendix", "sec7_m2", "table2_m2", "appendix_m2"};
  return names;
}

struct ScenarioConfig {
  std::string name = "custom";
  std::string formula;
  /// Aliases in definition order; later aliases may use earlier ones.
  std::vector<std::pair<std::string, std::string>> aliases;
  RobotState robot_start;
  EnvState env_start;
  Workspace workspace;
  double horizon = 20.0;
  double trace_period = 0.1;
  double env_step_period = 0.005;
  double env_noise_std = 0.05;
  double replan_period = 0.5;
  ObjectiveMode mode = ObjectiveMode::rotogo;
  std::uint64_t seed = 0;
  /// Radius subtracted from the robot/environment distance in min_distance.
  double distance_radius = 0.5;
  PlannerConfig planner;

  void set_noise(const NoiseModel& n) {
    env_step_period = n.period;
    env_noise_std = n.std;
  }

  AliasTable alias_table() const {
    AliasTable table;
    for (const auto& [name, text] : aliases) {
      try {
        table.insert_or_assign(name, parse_formula(text, table));
      } catch (const ParseError& e) {
        throw ConfigError("alias '" + name + "': " + e.what());
      }
    }
    return table;
  }

  Formula parsed_formula() const {
    try {
      return parse_formula(formula, alias_table());
    } catch (const ParseError& e) {
      throw ConfigError(std::string("formula: ") + e.what());
    }
  }

  TimePoint trace_step() const { return TimePoint::from_seconds(trace_period); }

  /// Number of trace samples over [0, horizon].
  std::size_t sample_count() const {
    return static_cast<std::size_t>(TimePoint::from_seconds(horizon).ticks / trace_step().ticks) + 1;
  }

  std::size_t replan_every() const {
    return static_cast<std::size_t>(TimePoint::from_seconds(replan_period).ticks / trace_step().ticks);
  }

  void validate() const {
    auto ticks = [](double s) { return TimePoint::from_seconds(s).ticks; };
    if (!(trace_period > 0) || ticks(trace_period) <= 0) throw ConfigError("trace_period must be positive");
    if (!(horizon > 0)) throw ConfigError("horizon must be positive");
    if (ticks(horizon) % ticks(trace_period) != 0) throw ConfigError("horizon must be a multiple of trace_period");
    if (!(replan_period > 0) || ticks(replan_period) % ticks(trace_period) != 0)
      throw ConfigError("replan_period must be a positive multiple of trace_period");
    if (!(env_step_period > 0) || ticks(env_step_period) <= 0) throw ConfigError("env_step_period must be positive");
    if (!(env_noise_std >= 0) || !std::isfinite(env_noise_std)) throw ConfigError("env_noise_std must be >= 0");
    if (planner.via_points < 1) throw ConfigError("planner.via_points must be >= 1");
    planner.cmaes.validate();
    const Formula f = parsed_formula();
    const TimeBound h = horizon_of(f);
    if (h.is_infinite()) throw ConfigError("formula must be bounded");
    if (h.value.seconds() > horizon + 1e-9)
      throw ConfigError("formula horizon " + format_bound(h) + " s exceeds mission horizon");
  }

 private:
  static TimeBound horizon_of(const Formula& f) { return rotogo::horizon(f); }
};

// ---------------------------------------------------------------------------
// Built-in scenarios

inline ScenarioConfig scenario_phi_avoid() {
  ScenarioConfig c;
  c.name = "phi_avoid";
  c.formula = "G[0,20] !(human | obs1 | obs2) & F[0,20] goal";
  c.aliases = {
      {"human", "(x - xe)^2 + (y - ye)^2 < 0.25"},
      {"obs1", "(x > 0.5) & (x < 1) & (y > 0) & (y < 2.4)"},
      {"obs2", "(x > 0.5) & (x < 1) & (y > 2.6) & (y < 5)"},
      {"goal", "(x > 4) & (y > 2) & (y < 3)"},
  };
  c.robot_start = {0.5, 2.5, 0.0, 0.0};
  c.env_start = {3.5, 2.0};
  c.distance_radius = 0.5;
  return c;
}

inline ScenarioConfig scenario_phi_stayin() {
  ScenarioConfig c;
  c.name = "phi_stayin";
  c.formula = "G[0,20] region";
  c.aliases = {{"region", "(x - xe)^2 + (y - ye)^2 < 2"}};
  c.robot_start = {3.5, 3.0, 0.0, 0.0};
  c.env_start = {2.5, 2.5};
  c.distance_radius = std::sqrt(2.0);
  return c;
}

inline ScenarioConfig scenario_by_name(const std::string& name) {
  if (name == "phi_avoid" || name == "avoid") return scenario_phi_avoid();
  if (name == "phi_stayin" || name == "stayin") return scenario_phi_stayin();
  throw ConfigError("unknown scenario '" + name + "' (expected phi_avoid or phi_stayin)");
}

// ---------------------------------------------------------------------------
// JSON (de)serialization

inline nlohmann::json to_json(const ScenarioConfig& c) {
  using nlohmann::json;
  json aliases = json::array();
  for (const auto& [n, e] : c.aliases) aliases.push_back({{"name", n}, {"formula", e}});
  const auto& p = c.planner;
  return {
      {"name", c.name},
      {"formula", c.formula},
      {"aliases", aliases},
      {"robot_start", {{"x", c.robot_start.x}, {"y", c.robot_start.y}, {"vx", c.robot_start.vx}, {"vy", c.robot_start.vy}}},
      {"env_start", {{"xe", c.env_start.xe}, {"ye", c.env_start.ye}}},
      {"workspace",
       {{"x_min", c.workspace.x_min}, {"x_max", c.workspace.x_max}, {"y_min", c.workspace.y_min}, {"y_max", c.workspace.y_max}}},
      {"horizon", c.horizon},
      {"trace_period", c.trace_period},
      {"env_step_period", c.env_step_period},
      {"env_noise_std", c.env_noise_std},
      {"replan_period", c.replan_period},
      {"objective_mode", mode_name(c.mode)},
      {"seed", c.seed},
      {"distance_radius", c.distance_radius},
      {"planner",
       {{"via_points", p.via_points},
        {"population_size", p.cmaes.population_size},
        {"initial_step_size", p.cmaes.initial_step_size},
        {"warm_start_step_size", p.cmaes.warm_start_step_size},
        {"max_iterations", p.cmaes.max_iterations},
        {"v_max", p.limits.v_max},
        {"a_max", p.limits.a_max},
        {"limit_penalty", p.limits.limit_penalty},
        {"workspace_penalty", p.limits.workspace_penalty}}},
  };
}

namespace detail {

template <class T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace detail

/// Reads a config. Missing fields keep the values of `base` (by default the
/// built-in scenario named by "scenario", if present, else an empty config).
/// A "noise" field naming a preset sets env_step_period and env_noise_std
/// before the explicit fields are applied.
inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ScenarioConfig c;
  if (j.contains("scenario")) c = scenario_by_name(j.at("scenario").get<std::string>());
  if (j.contains("noise")) c.set_noise(noise_preset(j.at("noise").get<std::string>()));
  using detail::read_opt;
  read_opt(j, "name", c.name);
  read_opt(j, "formula", c.formula);
  if (j.contains("aliases")) {
    c.aliases.clear();
    for (const auto& a : j.at("aliases")) {
      if (!a.contains("name") || !a.contains("formula")) throw ConfigError("alias entries need name and formula");
      c.aliases.emplace_back(a.at("name").get<std::string>(), a.at("formula").get<std::string>());
    }
  }
  if (j.contains("robot_start")) {
    const auto& r = j.at("robot_start");
    read_opt(r, "x", c.robot_start.x);
    read_opt(r, "y", c.robot_start.y);
    read_opt(r, "vx", c.robot_start.vx);
    read_opt(r, "vy", c.robot_start.vy);
  }
  if (j.contains("env_start")) {
    read_opt(j.at("env_start"), "xe", c.env_start.xe);
    read_opt(j.at("env_start"), "ye", c.env_start.ye);
  }
  if (j.contains("workspace")) {
    const auto& w = j.at("workspace");
    read_opt(w, "x_min", c.workspace.x_min);
    read_opt(w, "x_max", c.workspace.x_max);
    read_opt(w, "y_min", c.workspace.y_min);
    read_opt(w, "y_max", c.workspace.y_max);
  }
  read_opt(j, "horizon", c.horizon);
  read_opt(j, "trace_period", c.trace_period);
  read_opt(j, "env_step_period", c.env_step_period);
  read_opt(j, "env_noise_std", c.env_noise_std);
  read_opt(j, "replan_period", c.replan_period);
  if (j.contains("objective_mode")) c.mode = mode_from_name(j.at("objective_mode").get<std::string>());
  read_opt(j, "seed", c.seed);
  read_opt(j, "distance_radius", c.distance_radius);
  if (j.contains("planner")) {
    const auto& p = j.at("planner");
    read_opt(p, "via_points", c.planner.via_points);
    read_opt(p, "population_size", c.planner.cmaes.population_size);
    read_opt(p, "initial_step_size", c.planner.cmaes.initial_step_size);
    read_opt(p, "warm_start_step_size", c.planner.cmaes.warm_start_step_size);
    read_opt(p, "max_iterations", c.planner.cmaes.max_iterations);
    read_opt(p, "v_max", c.planner.limits.v_max);
    read_opt(p, "a_max", c.planner.limits.a_max);
    read_opt(p, "limit_penalty", c.planner.limits.limit_penalty);
    read_opt(p, "workspace_penalty", c.planner.limits.workspace_penalty);
  }
  c.validate();
  return c;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return scenario_from_json(j);
}

}  // namespace rotogo
