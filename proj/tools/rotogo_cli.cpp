// rotogo command-line front end.
//
//   rotogo monitor  --formula F --trace T [--rotogo-from t]
//   rotogo progress --formula F --trace T
//   rotogo plan     [--scenario S] [--mode M]
//   rotogo run      [--scenario S] [--mode M] [--noise N]
//   rotogo bench    [--scenario S] [--modes M,...] [--episodes N] [--noise N] [--threads K]
//   rotogo selftest [--cases N]
//
// Every subcommand accepts --seed, --config <file.json> and --out <dir>.

#include <CLI11.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>

#include "rotogo/bench.hpp"
#include "rotogo/mpc.hpp"
#include "rotogo/parser.hpp"
#include "rotogo/progression.hpp"
#include "rotogo/selftest.hpp"
#include "rotogo/semantics.hpp"

namespace fs = std::filesystem;
using namespace rotogo;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitError = 2;

struct CommonOptions {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--seed", o.seed, "Random seed (base seed for bench)");
  cmd->add_option("--config", o.config, "Scenario configuration file (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "Output directory");
}

std::ofstream open_out(const std::string& dir, const std::string& file) {
  fs::create_directories(dir);
  const fs::path p = fs::path(dir) / file;
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  return f;
}

/// Built-in scenario aliases, overridden by those of --config if given.
AliasTable monitor_aliases(const CommonOptions& o) {
  AliasTable table = scenario_phi_avoid().alias_table();
  for (auto& [name, f] : scenario_phi_stayin().alias_table()) table.insert_or_assign(name, f);
  if (!o.config.empty())
    for (auto& [name, f] : load_scenario_file(o.config).alias_table()) table.insert_or_assign(name, f);
  return table;
}

/// Scenario from --config, else the named built-in; then CLI overrides.
ScenarioConfig resolve_scenario(const CommonOptions& o, const std::string& scenario, const std::string& mode,
                                const std::string& noise) {
  ScenarioConfig c = o.config.empty() ? scenario_by_name(scenario) : load_scenario_file(o.config);
  if (!mode.empty()) c.mode = mode_from_name(mode);
  if (!noise.empty()) c.set_noise(noise_preset(noise));
  if (o.seed) c.seed = *o.seed;
  c.validate();
  return c;
}

json replan_json(const ReplanRecord& r) {
  json via = json::array();
  for (const auto& p : r.plan.via_points) via.push_back({p.x(), p.y()});
  return {{"t", format_seconds(r.time)},
          {"sample_index", r.sample_index},
          {"warm_start", r.warm_start},
          {"retained", r.retained},
          {"via_points", via},
          {"objective", ext_real_json(r.objective)},
          {"cost", r.cost},
          {"formula_size", r.formula.size()},
          {"samples_touched", r.samples_touched},
          {"earliest_sample_touched", r.earliest_sample_touched}};
}

void write_trajectory_csv(std::ostream& out, const Trajectory& tr, TimePoint offset) {
  out << "t,x,y,vx,vy,ax,ay\n";
  for (const auto& r : tr)
    out << format_seconds(offset + TimePoint::from_seconds(r.t)) << ',' << detail::csv_number(r.x) << ','
        << detail::csv_number(r.y) << ',' << detail::csv_number(r.vx) << ',' << detail::csv_number(r.vy) << ','
        << detail::csv_number(r.ax) << ',' << detail::csv_number(r.ay) << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_monitor(const CommonOptions& o, const std::string& formula_text, const std::string& trace_path,
                std::optional<double> rotogo_from) {
  const Formula f = parse_formula(formula_text, monitor_aliases(o));
  const Signal s = to_signal(read_trace_csv_file(trace_path));
  const TimePoint t0 = s.time(0);
  const bool verdict = sat(s, t0, f);
  const ExtReal rho = robustness(s, t0, f);
  json report = {{"formula", format(f)}, {"satisfied", verdict}, {"robustness", ext_real_json(rho)}};
  std::cout << "verdict: " << (verdict ? "satisfied" : "violated") << "\n";
  std::cout << "robustness: " << rho.to_string() << "\n";
  if (rotogo_from) {
    const TimePoint t_hat = TimePoint::from_seconds(*rotogo_from);
    const ExtReal r = rotogo::rotogo(s, t0, t_hat, f);
    std::cout << "rotogo(t_hat=" << format_seconds(t_hat) << "): " << r.to_string() << "\n";
    report["rotogo"] = ext_real_json(r);
    report["t_hat"] = format_seconds(t_hat);
  }
  if (!o.out.empty()) open_out(o.out, "monitor.json") << report.dump(2) << "\n";
  return verdict ? kExitOk : kExitViolated;
}

int cmd_progress(const CommonOptions& o, const std::string& formula_text, const std::string& trace_path) {
  const Formula f = parse_formula(formula_text, monitor_aliases(o));
  const Signal s = to_signal(read_trace_csv_file(trace_path));
  std::ostringstream text;
  MonitorState m = MonitorState::start(f, s.time(0));
  text << format_seconds(m.anchor_time) << "\t" << format(m.current) << "\n";
  for (std::size_t k = 0; k + 1 < s.size(); ++k) {
    m = monitor_step(m, s.time(k + 1), s.state(k));
    text << format_seconds(m.anchor_time) << "\t" << format(m.current) << "\n";
  }
  std::cout << text.str();
  if (!o.out.empty()) open_out(o.out, "progress.tsv") << text.str();
  return kExitOk;
}

int cmd_plan(const CommonOptions& o, const std::string& scenario, const std::string& mode) {
  const ScenarioConfig c = resolve_scenario(o, scenario, mode, "");
  const ReplanRecord rec = plan_from_start(c);
  std::cout << "problem: " << c.name << "\nmode: " << mode_name(c.mode) << "\nseed: " << c.seed << "\n"
            << "objective: " << rec.objective.to_string() << "\ncost: " << detail::csv_number(rec.cost) << "\n";
  if (!o.out.empty()) {
    auto csv = open_out(o.out, "plan.csv");
    write_trajectory_csv(csv, rec.trajectory, TimePoint{0});
    open_out(o.out, "plan.json") << replan_json(rec).dump(2) << "\n";
  } else {
    write_trajectory_csv(std::cout, rec.trajectory, TimePoint{0});
  }
  return kExitOk;
}

int cmd_run(const CommonOptions& o, const std::string& scenario, const std::string& mode, const std::string& noise) {
  const ScenarioConfig c = resolve_scenario(o, scenario, mode, noise);
  const RunResult r = mpc_run(c);
  json summary = {{"problem", r.problem},
                  {"mode", mode_name(r.mode)},
                  {"seed", r.seed},
                  {"final_robustness", ext_real_json(r.final_robustness)},
                  {"success", r.success},
                  {"min_distance", r.min_distance},
                  {"replans", json::array()}};
  for (const auto& rec : r.replans) summary["replans"].push_back(replan_json(rec));
  std::cout << "problem: " << r.problem << "\nmode: " << mode_name(r.mode) << "\nseed: " << r.seed << "\n"
            << "final_robustness: " << r.final_robustness.to_string() << "\nsuccess: " << (r.success ? "true" : "false")
            << "\nmin_distance: " << detail::csv_number(r.min_distance) << "\n";
  if (!o.out.empty()) {
    auto csv = open_out(o.out, "trace.csv");
    write_trace_csv(csv, r.trace);
    open_out(o.out, "summary.json") << summary.dump(2) << "\n";
    open_out(o.out, "config.json") << to_json(c).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_bench(const CommonOptions& o, const std::string& scenario, const std::string& modes, std::size_t episodes,
              const std::string& noise, unsigned threads, bool no_traces) {
  BenchSpec spec;
  spec.scenario = resolve_scenario(o, scenario, "", noise);
  spec.modes.clear();
  std::stringstream ss(modes);
  for (std::string m; std::getline(ss, m, ',');)
    if (!m.empty()) spec.modes.push_back(mode_from_name(m));
  spec.episodes = episodes;
  spec.base_seed = o.seed.value_or(spec.scenario.seed);
  spec.out_dir = o.out;
  spec.threads = threads;
  spec.write_traces = !no_traces;
  const auto start = std::chrono::steady_clock::now();
  const BenchResult res = run_bench(spec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << stats_csv(res.rows);
  for (const auto& row : res.rows)
    if (row.failed_episodes > 0) std::cerr << row.mode << ": " << row.failed_episodes << " episode(s) failed\n";
  std::cerr << "elapsed: " << detail::csv_number(std::round(secs * 10) / 10) << " s\n";
  if (!o.out.empty()) {
    write_bench_outputs(spec, res);
    open_out(o.out, "config.json") << to_json(spec.scenario).dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_selftest(const CommonOptions& o, std::size_t cases, bool mutant) {
  SelftestOptions opt;
  if (o.seed) opt.seed = *o.seed;
  opt.cases = cases;
  if (mutant) opt.progression = mutant_progress();
  if (cases == 0) std::cerr << "warning: --cases 0 runs no instances; the suite passes vacuously\n";
  const auto reports = run_selftest(opt);
  bool ok = true;
  json out = json::array();
  for (const auto& r : reports) {
    std::cout << (r.failures == 0 ? "PASS " : "FAIL ") << r.name << ": " << r.cases - r.failures << "/" << r.cases
              << "\n";
    json j = {{"property", r.name}, {"cases", r.cases}, {"failures", r.failures}};
    if (r.counterexample) {
      std::cout << describe(*r.counterexample);
      j["counterexample"] = describe(*r.counterexample);
    }
    ok &= r.failures == 0;
    out.push_back(j);
  }
  if (!o.out.empty()) open_out(o.out, "selftest.json") << out.dump(2) << "\n";
  return ok ? kExitOk : kExitViolated;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Signal temporal logic robustness-to-go toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "rotogo 1.0");

  CommonOptions common;
  std::string formula, trace, scenario = "phi_avoid", mode, noise, modes = "robustness,rotogo";
  std::optional<double> rotogo_from;
  std::size_t episodes = 100, cases = 1000;
  unsigned threads = 0;
  bool mutant = false, no_traces = false;

  auto* monitor = app.add_subcommand("monitor", "Evaluate a formula on a trace (exit 0 satisfied, 1 violated)");
  monitor->add_option("--formula", formula, "Formula text")->required();
  monitor->add_option("--trace", trace, "Trace CSV")->required();
  monitor->add_option("--rotogo-from", rotogo_from, "Also report robustness-to-go from this time (s)");
  add_common(monitor, common);

  auto* prog = app.add_subcommand("progress", "Print the progressed formula after each sample");
  prog->add_option("--formula", formula, "Formula text")->required();
  prog->add_option("--trace", trace, "Trace CSV")->required();
  add_common(prog, common);

  auto* plan = app.add_subcommand("plan", "Optimize the first plan of a mission");
  plan->add_option("--scenario", scenario, "Built-in scenario (phi_avoid, phi_stayin)");
  plan->add_option("--mode", mode, "Objective mode (robustness, rotogo)");
  add_common(plan, common);

  auto* run = app.add_subcommand("run", "Simulate one closed-loop episode");
  run->add_option("--scenario", scenario, "Built-in scenario (phi_avoid, phi_stayin)");
  run->add_option("--mode", mode, "Objective mode (robustness, rotogo)");
  run->add_option("--noise", noise, "Noise preset (default, static, sec7, table2, appendix, *_m2)");
  add_common(run, common);

  auto* bench = app.add_subcommand("bench", "Run a batch of episodes per mode and aggregate statistics");
  bench->add_option("--scenario", scenario, "Built-in scenario (phi_avoid, phi_stayin)");
  bench->add_option("--modes", modes, "Comma-separated objective modes");
  bench->add_option("--episodes", episodes, "Episodes per mode")->check(CLI::PositiveNumber);
  bench->add_option("--noise", noise, "Noise preset");
  bench->add_option("--threads", threads, "Worker threads (0: all cores)");
  bench->add_flag("--no-traces", no_traces, "Skip per-episode trace files");
  add_common(bench, common);

  auto* self = app.add_subcommand("selftest", "Run the randomized property suite");
  self->add_option("--cases", cases, "Instances per property");
  self->add_flag("--mutant", mutant, "Use a deliberately broken progression rule")->group("");
  add_common(self, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*monitor) return cmd_monitor(common, formula, trace, rotogo_from);
    if (*prog) return cmd_progress(common, formula, trace);
    if (*plan) return cmd_plan(common, scenario, mode);
    if (*run) return cmd_run(common, scenario, mode, noise);
    if (*bench) return cmd_bench(common, scenario, modes, episodes, noise, threads, no_traces);
    if (*self) return cmd_selftest(common, cases, mutant);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
