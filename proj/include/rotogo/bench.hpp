#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rotogo/mpc.hpp"

namespace rotogo {

/// Aggregate of one (problem, mode) batch. Infinite final robustness values
/// are left out of the mean and counted instead.
struct StatsRow {
  std::string problem;
  std::string mode;
  double mean_robustness = std::numeric_limits<double>::quiet_NaN();  // NaN if no finite value
  std::size_t pos_inf_count = 0;
  std::size_t neg_inf_count = 0;
  double mean_min_distance = 0;
  double success_rate = 0;
  std::size_t episodes = 0;
  std::size_t failed_episodes = 0;
};

inline StatsRow batch_stats(const std::vector<RunResult>& results) {
  if (results.empty()) throw std::invalid_argument("batch_stats needs at least one result");
  StatsRow row;
  row.problem = results.front().problem;
  row.mode = mode_name(results.front().mode);
  row.episodes = results.size();
  double rob_sum = 0, dist_sum = 0;
  std::size_t finite = 0, successes = 0;
  for (const auto& r : results) {
    if (r.final_robustness.is_pos_inf()) ++row.pos_inf_count;
    else if (r.final_robustness.is_neg_inf()) ++row.neg_inf_count;
    else {
      rob_sum += r.final_robustness.value();
      ++finite;
    }
    dist_sum += r.min_distance;
    successes += r.success ? 1 : 0;
  }
  if (finite > 0) row.mean_robustness = rob_sum / static_cast<double>(finite);
  row.mean_min_distance = dist_sum / static_cast<double>(results.size());
  row.success_rate = static_cast<double>(successes) / static_cast<double>(results.size());
  return row;
}

struct BenchSpec {
  ScenarioConfig scenario;
  std::vector<ObjectiveMode> modes = {ObjectiveMode::robustness, ObjectiveMode::rotogo};
  std::size_t episodes = 100;
  std::uint64_t base_seed = 0;
  std::string out_dir;  // empty: no files
  unsigned threads = 0;  // 0: hardware concurrency
  bool write_traces = true;

  void validate() const {
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (modes.empty()) throw ConfigError("at least one mode is required");
    scenario.validate();
  }
};

struct EpisodeOutcome {
  std::size_t episode = 0;
  std::uint64_t seed = 0;
  ObjectiveMode mode = ObjectiveMode::rotogo;
  std::optional<RunResult> result;
  std::string error;
};

struct BenchResult {
  std::vector<StatsRow> rows;                  // one per mode, in spec order
  std::vector<EpisodeOutcome> outcomes;        // mode-major, then episode order
};

/// Runs `count` jobs on a worker pool; job i's output lands in slot i.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  if (threads <= 1) {
    worker();
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

inline StatsRow stats_for(const std::vector<EpisodeOutcome>& outcomes, const std::string& problem, ObjectiveMode mode) {
  std::vector<RunResult> ok;
  std::size_t failed = 0;
  for (const auto& o : outcomes) {
    if (o.mode != mode) continue;
    if (o.result) ok.push_back(*o.result);
    else ++failed;
  }
  StatsRow row;
  if (!ok.empty()) row = batch_stats(ok);
  row.problem = problem;
  row.mode = mode_name(mode);
  row.failed_episodes = failed;
  return row;
}

/// Episode i of every mode uses seed base_seed + i, so modes are paired.
inline BenchResult run_bench(const BenchSpec& spec) {
  spec.validate();
  BenchResult out;
  const std::size_t jobs = spec.modes.size() * spec.episodes;
  out.outcomes.resize(jobs);
  parallel_for(jobs, spec.threads, [&](std::size_t j) {
    EpisodeOutcome& o = out.outcomes[j];
    o.mode = spec.modes[j / spec.episodes];
    o.episode = j % spec.episodes;
    o.seed = spec.base_seed + o.episode;
    ScenarioConfig cfg = spec.scenario;
    cfg.mode = o.mode;
    cfg.seed = o.seed;
    try {
      o.result = mpc_run(cfg);
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  });
  for (ObjectiveMode m : spec.modes) out.rows.push_back(stats_for(out.outcomes, spec.scenario.name, m));
  return out;
}

// ---------------------------------------------------------------------------
// Output formats

inline constexpr const char* kStatsHeader = "problem,mode,mean_robustness,mean_min_distance,success_rate,episodes";

inline std::string stats_number(double v) {
  if (std::isnan(v)) return "nan";
  return detail::csv_number(v);
}

inline std::string stats_csv(const std::vector<StatsRow>& rows) {
  std::string s = std::string(kStatsHeader) + "\n";
  for (const auto& r : rows)
    s += r.problem + "," + r.mode + "," + stats_number(r.mean_robustness) + "," + stats_number(r.mean_min_distance) +
         "," + stats_number(r.success_rate) + "," + std::to_string(r.episodes) + "\n";
  return s;
}

/// Extended reals go to JSON as numbers, or as the strings "+inf"/"-inf".
inline nlohmann::json ext_real_json(ExtReal v) {
  if (v.is_finite()) return v.value();
  return v.to_string();
}

inline ExtReal ext_real_from_json(const nlohmann::json& j) {
  if (j.is_string()) return ExtReal::parse(j.get<std::string>());
  return ExtReal(j.get<double>());
}

inline std::string trace_file_name(const std::string& problem, ObjectiveMode mode, std::size_t episode) {
  return problem + "_" + mode_name(mode) + "_" + std::to_string(episode) + ".csv";
}

inline nlohmann::json episode_json(const EpisodeOutcome& o, const std::string& problem, bool with_trace) {
  nlohmann::json j = {{"problem", problem}, {"mode", mode_name(o.mode)}, {"episode", o.episode}, {"seed", o.seed}};
  if (!o.result) {
    j["error"] = o.error;
    return j;
  }
  const RunResult& r = *o.result;
  j["final_robustness"] = ext_real_json(r.final_robustness);
  j["success"] = r.success;
  j["min_distance"] = r.min_distance;
  j["replans"] = r.replans.size();
  std::size_t retained = 0;
  for (const auto& p : r.replans) retained += p.retained ? 1 : 0;
  j["retained_plans"] = retained;
  if (with_trace) j["trace"] = "traces/" + trace_file_name(problem, o.mode, o.episode);
  return j;
}

inline nlohmann::json stats_detail_json(const std::vector<StatsRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j = {{"problem", r.problem},
                        {"mode", r.mode},
                        {"episodes", r.episodes},
                        {"failed_episodes", r.failed_episodes},
                        {"pos_inf_robustness", r.pos_inf_count},
                        {"neg_inf_robustness", r.neg_inf_count}};
    j["mean_robustness"] = std::isnan(r.mean_robustness) ? nlohmann::json(nullptr) : nlohmann::json(r.mean_robustness);
    j["mean_min_distance"] = r.mean_min_distance;
    j["success_rate"] = r.success_rate;
    arr.push_back(j);
  }
  return arr;
}

/// Writes stats.csv, stats_detail.json, runs.jsonl and traces/*.csv into
/// spec.out_dir. Single writer; called after all episodes finished.
inline void write_bench_outputs(const BenchSpec& spec, const BenchResult& res) {
  namespace fs = std::filesystem;
  const fs::path dir(spec.out_dir);
  fs::create_directories(dir);
  auto open = [](const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    return f;
  };
  open(dir / "stats.csv") << stats_csv(res.rows);
  open(dir / "stats_detail.json") << stats_detail_json(res.rows).dump(2) << "\n";
  auto jsonl = open(dir / "runs.jsonl");
  if (spec.write_traces) fs::create_directories(dir / "traces");
  for (const auto& o : res.outcomes) {
    jsonl << episode_json(o, spec.scenario.name, spec.write_traces && o.result).dump() << "\n";
    if (spec.write_traces && o.result) {
      auto f = open(dir / "traces" / trace_file_name(spec.scenario.name, o.mode, o.episode));
      write_trace_csv(f, o.result->trace);
    }
  }
}

}  // namespace rotogo
