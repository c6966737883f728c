#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "rotogo/cmaes.hpp"
#include "rotogo/dynamics.hpp"
#include "rotogo/planning.hpp"
#include "rotogo/progression.hpp"
#include "rotogo/scenario.hpp"
#include "rotogo/semantics.hpp"
#include "rotogo/trajectory.hpp"

namespace rotogo {

class MpcError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReplanRecord {
  std::size_t sample_index = 0;  // k: the plan starts at sample k
  TimePoint time;
  bool warm_start = false;
  /// The previous plan's remaining tail scored at least as well as the new
  /// optimum and was kept.
  bool retained = false;
  ViaPointPlan plan;
  /// Realized plan from the state at t_k (row 0) to the mission end.
  Trajectory trajectory;
  /// Formula the objective was evaluated against: the progressed formula
  /// anchored at t_{k+1} (rotogo mode) or the original formula (robustness mode).
  Formula formula;
  ExtReal objective;
  double cost = 0;
  /// Distinct samples read by one evaluation of the chosen plan, indexed in
  /// mission time.
  std::size_t samples_touched = 0;
  std::size_t earliest_sample_touched = 0;
};

struct RunResult {
  std::string problem;
  ObjectiveMode mode = ObjectiveMode::rotogo;
  std::uint64_t seed = 0;
  std::vector<TraceRow> trace;
  std::vector<ReplanRecord> replans;
  ExtReal final_robustness;
  bool success = false;
  double min_distance = std::numeric_limits<double>::infinity();
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Candidate suffix samples t_{k+1} .. t_end: realized plan rows 1.. paired
/// with the environment held at its currently observed value.
inline Signal plan_suffix(const Trajectory& realized, TimePoint t_k, TimePoint dt, const EnvState& env) {
  std::vector<Sample> samples;
  samples.reserve(realized.size());
  for (std::size_t i = 1; i < realized.size(); ++i) {
    const auto& r = realized[i];
    samples.push_back({t_k + TimePoint{dt.ticks * static_cast<std::int64_t>(i)}, State({r.x, r.y, r.vx, r.vy}, env)});
  }
  return Signal(std::move(samples));
}

/// Executed samples 0..k followed by the candidate suffix.
inline Signal assemble_signal(const std::vector<TraceRow>& executed, const Signal& suffix) {
  std::vector<Sample> samples;
  samples.reserve(executed.size() + suffix.size());
  for (const auto& r : executed) samples.push_back(r.sample);
  samples.insert(samples.end(), suffix.samples().begin(), suffix.samples().end());
  return Signal(std::move(samples));
}

inline double distance_to_env(const State& s, double radius) {
  return std::hypot(s[Var::x] - s[Var::xe], s[Var::y] - s[Var::ye]) - radius;
}

/// One planning problem: optimize a plan from the state observed at sample k
/// to the mission end.
struct PlanRequest {
  std::size_t k = 0;
  /// Executed trace rows 0..k (row k is the current observation).
  const std::vector<TraceRow>* executed = nullptr;
  /// The progressed formula anchored at t_{k+1} (rotogo mode) or the
  /// original formula (robustness mode).
  Formula formula;
  /// Previous replan, used for warm starting and as a fallback candidate.
  const ReplanRecord* previous = nullptr;
};

inline ReplanRecord replan(const ScenarioConfig& cfg, const PlanRequest& req) {
  const std::size_t n = cfg.sample_count();
  const std::size_t k = req.k;
  const TimePoint dt = cfg.trace_step();
  const double dt_s = dt.seconds();
  const auto& planner = cfg.planner;
  const auto& executed = *req.executed;
  const TimePoint t_k{dt.ticks * static_cast<std::int64_t>(k)};
  const TimePoint t_next = t_k + dt;
  const RobotState robot_now = executed.back().sample.state.robot();
  const EnvState env_now = executed.back().sample.state.env();
  const double duration = (TimePoint{dt.ticks * static_cast<std::int64_t>(n - 1 - k)}).seconds();

  ReplanRecord rec;
  rec.sample_index = k;
  rec.time = t_k;
  rec.formula = req.formula;

  auto objective_of = [&](const Trajectory& realized, EvalStats* stats) -> ExtReal {
    const Signal suffix = plan_suffix(realized, t_k, dt, env_now);
    if (cfg.mode == ObjectiveMode::rotogo) {
      if (!stats) return robustness(suffix, t_next, rec.formula);
      EvalStats local;
      const ExtReal v = robustness(suffix, t_next, rec.formula, &local);
      stats->reset(n);
      for (std::size_t i = 0; i < local.touched.size(); ++i)
        if (local.touched[i]) stats->touch(k + 1 + i);
      return v;
    }
    const Signal full = assemble_signal(executed, suffix);
    if (stats) stats->reset(n);
    return robustness(full, TimePoint{0}, rec.formula, stats);
  };
  auto cost_of_trajectory = [&](const Trajectory& t) {
    return plan_cost(
               t, [&](const Trajectory& x) { return objective_of(x, nullptr); }, planner.limits, cfg.workspace)
        .total;
  };
  auto realize_plan = [&](const ViaPointPlan& p) { return realize(rollout(p, robot_now, 1.0 / dt_s), robot_now, dt_s); };
  auto cost_of = [&](const Eigen::VectorXd& v) {
    return cost_of_trajectory(realize_plan(ViaPointPlan::from_vector(v, duration)));
  };

  Eigen::VectorXd x0(2 * planner.via_points);
  double sigma = planner.cmaes.initial_step_size;
  if (req.previous && req.previous->objective.positive()) {
    rec.warm_start = true;
    x0 = req.previous->plan.to_vector();
    sigma = planner.cmaes.warm_start_step_size;
  } else {
    for (int i = 0; i < planner.via_points; ++i) x0.segment<2>(2 * i) = Eigen::Vector2d(robot_now.x, robot_now.y);
  }
  CmaesConfig cc = planner.cmaes;
  cc.seed = splitmix64(cfg.seed ^ splitmix64(k + 1));
  CmaesResult res;
  try {
    res = cmaes_minimize(cost_of, x0, cc, sigma);
  } catch (const OptimizerError& e) {
    throw MpcError("optimizer failed at t = " + format_seconds(t_k) + " s: " + e.what());
  }
  rec.plan = ViaPointPlan::from_vector(res.best_x, duration);
  rec.trajectory = realize_plan(rec.plan);
  rec.cost = res.best_value;

  if (req.previous) {
    // The robot follows its plan exactly, so the unexecuted tail of the
    // previous plan is still a feasible candidate from the current state.
    const ReplanRecord& prev = *req.previous;
    Trajectory tail(prev.trajectory.begin() + static_cast<std::ptrdiff_t>(k - prev.sample_index), prev.trajectory.end());
    for (std::size_t i = 0; i < tail.size(); ++i) tail[i].t = static_cast<double>(i) * dt_s;
    const double tail_cost = cost_of_trajectory(tail);
    if (tail_cost <= rec.cost) {
      rec.retained = true;
      rec.plan = prev.plan;
      rec.plan.duration = duration;
      rec.trajectory = std::move(tail);
      rec.cost = tail_cost;
    }
  }
  EvalStats stats;
  rec.objective = objective_of(rec.trajectory, &stats);
  rec.samples_touched = stats.distinct_samples();
  rec.earliest_sample_touched = stats.earliest_touched();
  return rec;
}

/// Closed-loop simulation: replans every replan_period from the current
/// state to the mission end, executes the plan's accelerations between
/// replans, and lets the environment drift under its own noise.
inline RunResult mpc_run(const ScenarioConfig& cfg, const ProgressFn& prog = default_progress()) {
  cfg.validate();
  const Formula phi0 = cfg.parsed_formula();
  const std::size_t n = cfg.sample_count();
  const std::size_t every = cfg.replan_every();
  const TimePoint dt = cfg.trace_step();
  const double dt_s = dt.seconds();
  const TimePoint env_period = TimePoint::from_seconds(cfg.env_step_period);

  RunResult out;
  out.problem = cfg.name;
  out.mode = cfg.mode;
  out.seed = cfg.seed;
  out.trace.reserve(n);

  Rng env_rng(splitmix64(cfg.seed));
  RobotState robot = cfg.robot_start;
  EnvState env = cfg.env_start;
  Formula progressed = phi0;  // anchored at t_{k+1} after observing sample k

  for (std::size_t k = 0; k < n; ++k) {
    const TimePoint t_k{dt.ticks * static_cast<std::int64_t>(k)};
    out.trace.push_back({{t_k, State(robot, env)}, std::nullopt, std::nullopt});
    if (k + 1 == n) break;
    const TimePoint t_next = t_k + dt;

    if (!progressed.is_verdict()) progressed = prog(progressed, dt, State(robot, env));

    if (k % every == 0) {
      PlanRequest req;
      req.k = k;
      req.executed = &out.trace;
      req.formula = cfg.mode == ObjectiveMode::rotogo ? progressed : phi0;
      req.previous = out.replans.empty() ? nullptr : &out.replans.back();
      ReplanRecord rec = replan(cfg, req);
      out.replans.push_back(std::move(rec));
    }

    Control u;
    if (!out.replans.empty()) {
      const ReplanRecord& plan = out.replans.back();
      const auto& row = plan.trajectory[k - plan.sample_index];
      u = {row.ax, row.ay};
    }
    Disturbance w;
    const std::int64_t env_steps = t_next.ticks / env_period.ticks - t_k.ticks / env_period.ticks;
    for (std::int64_t i = 0; i < env_steps; ++i) {
      Disturbance d;
      env_step(env, env_rng, cfg.env_noise_std, &d);
      w.w1 += d.w1;
      w.w2 += d.w2;
    }
    out.trace.back().u = u;
    out.trace.back().w = w;
    robot = robot_step(robot, u, dt_s);
    env = {env.xe + w.w1, env.ye + w.w2};
  }

  const Signal executed = to_signal(out.trace);
  out.final_robustness = robustness(executed, TimePoint{0}, phi0);
  out.success = out.final_robustness.positive();
  for (const auto& s : executed.samples())
    out.min_distance = std::min(out.min_distance, distance_to_env(s.state, cfg.distance_radius));
  return out;
}

/// The first plan of a mission, from the configured initial state.
inline ReplanRecord plan_from_start(const ScenarioConfig& cfg) {
  cfg.validate();
  const Formula phi0 = cfg.parsed_formula();
  if (cfg.sample_count() < 2) throw MpcError("mission has no future samples to plan");
  const std::vector<TraceRow> executed = {{{TimePoint{0}, State(cfg.robot_start, cfg.env_start)}, {}, {}}};
  PlanRequest req;
  req.executed = &executed;
  req.formula = cfg.mode == ObjectiveMode::rotogo ? progress(phi0, cfg.trace_step(), executed[0].sample.state) : phi0;
  return replan(cfg, req);
}

}  // namespace rotogo
