#pragma once

#include <cmath>
#include <functional>

#include "rotogo/dynamics.hpp"
#include "rotogo/ext_real.hpp"
#include "rotogo/trajectory.hpp"

namespace rotogo {

struct Workspace {
  double x_min = 0, x_max = 5, y_min = 0, y_max = 5;
  bool contains(double x, double y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

struct PlanLimits {
  double v_max = 0.5;  // m/s per axis
  double a_max = 1.0;  // m/s^2 per axis
  double limit_penalty = 1e6;
  double workspace_penalty = 1e8;
};

/// Robustness values of +/-inf enter the cost as -/+ this magnitude.
inline constexpr double kInfiniteRobustnessCost = 1e9;

inline double robustness_to_cost(ExtReal rho) {
  if (rho.is_pos_inf()) return -kInfiniteRobustnessCost;
  if (rho.is_neg_inf()) return kInfiniteRobustnessCost;
  return -rho.value();
}

struct CostBreakdown {
  ExtReal objective;
  double workspace_penalty = 0;
  double limit_penalty = 0;
  double total = 0;
};

/// Penalty terms only (workspace excursions and per-axis limit violations).
inline void add_penalties(const Trajectory& traj, const PlanLimits& limits, const Workspace& ws, CostBreakdown& out) {
  for (const auto& r : traj) {
    if (!ws.contains(r.x, r.y)) out.workspace_penalty += limits.workspace_penalty;
    const double excess = std::max(0.0, std::abs(r.vx) - limits.v_max) + std::max(0.0, std::abs(r.vy) - limits.v_max) +
                          std::max(0.0, std::abs(r.ax) - limits.a_max) + std::max(0.0, std::abs(r.ay) - limits.a_max);
    out.limit_penalty += limits.limit_penalty * excess;
  }
}

/// cost = -objective + workspace penalty + limit penalty, where `objective`
/// scores the candidate (robustness of the assembled signal, or robustness
/// of the progressed formula over the suffix).
inline CostBreakdown plan_cost(const Trajectory& traj, const std::function<ExtReal(const Trajectory&)>& objective,
                               const PlanLimits& limits, const Workspace& ws) {
  CostBreakdown out;
  out.objective = objective(traj);
  add_penalties(traj, limits, ws, out);
  out.total = robustness_to_cost(out.objective) + out.workspace_penalty + out.limit_penalty;
  return out;
}

/// Executes a planned acceleration profile through the exact double-integrator
/// dynamics: row i's acceleration is held for `dt` seconds. The result is what
/// the simulator produces when it follows the plan in a static environment.
inline Trajectory realize(const Trajectory& planned, const RobotState& start, double dt) {
  Trajectory out;
  out.reserve(planned.size());
  RobotState s = start;
  for (std::size_t i = 0; i < planned.size(); ++i) {
    const auto& p = planned[i];
    out.push_back({p.t, s.x, s.y, s.vx, s.vy, p.ax, p.ay});
    if (i + 1 < planned.size()) s = robot_step(s, {p.ax, p.ay}, dt);
  }
  return out;
}

}  // namespace rotogo
