#pragma once

#include <random>
#include <stdexcept>

#include "rotogo/state.hpp"

namespace rotogo {

/// Exact zero-order-hold integration of the planar double integrator.
inline RobotState robot_step(const RobotState& s, const Control& u, double dt) {
  if (!(dt > 0)) throw std::invalid_argument("robot_step requires dt > 0");
  RobotState n;
  n.x = s.x + s.vx * dt + 0.5 * u.ax * dt * dt;
  n.y = s.y + s.vy * dt + 0.5 * u.ay * dt * dt;
  n.vx = s.vx + u.ax * dt;
  n.vy = s.vy + u.ay * dt;
  return n;
}

struct DoubleIntegrator {
  RobotState operator()(const RobotState& s, const Control& u, double dt) const { return robot_step(s, u, dt); }
};

using Rng = std::mt19937_64;

/// One environment update x_e <- x_e + w with w ~ N(0, std^2 I). Draws w1
/// then w2 from the stream. A zero std leaves the state (and stream) untouched.
inline EnvState env_step(const EnvState& e, Rng& rng, double noise_std, Disturbance* drawn = nullptr) {
  Disturbance w;
  if (noise_std > 0) {
    std::normal_distribution<double> n(0.0, noise_std);
    w.w1 = n(rng);
    w.w2 = n(rng);
  }
  if (drawn) *drawn = w;
  return {e.xe + w.w1, e.ye + w.w2};
}

}  // namespace rotogo
