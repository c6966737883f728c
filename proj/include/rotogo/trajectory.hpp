#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rotogo/state.hpp"

namespace rotogo {

/// Decision variables of the planner: N planar via points visited at equal
/// time spacing, the last of which is the terminal rest position.
struct ViaPointPlan {
  std::vector<Eigen::Vector2d> via_points;
  double duration = 0.0;  // seconds

  Eigen::VectorXd to_vector() const {
    Eigen::VectorXd v(2 * via_points.size());
    for (std::size_t i = 0; i < via_points.size(); ++i) v.segment<2>(2 * static_cast<Eigen::Index>(i)) = via_points[i];
    return v;
  }

  static ViaPointPlan from_vector(const Eigen::VectorXd& v, double duration) {
    if (v.size() < 2 || v.size() % 2 != 0) throw std::invalid_argument("plan vector must have even size >= 2");
    ViaPointPlan p;
    p.duration = duration;
    for (Eigen::Index i = 0; i < v.size(); i += 2) p.via_points.emplace_back(v[i], v[i + 1]);
    return p;
  }
};

struct TrajectoryRow {
  double t, x, y, vx, vy, ax, ay;
};

using Trajectory = std::vector<TrajectoryRow>;

/// Piecewise-quintic minimum-jerk spline through waypoints at equal time
/// spacing: position/velocity/acceleration fixed at both ends, position
/// interpolated at interior knots, continuous up to the fourth derivative.
class MinJerkSpline {
 public:
  MinJerkSpline(const Eigen::Vector2d& p0, const Eigen::Vector2d& v0, const Eigen::Vector2d& a0,
                const std::vector<Eigen::Vector2d>& waypoints, double duration)
      : segments_(static_cast<int>(waypoints.size())), h_(duration / static_cast<double>(waypoints.size())) {
    if (waypoints.empty()) throw std::invalid_argument("spline needs at least one waypoint");
    if (!(duration > 0)) throw std::invalid_argument("spline duration must be positive");
    const int m = segments_;
    const int n = 6 * m;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, 2);
    int row = 0;
    auto put = [&](int seg, int deriv, double tau, double scale) {
      for (int k = deriv; k < 6; ++k) A(row, 6 * seg + k) += scale * falling(k, deriv) * std::pow(tau, k - deriv);
    };
    // start conditions
    for (int d = 0; d < 3; ++d) {
      put(0, d, 0.0, 1.0);
      b.row(row) = (d == 0 ? p0 : d == 1 ? v0 : a0).transpose();
      ++row;
    }
    for (int i = 0; i + 1 < m; ++i) {
      put(i, 0, h_, 1.0);
      b.row(row) = waypoints[static_cast<std::size_t>(i)].transpose();
      ++row;
      for (int d = 0; d < 5; ++d) {
        put(i, d, h_, 1.0);
        put(i + 1, d, 0.0, -1.0);
        ++row;
      }
    }
    // terminal rest at the last waypoint
    for (int d = 0; d < 3; ++d) {
      put(m - 1, d, h_, 1.0);
      if (d == 0) b.row(row) = waypoints.back().transpose();
      ++row;
    }
    coeffs_ = A.partialPivLu().solve(b);
  }

  double duration() const { return h_ * segments_; }
  int segments() const { return segments_; }
  double knot(int i) const { return h_ * i; }

  /// d-th derivative at time t (clamped to [0, duration]).
  Eigen::Vector2d eval(double t, int deriv) const {
    t = std::clamp(t, 0.0, duration());
    int seg = static_cast<int>(std::floor(t / h_));
    if (seg >= segments_) seg = segments_ - 1;
    return eval_segment(seg, t - h_ * seg, deriv);
  }

  Eigen::Vector2d eval_segment(int seg, double tau, int deriv) const {
    Eigen::Vector2d out = Eigen::Vector2d::Zero();
    for (int k = deriv; k < 6; ++k)
      out += falling(k, deriv) * std::pow(tau, k - deriv) * coeffs_.row(6 * seg + k).transpose();
    return out;
  }

 private:
  static double falling(int k, int d) {
    double r = 1.0;
    for (int i = 0; i < d; ++i) r *= static_cast<double>(k - i);
    return r;
  }

  int segments_;
  double h_;
  Eigen::MatrixXd coeffs_;
};

/// Samples the plan's spline from `start` (zero initial acceleration) at
/// `resolution_hz`. The last row is placed at the plan duration even when the
/// duration is not a whole number of grid steps.
inline Trajectory rollout(const ViaPointPlan& plan, const RobotState& start, double resolution_hz) {
  if (plan.via_points.empty()) throw std::invalid_argument("plan has no via points");
  if (!(plan.duration > 0)) throw std::invalid_argument("plan duration must be positive");
  const MinJerkSpline spline({start.x, start.y}, {start.vx, start.vy}, Eigen::Vector2d::Zero(), plan.via_points,
                             plan.duration);
  const auto steps = static_cast<long>(std::llround(plan.duration * resolution_hz));
  Trajectory out;
  out.reserve(static_cast<std::size_t>(steps + 1));
  for (long i = 0; i <= steps; ++i) {
    const double t = i == steps ? plan.duration : static_cast<double>(i) / resolution_hz;
    const Eigen::Vector2d p = spline.eval(t, 0);
    const Eigen::Vector2d v = spline.eval(t, 1);
    const Eigen::Vector2d a = spline.eval(t, 2);
    out.push_back({t, p.x(), p.y(), v.x(), v.y(), a.x(), a.y()});
  }
  return out;
}

}  // namespace rotogo
