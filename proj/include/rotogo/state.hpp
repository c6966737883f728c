#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace rotogo {

/// Signal components visible to predicates.
enum class Var : int { x = 0, y, vx, vy, xe, ye };

inline constexpr int kNumVars = 6;
inline constexpr std::array<std::string_view, kNumVars> kVarNames = {"x", "y", "vx", "vy", "xe", "ye"};

inline std::optional<Var> var_from_name(std::string_view name) {
  for (int i = 0; i < kNumVars; ++i)
    if (kVarNames[i] == name) return static_cast<Var>(i);
  return std::nullopt;
}

inline std::string_view var_name(Var v) { return kVarNames[static_cast<int>(v)]; }

struct RobotState {
  double x = 0, y = 0, vx = 0, vy = 0;
  bool operator==(const RobotState&) const = default;
};

struct EnvState {
  double xe = 0, ye = 0;
  bool operator==(const EnvState&) const = default;
};

/// Control input u = (ax, ay).
struct Control {
  double ax = 0, ay = 0;
  bool operator==(const Control&) const = default;
};

/// Environment disturbance w = (w1, w2).
struct Disturbance {
  double w1 = 0, w2 = 0;
  bool operator==(const Disturbance&) const = default;
};

/// Composed robot/environment state s(t).
struct State {
  std::array<double, kNumVars> values{};

  State() = default;
  State(const RobotState& r, const EnvState& e) : values{r.x, r.y, r.vx, r.vy, e.xe, e.ye} {}

  double operator[](Var v) const { return values[static_cast<int>(v)]; }
  double& operator[](Var v) { return values[static_cast<int>(v)]; }

  RobotState robot() const { return {values[0], values[1], values[2], values[3]}; }
  EnvState env() const { return {values[4], values[5]}; }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool operator==(const State&) const = default;
};

}  // namespace rotogo
