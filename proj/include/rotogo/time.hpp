#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace rotogo {

/// Seconds per tick. All times are integer microseconds so that interval
/// membership tests are exact.
inline constexpr double kSecondsPerTick = 1e-6;
inline constexpr std::int64_t kTicksPerSecond = 1'000'000;

struct TimePoint {
  std::int64_t ticks = 0;

  constexpr TimePoint() = default;
  constexpr explicit TimePoint(std::int64_t t) : ticks(t) {}

  static TimePoint from_seconds(double seconds, double seconds_per_tick = kSecondsPerTick) {
    if (!std::isfinite(seconds)) throw std::invalid_argument("time must be finite");
    return TimePoint{static_cast<std::int64_t>(std::llround(seconds / seconds_per_tick))};
  }

  constexpr double seconds() const { return static_cast<double>(ticks) * kSecondsPerTick; }

  constexpr auto operator<=>(const TimePoint&) const = default;

  constexpr TimePoint operator+(TimePoint o) const { return TimePoint{ticks + o.ticks}; }
  constexpr TimePoint operator-(TimePoint o) const { return TimePoint{ticks - o.ticks}; }
  constexpr TimePoint& operator+=(TimePoint o) {
    ticks += o.ticks;
    return *this;
  }
};

inline TimePoint seconds(double s) { return TimePoint::from_seconds(s); }

/// Exact decimal rendering of a tick count in seconds ("19.9", "0.000001", "-2").
inline std::string format_seconds(TimePoint t) {
  std::int64_t v = t.ticks;
  std::string out;
  if (v < 0) {
    out.push_back('-');
    v = -v;
  }
  out += std::to_string(v / kTicksPerSecond);
  std::int64_t frac = v % kTicksPerSecond;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += "." + digits;
  }
  return out;
}

/// A time value that may be +infinity (interval upper bounds, formula horizons).
struct TimeBound {
  TimePoint value{};
  bool infinite = false;

  static constexpr TimeBound finite(TimePoint t) { return TimeBound{t, false}; }
  static constexpr TimeBound infinity() { return TimeBound{TimePoint{0}, true}; }

  constexpr bool is_infinite() const { return infinite; }

  constexpr bool operator==(const TimeBound& o) const {
    return infinite == o.infinite && (infinite || value == o.value);
  }
  constexpr std::strong_ordering operator<=>(const TimeBound& o) const {
    if (infinite && o.infinite) return std::strong_ordering::equal;
    if (infinite) return std::strong_ordering::greater;
    if (o.infinite) return std::strong_ordering::less;
    return value <=> o.value;
  }

  constexpr TimeBound operator+(TimeBound o) const {
    if (infinite || o.infinite) return infinity();
    return finite(value + o.value);
  }
};

inline std::string format_bound(const TimeBound& b) {
  return b.is_infinite() ? std::string("inf") : format_seconds(b.value);
}

}  // namespace rotogo
