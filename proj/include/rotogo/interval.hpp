#pragma once

#include <stdexcept>
#include <string>

#include "rotogo/time.hpp"

namespace rotogo {

class IntervalError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Time interval <a,b> with open/closed endpoints. Parsed intervals satisfy
/// 0 <= a < b; shift_truncate may additionally yield the point interval [c,c]
/// or the canonical empty interval [0,0).
class Interval {
 public:
  Interval() = default;

  /// Validated constructor for user-supplied intervals.
  static Interval make(TimePoint lower, TimeBound upper, bool lower_closed, bool upper_closed) {
    if (lower.ticks < 0) throw IntervalError("interval lower bound must be >= 0");
    if (upper.is_infinite() && upper_closed) throw IntervalError("infinite upper bound must be open");
    if (!upper.is_infinite() && !(lower < upper.value))
      throw IntervalError("interval requires lower < upper");
    return Interval(lower, upper, lower_closed, upper_closed);
  }

  static Interval closed(TimePoint a, TimePoint b) { return make(a, TimeBound::finite(b), true, true); }
  static Interval unbounded(TimePoint a, bool lower_closed = true) {
    return make(a, TimeBound::infinity(), lower_closed, false);
  }

  static Interval empty() { return Interval(TimePoint{0}, TimeBound::finite(TimePoint{0}), true, false); }

  /// Unchecked construction; only for truncation artifacts and tests.
  static Interval raw(TimePoint lower, TimeBound upper, bool lower_closed, bool upper_closed) {
    return Interval(lower, upper, lower_closed, upper_closed);
  }

  TimePoint lower() const { return lower_; }
  TimeBound upper() const { return upper_; }
  bool lower_closed() const { return lower_closed_; }
  bool upper_closed() const { return upper_closed_; }

  bool contains(TimePoint t) const {
    if (lower_closed_ ? t < lower_ : t <= lower_) return false;
    if (upper_.is_infinite()) return true;
    return upper_closed_ ? t <= upper_.value : t < upper_.value;
  }

  /// True iff no tick lies in the interval.
  bool is_empty() const {
    if (upper_.is_infinite()) return false;
    const std::int64_t first = lower_.ticks + (lower_closed_ ? 0 : 1);
    const std::int64_t last = upper_.value.ticks - (upper_closed_ ? 0 : 1);
    return first > last;
  }

  bool contains_zero() const { return contains(TimePoint{0}); }

  /// 0 < I: every member is strictly positive.
  bool strictly_positive() const {
    if (is_empty()) return false;
    return lower_.ticks > 0 || (lower_.ticks == 0 && !lower_closed_);
  }

  /// I + c
  Interval shifted(TimePoint c) const {
    TimeBound up = upper_.is_infinite() ? upper_ : TimeBound::finite(upper_.value + c);
    return Interval(lower_ + c, up, lower_closed_, upper_closed_);
  }

  bool operator==(const Interval& o) const {
    return lower_ == o.lower_ && upper_ == o.upper_ && lower_closed_ == o.lower_closed_ &&
           upper_closed_ == o.upper_closed_;
  }

  std::string to_string() const {
    return std::string(lower_closed_ ? "[" : "(") + format_seconds(lower_) + "," + format_bound(upper_) +
           (upper_closed_ ? "]" : ")");
  }

 private:
  Interval(TimePoint lower, TimeBound upper, bool lc, bool uc)
      : lower_(lower), upper_(upper), lower_closed_(lc), upper_closed_(uc) {}

  TimePoint lower_{0};
  TimeBound upper_ = TimeBound::finite(TimePoint{0});
  bool lower_closed_ = true;
  bool upper_closed_ = false;
};

/// (I - delta) intersected with [0, inf). A lower endpoint pushed below zero
/// becomes a closed 0. Empty results are returned as Interval::empty().
inline Interval shift_truncate(const Interval& i, TimePoint delta) {
  if (delta.ticks <= 0) throw IntervalError("shift_truncate requires delta > 0");
  TimePoint lower = i.lower() - delta;
  bool lower_closed = i.lower_closed();
  if (lower.ticks < 0) {
    lower = TimePoint{0};
    lower_closed = true;
  }
  TimeBound upper = i.upper();
  if (!upper.is_infinite()) {
    upper.value = upper.value - delta;
    if (upper.value.ticks < 0) return Interval::empty();
  }
  Interval out = Interval::raw(lower, upper, lower_closed, i.upper_closed());
  if (out.is_empty()) return Interval::empty();
  return out;
}

inline bool interval_contains_zero(const Interval& i) { return i.contains_zero(); }
inline bool interval_strictly_positive(const Interval& i) { return i.strictly_positive(); }

}  // namespace rotogo
