#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rotogo/interval.hpp"
#include "rotogo/state.hpp"

namespace rotogo {

class SignalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Sample {
  TimePoint t;
  State state;
};

/// Finite signal with strictly increasing timestamps. Pointwise semantics:
/// a signal has values only at its sample times.
class Signal {
 public:
  Signal() = default;

  explicit Signal(std::vector<Sample> samples) : samples_(std::move(samples)) {
    for (std::size_t i = 1; i < samples_.size(); ++i)
      if (!(samples_[i - 1].t < samples_[i].t)) throw SignalError("signal timestamps must be strictly increasing");
  }

  void push_back(const Sample& s) {
    if (!samples_.empty() && !(samples_.back().t < s.t))
      throw SignalError("signal timestamps must be strictly increasing");
    samples_.push_back(s);
  }

  /// prefix ++ suffix. A suffix whose first timestamp equals the prefix's last
  /// (the seam) contributes that timestamp once, from the prefix.
  static Signal concat(const Signal& prefix, const Signal& suffix) {
    std::vector<Sample> out = prefix.samples_;
    std::size_t first = 0;
    if (!out.empty() && !suffix.empty() && suffix.samples_.front().t == out.back().t) first = 1;
    out.insert(out.end(), suffix.samples_.begin() + static_cast<std::ptrdiff_t>(first), suffix.samples_.end());
    return Signal(std::move(out));
  }

  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }
  const Sample& operator[](std::size_t i) const { return samples_[i]; }
  Sample& mutable_sample(std::size_t i) { return samples_[i]; }
  TimePoint time(std::size_t i) const { return samples_[i].t; }
  const State& state(std::size_t i) const { return samples_[i].state; }
  const std::vector<Sample>& samples() const { return samples_; }

  std::optional<std::size_t> find(TimePoint t) const {
    auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                               [](const Sample& s, TimePoint v) { return s.t < v; });
    if (it == samples_.end() || it->t != t) return std::nullopt;
    return static_cast<std::size_t>(it - samples_.begin());
  }

  std::size_t index_of(TimePoint t) const {
    auto i = find(t);
    if (!i) throw SignalError("no sample at t = " + format_seconds(t));
    return *i;
  }

  const State& value_at(TimePoint t) const { return samples_[index_of(t)].state; }

  /// Half-open index range [first, last) of samples whose time lies in i + offset.
  std::pair<std::size_t, std::size_t> index_range(const Interval& i, TimePoint offset) const {
    if (i.is_empty()) return {0, 0};
    const Interval s = i.shifted(offset);
    auto lo = std::lower_bound(samples_.begin(), samples_.end(), s.lower(),
                               [](const Sample& a, TimePoint v) { return a.t < v; });
    if (lo != samples_.end() && !s.lower_closed() && lo->t == s.lower()) ++lo;
    auto hi = samples_.end();
    if (!s.upper().is_infinite()) {
      hi = std::upper_bound(samples_.begin(), samples_.end(), s.upper().value,
                            [](TimePoint v, const Sample& a) { return v < a.t; });
      if (hi != samples_.begin() && !s.upper_closed() && (hi - 1)->t == s.upper().value) --hi;
    }
    const auto first = static_cast<std::size_t>(lo - samples_.begin());
    const auto last = static_cast<std::size_t>(hi - samples_.begin());
    return first < last ? std::pair{first, last} : std::pair<std::size_t, std::size_t>{first, first};
  }

  std::vector<TimePoint> times_in(const Interval& i, TimePoint offset) const {
    auto [first, last] = index_range(i, offset);
    std::vector<TimePoint> out;
    out.reserve(last - first);
    for (std::size_t k = first; k < last; ++k) out.push_back(samples_[k].t);
    return out;
  }

 private:
  std::vector<Sample> samples_;
};

inline const State& value_at(const Signal& s, TimePoint t) { return s.value_at(t); }
inline std::vector<TimePoint> times_in(const Signal& s, const Interval& i, TimePoint offset) {
  return s.times_in(i, offset);
}

// ---------------------------------------------------------------------------
// Trace rows and CSV

struct TraceRow {
  Sample sample;
  std::optional<Control> u;
  std::optional<Disturbance> w;
};

inline Signal to_signal(const std::vector<TraceRow>& rows) {
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (const auto& r : rows) samples.push_back(r.sample);
  return Signal(std::move(samples));
}

struct ValidationReport {
  bool valid = true;
  std::size_t violation_index = 0;  // index i of the failing transition i -> i+1
  std::string message;
};

/// Checks that every consecutive pair follows the robot dynamics and the
/// additive environment model to within `tolerance` per component.
template <class RobotDynamics>
ValidationReport validate_trace(const std::vector<TraceRow>& rows, TimePoint dt, RobotDynamics&& dynamics,
                                double tolerance = 1e-9) {
  auto violation = [](std::size_t i, std::string msg) { return ValidationReport{false, i, std::move(msg)}; };
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const TraceRow& a = rows[i];
    const TraceRow& b = rows[i + 1];
    if (b.sample.t - a.sample.t != dt) return violation(i, "sample spacing differs from dt");
    if (!a.u || !a.w) return violation(i, "row lacks control/disturbance columns");
    const RobotState expect = dynamics(a.sample.state.robot(), *a.u, dt.seconds());
    const RobotState got = b.sample.state.robot();
    if (std::abs(expect.x - got.x) > tolerance || std::abs(expect.y - got.y) > tolerance ||
        std::abs(expect.vx - got.vx) > tolerance || std::abs(expect.vy - got.vy) > tolerance)
      return violation(i, "robot state does not follow dynamics");
    const EnvState ea = a.sample.state.env();
    const EnvState eb = b.sample.state.env();
    if (std::abs(ea.xe + a.w->w1 - eb.xe) > tolerance || std::abs(ea.ye + a.w->w2 - eb.ye) > tolerance)
      return violation(i, "environment state does not follow disturbance");
  }
  return {};
}

namespace detail {

inline std::string csv_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, std::size_t line) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw SignalError("trace line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace detail

inline constexpr const char* kTraceHeader = "t,x,y,vx,vy,xe,ye";
inline constexpr const char* kTraceHeaderFull = "t,x,y,vx,vy,xe,ye,ax,ay,w1,w2";

/// Trace CSV: header `t,x,y,vx,vy,xe,ye[,ax,ay,w1,w2]`, times in seconds.
inline std::vector<TraceRow> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SignalError("trace is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  bool full = false;
  if (line == kTraceHeaderFull) full = true;
  else if (line != kTraceHeader) throw SignalError("unexpected trace header '" + line + "'");
  std::vector<TraceRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_csv(line);
    if (cells.size() != (full ? 11u : 7u)) throw SignalError("trace line " + std::to_string(lineno) + ": wrong column count");
    TraceRow r;
    r.sample.t = TimePoint::from_seconds(detail::parse_double(cells[0], lineno));
    for (int k = 0; k < kNumVars; ++k) r.sample.state.values[k] = detail::parse_double(cells[1 + k], lineno);
    if (full) {
      r.u = Control{detail::parse_double(cells[7], lineno), detail::parse_double(cells[8], lineno)};
      r.w = Disturbance{detail::parse_double(cells[9], lineno), detail::parse_double(cells[10], lineno)};
    }
    if (!rows.empty() && !(rows.back().sample.t < r.sample.t))
      throw SignalError("trace line " + std::to_string(lineno) + ": timestamps must be strictly increasing");
    rows.push_back(r);
  }
  if (rows.empty()) throw SignalError("trace has no samples");
  return rows;
}

inline std::vector<TraceRow> read_trace_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SignalError("cannot open trace file '" + path + "'");
  return read_trace_csv(in);
}

inline void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows) {
  const bool full = !rows.empty() && rows.front().u.has_value();
  out << (full ? kTraceHeaderFull : kTraceHeader) << '\n';
  for (const auto& r : rows) {
    out << format_seconds(r.sample.t);
    for (double v : r.sample.state.values) out << ',' << detail::csv_number(v);
    if (full) {
      const Control u = r.u.value_or(Control{});
      const Disturbance w = r.w.value_or(Disturbance{});
      out << ',' << detail::csv_number(u.ax) << ',' << detail::csv_number(u.ay) << ','
          << detail::csv_number(w.w1) << ',' << detail::csv_number(w.w2);
    }
    out << '\n';
  }
}

}  // namespace rotogo
