#include <gtest/gtest.h>

#include <sstream>

#include "rotogo/dynamics.hpp"
#include "rotogo/ext_real.hpp"
#include "rotogo/signal.hpp"

using namespace rotogo;

namespace {

TimePoint sec(double s) { return TimePoint::from_seconds(s); }

State st(double x, double y = 0, double vx = 0, double vy = 0, double xe = 0, double ye = 0) {
  return State({x, y, vx, vy}, {xe, ye});
}

Signal grid(std::size_t n, double dt) {
  Signal s;
  for (std::size_t i = 0; i < n; ++i) s.push_back({sec(dt * static_cast<double>(i)), st(static_cast<double>(i))});
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// ExtReal

TEST(ExtReal, OrderingAndArithmetic) {
  const ExtReal ni = ExtReal::neg_inf(), pi = ExtReal::pos_inf(), z = ExtReal(0.0);
  EXPECT_LT(ni, z);
  EXPECT_LT(z, pi);
  EXPECT_EQ(-pi, ni);
  EXPECT_EQ(min(ni, z), ni);
  EXPECT_EQ(max(ni, pi), pi);
  EXPECT_EQ(ExtReal::inf_times_sign(0.0), ni);
  EXPECT_EQ(ExtReal::inf_times_sign(-0.0), ni);
  EXPECT_EQ(ExtReal::inf_times_sign(1e-300), pi);
  EXPECT_THROW(ExtReal::finite(std::nan("")), std::invalid_argument);
}

TEST(ExtReal, TextRoundTrip) {
  for (ExtReal v : {ExtReal::pos_inf(), ExtReal::neg_inf(), ExtReal(0.1), ExtReal(-1e-7), ExtReal(3.0)})
    EXPECT_EQ(ExtReal::parse(v.to_string()), v) << v.to_string();
  EXPECT_THROW(ExtReal::parse("abc"), std::invalid_argument);
  EXPECT_FALSE(ExtReal(0.0).identical(ExtReal(-0.0)));
  EXPECT_TRUE(ExtReal(0.0) == ExtReal(-0.0));
}

// ---------------------------------------------------------------------------
// Signal

TEST(Signal, RejectsNonIncreasingTimes) {
  EXPECT_THROW(Signal({{sec(0), st(0)}, {sec(0), st(1)}}), SignalError);
  EXPECT_THROW(Signal({{sec(1), st(0)}, {sec(0.5), st(1)}}), SignalError);
  Signal s = grid(3, 0.1);
  EXPECT_THROW(s.push_back({sec(0.2), st(0)}), SignalError);
}

TEST(Signal, ValueAtOnlyAtSampleTimes) {
  const Signal s = grid(5, 0.1);
  EXPECT_EQ(value_at(s, sec(0.3))[Var::x], 3.0);
  EXPECT_THROW(value_at(s, sec(0.25)), SignalError);
  EXPECT_THROW(value_at(s, sec(1.0)), SignalError);
}

// Brute-force oracle: filter every sample by interval membership.
TEST(Signal, TimesInMatchesLinearFilter) {
  std::mt19937_64 rng(5);
  for (int n = 0; n < 1000; ++n) {
    Signal s;
    TimePoint t = sec(std::uniform_int_distribution<int>(0, 4)(rng) * 0.5);
    const int len = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int i = 0; i < len; ++i) {
      s.push_back({t, st(i)});
      t = t + sec(std::uniform_int_distribution<int>(1, 3)(rng) * 0.5);
    }
    auto ri = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const int a = ri(0, 10), b = ri(a + 1, 12);
    const Interval iv = ri(0, 4) == 0 ? Interval::unbounded(sec(a * 0.5), ri(0, 1) == 1)
                                      : Interval::make(sec(a * 0.5), TimeBound::finite(sec(b * 0.5)), ri(0, 1) == 1,
                                                       ri(0, 1) == 1);
    const TimePoint offset = sec(ri(0, 10) * 0.5);
    std::vector<TimePoint> expect;
    for (const auto& smp : s.samples())
      if (iv.contains(smp.t - offset)) expect.push_back(smp.t);
    EXPECT_EQ(times_in(s, iv, offset), expect) << iv.to_string() << " + " << format_seconds(offset);
  }
}

TEST(Signal, TimesInEmptyInterval) {
  const Signal s = grid(5, 0.1);
  EXPECT_TRUE(times_in(s, Interval::empty(), sec(0)).empty());
}

TEST(Signal, ConcatDropsDuplicatedSeam) {
  const Signal a = grid(3, 1.0);
  Signal b({{sec(2), st(99)}, {sec(3), st(3)}});
  const Signal c = Signal::concat(a, b);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c.state(2)[Var::x], 2.0);  // prefix value wins at the seam
  EXPECT_EQ(c.state(3)[Var::x], 3.0);
  EXPECT_THROW(Signal::concat(a, Signal({{sec(1), st(0)}})), SignalError);
}

// ---------------------------------------------------------------------------
// Dynamics

TEST(Dynamics, DoubleIntegratorExamples) {
  const RobotState s = robot_step({0, 0, 0, 0}, {1, 0}, 1.0);
  EXPECT_DOUBLE_EQ(s.x, 0.5);
  EXPECT_DOUBLE_EQ(s.vx, 1.0);
  EXPECT_EQ(s.y, 0.0);
  const RobotState r = robot_step({1, 2, 0.5, -0.5}, {0, 0}, 0.1);
  EXPECT_DOUBLE_EQ(r.x, 1.05);
  EXPECT_DOUBLE_EQ(r.y, 1.95);
  EXPECT_THROW(robot_step({}, {}, 0.0), std::invalid_argument);
}

TEST(Dynamics, ConstantAccelerationMatchesClosedForm) {
  RobotState s{1, -1, 0.3, 0.2};
  const Control u{0.4, -0.7};
  for (int i = 0; i < 50; ++i) s = robot_step(s, u, 0.1);
  const double t = 5.0;
  EXPECT_NEAR(s.x, 1 + 0.3 * t + 0.5 * 0.4 * t * t, 1e-12);
  EXPECT_NEAR(s.y, -1 + 0.2 * t - 0.5 * 0.7 * t * t, 1e-12);
  EXPECT_NEAR(s.vx, 0.3 + 0.4 * t, 1e-12);
  EXPECT_NEAR(s.vy, 0.2 - 0.7 * t, 1e-12);
}

TEST(Dynamics, EnvironmentStaticWithZeroNoise) {
  Rng rng(1);
  const Rng before = rng;
  Disturbance w{9, 9};
  const EnvState e = env_step({1.5, 2.5}, rng, 0.0, &w);
  EXPECT_EQ(e, (EnvState{1.5, 2.5}));
  EXPECT_EQ(w, (Disturbance{0, 0}));
  EXPECT_TRUE(rng == before);
}

TEST(Dynamics, EnvironmentNoiseStatistics) {
  Rng rng(42);
  const double sd = 0.05;
  const int n = 200'000;
  double s1 = 0, s2 = 0, s11 = 0, s22 = 0, s12 = 0;
  for (int i = 0; i < n; ++i) {
    Disturbance w;
    env_step({0, 0}, rng, sd, &w);
    s1 += w.w1, s2 += w.w2, s11 += w.w1 * w.w1, s22 += w.w2 * w.w2, s12 += w.w1 * w.w2;
  }
  const double m1 = s1 / n, m2 = s2 / n;
  EXPECT_NEAR(m1, 0.0, 5 * sd / std::sqrt(n));
  EXPECT_NEAR(m2, 0.0, 5 * sd / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(s11 / n), sd, 0.01 * sd);
  EXPECT_NEAR(std::sqrt(s22 / n), sd, 0.01 * sd);
  EXPECT_NEAR(s12 / n / (sd * sd), 0.0, 0.02);
}

// ---------------------------------------------------------------------------
// Trace CSV and validation

namespace {

std::vector<TraceRow> simulate(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<TraceRow> rows;
  RobotState r{0.5, 2.5, 0, 0};
  EnvState e{2.5, 2.5};
  for (std::size_t i = 0; i < n; ++i) {
    TraceRow row;
    row.sample = {sec(0.1 * static_cast<double>(i)), State(r, e)};
    row.u = Control{std::sin(0.3 * static_cast<double>(i)), std::cos(0.2 * static_cast<double>(i))};
    Disturbance w;
    const EnvState en = env_step(e, rng, 0.05, &w);
    row.w = w;
    rows.push_back(row);
    r = robot_step(r, *row.u, 0.1);
    e = en;
  }
  return rows;
}

}  // namespace

TEST(Trace, SimulatedTraceValidates) {
  const auto rows = simulate(50, 3);
  EXPECT_TRUE(validate_trace(rows, sec(0.1), DoubleIntegrator{}).valid);
}

TEST(Trace, ValidationLocatesTamperedTransition) {
  auto rows = simulate(50, 3);
  rows[20].sample.state[Var::vy] += 1e-6;
  const auto rep = validate_trace(rows, sec(0.1), DoubleIntegrator{});
  EXPECT_FALSE(rep.valid);
  EXPECT_EQ(rep.violation_index, 19u);
  auto rows2 = simulate(50, 3);
  rows2[7].w->w2 += 1e-6;
  const auto rep2 = validate_trace(rows2, sec(0.1), DoubleIntegrator{});
  EXPECT_FALSE(rep2.valid);
  EXPECT_EQ(rep2.violation_index, 7u);
}

TEST(Trace, CsvRoundTripIsExact) {
  const auto rows = simulate(30, 9);
  std::stringstream ss;
  write_trace_csv(ss, rows);
  const auto back = read_trace_csv(ss);
  ASSERT_EQ(back.size(), rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(back[i].sample.t, rows[i].sample.t);
    EXPECT_EQ(back[i].sample.state, rows[i].sample.state);
    EXPECT_EQ(*back[i].u, *rows[i].u);
    EXPECT_EQ(*back[i].w, *rows[i].w);
  }
  EXPECT_TRUE(validate_trace(back, sec(0.1), DoubleIntegrator{}).valid);
}

TEST(Trace, CsvRejectsMalformedInput) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    EXPECT_THROW(read_trace_csv(in), SignalError) << text;
  };
  bad("");
  bad("t,x\n0,1\n");
  bad("t,x,y,vx,vy,xe,ye\n");
  bad("t,x,y,vx,vy,xe,ye\n0,1,2,3,4,5\n");
  bad("t,x,y,vx,vy,xe,ye\n0,1,2,3,4,5,abc\n");
  bad("t,x,y,vx,vy,xe,ye\n0,1,2,3,4,5,6\n0,1,2,3,4,5,6\n");
  std::istringstream ok("t,x,y,vx,vy,xe,ye\r\n0,1,2,3,4,5,6\r\n0.1,1,2,3,4,5,6\n");
  EXPECT_EQ(read_trace_csv(ok).size(), 2u);
}
