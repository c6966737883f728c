#include <gtest/gtest.h>

#include "oracle.hpp"
#include "rotogo/parser.hpp"
#include "rotogo/progression.hpp"
#include "rotogo/selftest.hpp"

using namespace rotogo;

namespace {

TimePoint sec(double s) { return TimePoint::from_seconds(s); }
State sx(double x, double y = 0) { return State({x, y, 0, 0}, {0, 0}); }

AliasTable pq() { return {{"p", parse_formula("(x > 0)")}, {"q", parse_formula("(y > 0)")}}; }

void expect_property(const PropertyCheck& check, std::size_t cases, CorpusConfig corpus, std::size_t per = 1) {
  const PropertyReport r = run_property("property", check, cases, corpus, per);
  EXPECT_EQ(r.cases, cases * per);
  EXPECT_EQ(r.failures, 0u) << (r.counterexample ? describe(*r.counterexample) : "");
}

}  // namespace

// ---------------------------------------------------------------------------
// progress()

TEST(Progress, Verdicts) {
  EXPECT_TRUE(progress(Formula::top(), sec(0.1), sx(0)).is_top());
  EXPECT_TRUE(progress(Formula::bottom(), sec(0.1), sx(0)).is_bottom());
  const Formula p = parse_formula("x > 4");
  EXPECT_TRUE(progress(p, sec(0.1), sx(5)).is_top());
  EXPECT_TRUE(progress(p, sec(0.1), sx(3)).is_bottom());
  EXPECT_TRUE(progress(p, sec(0.1), sx(4)).is_bottom());
}

TEST(Progress, GloballyShrinksItsWindow) {
  const AliasTable a = pq();
  const Formula g = parse_formula("G[0,20] p", a);
  EXPECT_EQ(progress(g, sec(0.1), sx(1)), parse_formula("G[0,19.9] p", a));
  EXPECT_TRUE(progress(g, sec(0.1), sx(-1)).is_bottom());
}

TEST(Progress, EventuallyResolvesOrShrinks) {
  const AliasTable a = pq();
  const Formula f = parse_formula("F[0,2] p", a);
  EXPECT_TRUE(progress(f, sec(0.5), sx(1)).is_top());
  EXPECT_EQ(progress(f, sec(0.5), sx(-1)), parse_formula("F[0,1.5] p", a));
  // Positive lower bound: the current sample is irrelevant.
  EXPECT_EQ(progress(parse_formula("F[1,2] p", a), sec(0.5), sx(1)), parse_formula("F[0.5,1.5] p", a));
  // Window passed entirely: false.
  EXPECT_TRUE(progress(parse_formula("F[0,0.5) p", a), sec(0.5), sx(-1)).is_bottom());
}

TEST(Progress, RejectsNonPositiveStep) {
  EXPECT_THROW(progress(Formula::top(), TimePoint{0}, sx(0)), ProgressionError);
}

TEST(Progress, SizeCapIsEnforced) {
  const Formula f = parse_formula("(x > 0) U[0,5] (y > 0)");
  EXPECT_THROW(progress(f, sec(0.1), sx(1, -1), 2), ProgressionError);
  EXPECT_NO_THROW(progress(f, sec(0.1), sx(1, -1)));
}

TEST(Progress, LongMissionStaysSmall) {
  const Formula f = parse_formula("G[0,20] (x > 0) & F[0,20] (y > 0)");
  Formula cur = f;
  std::size_t max_size = 0;
  for (int k = 0; k < 200; ++k) {
    cur = progress(cur, sec(0.1), sx(1, -1));
    max_size = std::max(max_size, cur.size());
  }
  EXPECT_LE(max_size, f.size());
}

// ---------------------------------------------------------------------------
// simplify()

TEST(Simplify, Rules) {
  const AliasTable a = pq();
  const Formula p = a.at("p"), q = a.at("q");
  const Formula u = parse_formula("p U[0,5] q", a);
  EXPECT_EQ(simplify(Formula::conj(Formula::top(), p)), p);
  EXPECT_EQ(simplify(Formula::negate(Formula::negate(u))), u);
  EXPECT_TRUE(simplify(Formula::conj(Formula::bottom(), p)).is_bottom());
  EXPECT_EQ(simplify(Formula::disj(Formula::bottom(), p)), p);
  EXPECT_TRUE(simplify(Formula::disj(p, Formula::top())).is_top());
  EXPECT_TRUE(simplify(Formula::negate(Formula::top())).is_bottom());
  EXPECT_TRUE(simplify(Formula::until(p, Interval::empty(), q)).is_bottom());
  EXPECT_TRUE(simplify(Formula::until(Formula::bottom(), Interval::closed(sec(1), sec(2)), q)).is_bottom());
  // 0 in I: false U_I q still holds if q holds now.
  const Formula keep = Formula::until(Formula::bottom(), Interval::closed(sec(0), sec(2)), q);
  EXPECT_EQ(simplify(keep), keep);
}

TEST(Simplify, IsIdempotentAndNeverGrows) {
  CorpusGenerator gen(CorpusConfig{201});
  for (int n = 0; n < 2000; ++n) {
    const Formula f = gen.formula();
    const Formula g = simplify(f);
    EXPECT_LE(g.size(), f.size());
    EXPECT_EQ(simplify(g), g);
  }
}

TEST(Simplify, PreservesRobustnessBitExact) {
  expect_property(simplify_check(), 1000, CorpusConfig{202}, 20);
}

// ---------------------------------------------------------------------------
// Monitor

TEST(Monitor, VerdictIsAbsorbing) {
  MonitorState m = MonitorState::start(Formula::top(), sec(0));
  m = monitor_step(m, sec(0.1), sx(-100));
  EXPECT_TRUE(m.current.is_top());
  EXPECT_EQ(m.step_count, 1u);
  EXPECT_THROW(monitor_step(m, sec(0.1), sx(0)), ProgressionError);
}

TEST(Monitor, EventuallyBecomesTrueAtFirstWitness) {
  const Formula f = parse_formula("F[0,2] (x > 4)");
  const std::vector<double> xs = {0, 1, 5, 0, 0};
  MonitorState m = MonitorState::start(f, sec(0));
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    m = monitor_step(m, sec(0.5 * static_cast<double>(k + 1)), sx(xs[k]));
    EXPECT_EQ(m.current.is_top(), k >= 2) << k;
  }
  Signal s;
  for (std::size_t k = 0; k < xs.size(); ++k) s.push_back({sec(0.5 * static_cast<double>(k)), sx(xs[k])});
  EXPECT_TRUE(sat(s, sec(0), f));
}

TEST(Monitor, GloballyBecomesFalseAtFirstViolation) {
  const Formula f = parse_formula("G[0,2] (x > 0)");
  const std::vector<double> xs = {1, 2, -1, 3, 3};
  MonitorState m = MonitorState::start(f, sec(0));
  for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
    m = monitor_step(m, sec(0.5 * static_cast<double>(k + 1)), sx(xs[k]));
    EXPECT_EQ(m.current.is_bottom(), k >= 2) << k;
    EXPECT_FALSE(m.current.is_top());
  }
}

TEST(Monitor, FoldMatchesRepeatedProgress) {
  CorpusGenerator gen(CorpusConfig{203});
  for (int n = 0; n < 300; ++n) {
    const Formula f = gen.formula();
    const Signal s = gen.signal();
    MonitorState m = MonitorState::start(f, s.time(0));
    Formula direct = f;
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      m = monitor_step(m, s.time(k + 1), s.state(k));
      if (!direct.is_verdict()) direct = progress(direct, s.time(k + 1) - s.time(k), s.state(k));
      EXPECT_EQ(m.current, direct);
      EXPECT_EQ(m.anchor_time, s.time(k + 1));
    }
    EXPECT_EQ(m.original, f);
  }
}

// ---------------------------------------------------------------------------
// rotogo_via_progression

TEST(ViaProgression, Examples) {
  Signal s({{sec(0), sx(1)}, {sec(1), sx(2)}, {sec(2), sx(-1)}});
  EXPECT_EQ(rotogo_via_progression(s, 0, Formula::top()), ExtReal::pos_inf());
  EXPECT_EQ(rotogo_via_progression(s, 1, Formula::top()), ExtReal::pos_inf());
  const Formula f = parse_formula("F[0,2] (x > 1.5)");
  EXPECT_EQ(rotogo_via_progression(s, 0, f), robustness(s, sec(1), progress(f, sec(1), s.state(0))));
  EXPECT_EQ(rotogo_via_progression(s, 0, f), ExtReal(0.5));
  EXPECT_THROW(rotogo_via_progression(s, 2, f), ProgressionError);
  EXPECT_THROW(rotogo_via_progression(Signal({{sec(0), sx(1)}}), 0, f), ProgressionError);
}

TEST(ViaProgression, ProgressionEquivalenceAgainstOracle) {
  CorpusGenerator gen(CorpusConfig{204});
  for (int n = 0; n < 1000; ++n) {
    const Formula f = gen.formula();
    const Signal s = gen.signal();
    const oracle::Trace tr = oracle::from_signal(s);
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
      ASSERT_EQ(rotogo_via_progression(s, i, f).value(), oracle::rotogo(tr, 0, tr.times[i], f))
          << format(f) << " cut " << i;
  }
}

TEST(ViaProgression, ProgressionEquivalenceSuite) { expect_property(progression_equivalence_check(), 1000, CorpusConfig{205}); }
TEST(ViaProgression, SingleStepSuite) { expect_property(single_step_check(), 1000, CorpusConfig{206}); }
TEST(ViaProgression, MaskedStepSuite) { expect_property(masked_step_check(), 1000, CorpusConfig{207}); }
TEST(ViaProgression, ChainSuite) { expect_property(chain_check(), 1000, CorpusConfig{208}); }
TEST(ViaProgression, SuffixOnlySuite) { expect_property(suffix_only_check(209), 200, CorpusConfig{209}); }

// Robustness of a formula whose until operators all have strictly positive
// lower bounds does not read the evaluation sample's own predicates under those
// operators, so evaluating on the signal with the first sample removed and
// the operators shifted gives the same value.
TEST(ViaProgression, SupShiftForPositiveLowerBounds) {
  CorpusGenerator gen(CorpusConfig{210});
  int checked = 0;
  for (int n = 0; n < 1000 && checked < 300; ++n) {
    const Formula psi = gen.formula();
    const Signal s = gen.signal();
    if (s.size() < 2) continue;
    const Interval i = Interval::make(s.time(1) - s.time(0) + sec(gen.uniform_int(0, 4) * 0.5),
                                      TimeBound::infinity(), gen.uniform_int(0, 1) == 1, false);
    const Formula f = Formula::eventually(i, psi);
    const oracle::Trace tr = oracle::from_signal(s);
    double restricted = -oracle::kInf;
    for (std::size_t j = 1; j < s.size(); ++j)
      if (oracle::in_interval(i, tr.times[0], tr.times[j])) restricted = std::max(restricted, oracle::robustness(tr, j, psi));
    EXPECT_EQ(robustness(s, s.time(0), f).value(), restricted) << format(f);
    ++checked;
  }
  EXPECT_GE(checked, 300);
}

// ---------------------------------------------------------------------------
// Mutation detection

TEST(Selftest, DetectsAndShrinksBrokenProgression) {
  const PropertyReport r = run_property("mutant", progression_equivalence_check(mutant_progress()), 300, CorpusConfig{211});
  EXPECT_GT(r.failures, 0u);
  ASSERT_TRUE(r.counterexample);
  const Counterexample& c = *r.counterexample;
  EXPECT_TRUE(progression_equivalence_check(mutant_progress())(c.formula, c.signal).has_value());
  EXPECT_LE(c.formula.size(), 6u) << describe(c);
}

TEST(Selftest, FullSuitePasses) {
  SelftestOptions opt;
  opt.cases = 200;
  for (const auto& r : run_selftest(opt)) {
    EXPECT_EQ(r.failures, 0u) << r.name << "\n" << (r.counterexample ? describe(*r.counterexample) : "");
    EXPECT_GT(r.cases, 0u) << r.name;
  }
}
