#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rotogo/progression.hpp"
#include "rotogo/semantics.hpp"

namespace rotogo {

/// Random (formula, signal) corpus on a half-second grid so that interval
/// endpoints and sample times collide often.
struct CorpusConfig {
  std::uint64_t seed = 0x5EED;
  int max_depth = 4;
  int max_temporal = 3;
  int max_interval_halfsteps = 20;  // interval endpoints in [0, 10] s
  std::size_t min_samples = 3;
  std::size_t max_samples = 10;
  /// Allow predicate values that are exactly zero.
  bool exact_zeros = true;
};

class CorpusGenerator {
 public:
  explicit CorpusGenerator(const CorpusConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  Formula formula() {
    int budget = cfg_.max_temporal;
    return gen(cfg_.max_depth, budget);
  }

  Signal signal() {
    const auto n = static_cast<std::size_t>(uniform_int(static_cast<int>(cfg_.min_samples), static_cast<int>(cfg_.max_samples)));
    std::vector<Sample> samples;
    TimePoint t = half_steps(uniform_int(0, 4));
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) t = t + half_steps(uniform_int(1, 3));
      samples.push_back({t, state()});
    }
    return Signal(std::move(samples));
  }

  /// Fresh state values for sample mutation tests.
  State state() {
    State s;
    for (double& v : s.values) v = value();
    return s;
  }

  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  static TimePoint half_steps(int k) { return TimePoint{static_cast<std::int64_t>(k) * kTicksPerSecond / 2}; }

  double value() {
    const double r = uniform(0.0, 1.0);
    if (cfg_.exact_zeros && r < 0.1) return 0.0;
    if (r < 0.6) {
      const double mag = std::pow(10.0, uniform(-6.0, -2.0));
      return uniform(0.0, 1.0) < 0.5 ? -mag : mag;
    }
    return uniform(-3.0, 3.0);
  }

  PredicateExpr predicate() {
    const auto var = [&] { return PredicateExpr::variable(static_cast<Var>(uniform_int(0, kNumVars - 1))); };
    switch (uniform_int(0, 5)) {
      case 0:
      case 1:
      case 2: return var();
      case 3: {
        const int a = uniform_int(0, kNumVars - 1);
        const int b = (a + uniform_int(1, kNumVars - 1)) % kNumVars;
        return PredicateExpr::variable(static_cast<Var>(a)) - PredicateExpr::variable(static_cast<Var>(b));
      }
      case 4: return var() * var();
      default: return var() + PredicateExpr::constant(uniform_int(-2, 2) * 0.5);
    }
  }

  Interval interval() {
    const int a = uniform_int(0, cfg_.max_interval_halfsteps - 1);
    const int b = uniform_int(a + 1, cfg_.max_interval_halfsteps);
    return Interval::make(half_steps(a), TimeBound::finite(half_steps(b)), uniform_int(0, 1) == 1,
                          uniform_int(0, 1) == 1);
  }

  Formula gen(int depth, int& temporal_budget) {
    if (depth <= 1) {
      const int r = uniform_int(0, 19);
      if (r == 0) return Formula::top();
      if (r == 1) return Formula::bottom();
      return Formula::pred(predicate());
    }
    const int choice = uniform_int(0, temporal_budget > 0 ? 8 : 4);
    switch (choice) {
      case 0: return Formula::pred(predicate());
      case 1: return Formula::negate(gen(depth - 1, temporal_budget));
      case 2: {
        Formula a = gen(depth - 1, temporal_budget);
        return Formula::conj(a, gen(depth - 1, temporal_budget));
      }
      case 3:
      case 4: {
        Formula a = gen(depth - 1, temporal_budget);
        return Formula::disj(a, gen(depth - 1, temporal_budget));
      }
      case 5:
      case 6: {
        --temporal_budget;
        const Interval i = interval();
        Formula a = gen(depth - 1, temporal_budget);
        return Formula::until(a, i, gen(depth - 1, temporal_budget));
      }
      case 7: {
        --temporal_budget;
        const Interval i = interval();
        return Formula::eventually(i, gen(depth - 1, temporal_budget));
      }
      default: {
        --temporal_budget;
        const Interval i = interval();
        return Formula::globally(i, gen(depth - 1, temporal_budget));
      }
    }
  }

  CorpusConfig cfg_;
  std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Properties. Each check returns a failure description, or nothing on success.

using PropertyCheck = std::function<std::optional<std::string>(const Formula&, const Signal&)>;

namespace detail {

inline std::string mismatch(const char* what, ExtReal a, ExtReal b) {
  return std::string(what) + ": " + a.to_string() + " != " + b.to_string();
}

}  // namespace detail

/// rotogo_via_progression(s, i, f) == rotogo(s, t0, t_i, f) for every cut i.
inline PropertyCheck progression_equivalence_check(ProgressFn prog = default_progress()) {
  return [prog](const Formula& f, const Signal& s) -> std::optional<std::string> {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      const ExtReal direct = rotogo(s, s.time(0), s.time(i), f);
      const ExtReal progressed = rotogo_via_progression(s, i, f, prog);
      if (!(direct == progressed))
        return "cut " + std::to_string(i) + ": " + detail::mismatch("progressed vs direct", progressed, direct);
    }
    return std::nullopt;
  };
}

/// (rotogo > 0) <=> sat at the first sample, for t_hat before the signal, at
/// its first sample, and at an interior sample.
inline PropertyCheck sign_consistency_property() {
  return [](const Formula& f, const Signal& s) -> std::optional<std::string> {
    const TimePoint t0 = s.time(0);
    for (TimePoint t_hat : {t0 - TimePoint{kTicksPerSecond}, t0, s.time(s.size() / 2)})
      if (!sign_consistency_check(s, f, t_hat))
        return "t_hat = " + format_seconds(t_hat) + ": rotogo " + rotogo(s, t0, t_hat, f).to_string() + ", sat " +
               (sat(s, t0, f) ? "true" : "false");
    return std::nullopt;
  };
}

/// t_hat before the signal: rotogo == robustness at every sample.
inline PropertyCheck early_mask_check() {
  return [](const Formula& f, const Signal& s) -> std::optional<std::string> {
    const TimePoint t_hat = s.time(0) - TimePoint{1};
    for (std::size_t k = 0; k < s.size(); ++k) {
      const ExtReal a = rotogo(s, s.time(k), t_hat, f);
      const ExtReal b = robustness(s, s.time(k), f);
      if (!(a == b)) return "k = " + std::to_string(k) + ": " + detail::mismatch("rotogo vs robustness", a, b);
    }
    return std::nullopt;
  };
}

/// rotogo(s, t_k, t_k, f) == robustness(s, t_{k+1}, P(f, t_{k+1} - t_k, s(t_k))).
inline PropertyCheck single_step_check() {
  return [](const Formula& f, const Signal& s) -> std::optional<std::string> {
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const ExtReal a = rotogo(s, s.time(k), s.time(k), f);
      const ExtReal b = robustness(s, s.time(k + 1), progress(f, s.time(k + 1) - s.time(k), s.state(k)));
      if (!(a == b)) return "k = " + std::to_string(k) + ": " + detail::mismatch("single step", a, b);
    }
    return std::nullopt;
  };
}

/// For t_hat >= t_{k+1}: rotogo(s, t_k, t_hat, f) == rotogo(s, t_{k+1}, t_hat, P(f, ..., s(t_k))).
inline PropertyCheck masked_step_check() {
  return [](const Formula& f, const Signal& s) -> std::optional<std::string> {
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      const Formula p = progress(f, s.time(k + 1) - s.time(k), s.state(k));
      for (std::size_t h = k + 1; h < s.size(); ++h) {
        const ExtReal a = rotogo(s, s.time(k), s.time(h), f);
        const ExtReal b = rotogo(s, s.time(k + 1), s.time(h), p);
        if (!(a == b))
          return "k = " + std::to_string(k) + ", t_hat index " + std::to_string(h) + ": " +
                 detail::mismatch("masked step", a, b);
      }
    }
    return std::nullopt;
  };
}

/// Progressing k steps then evaluating rotogo from t_k with t_hat = t_j
/// (j >= k) equals rotogo of the original from t0, for every intermediate k.
inline PropertyCheck chain_check() {
  return [](const Formula& f, const Signal& s) -> std::optional<std::string> {
    Formula phi = f;
    for (std::size_t k = 0; k < s.size(); ++k) {
      for (std::size_t j = k; j < s.size(); ++j) {
        const ExtReal a = rotogo(s, s.time(0), s.time(j), f);
        const ExtReal b = rotogo(s, s.time(k), s.time(j), phi);
        if (!(a == b))
          return "k = " + std::to_string(k) + ", j = " + std::to_string(j) + ": " + detail::mismatch("chain", a, b);
      }
      if (k + 1 < s.size()) phi = progress(phi, s.time(k + 1) - s.time(k), s.state(k));
    }
    return std::nullopt;
  };
}

/// robustness(f) == robustness(simplify(f)) at every sample, bit-exact.
inline PropertyCheck simplify_check() {
  return [](const Formula& f, const Signal& s) -> std::optional<std::string> {
    const Formula g = simplify(f);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const ExtReal a = robustness(s, s.time(k), f);
      const ExtReal b = robustness(s, s.time(k), g);
      if (!(a == b)) return "k = " + std::to_string(k) + ": " + detail::mismatch("simplify", a, b);
    }
    return std::nullopt;
  };
}

/// Suffix-only dependence: after progressing through samples 0..i, mutating
/// any of those samples leaves robustness(s, t_{i+1}, phi_{i+1}) unchanged.
inline PropertyCheck suffix_only_check(std::uint64_t seed) {
  return [seed](const Formula& f, const Signal& s) -> std::optional<std::string> {
    CorpusGenerator gen(CorpusConfig{seed ^ s.size()});
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      Formula phi = f;
      for (std::size_t k = 0; k <= i; ++k) phi = progress(phi, s.time(k + 1) - s.time(k), s.state(k));
      const ExtReal before = robustness(s, s.time(i + 1), phi);
      Signal mutated = s;
      for (std::size_t k = 0; k <= i; ++k) mutated.mutable_sample(k).state = gen.state();
      const ExtReal after = robustness(mutated, mutated.time(i + 1), phi);
      if (!(before == after))
        return "cut " + std::to_string(i) + ": " + detail::mismatch("prefix mutation", before, after);
    }
    return std::nullopt;
  };
}

// ---------------------------------------------------------------------------
// Shrinking

struct Counterexample {
  Formula formula;
  Signal signal;
  std::string detail;
};

namespace detail {

// All formulas obtained by replacing exactly one subtree of f with T or F.
inline void one_step_replacements(const Formula& f, std::vector<Formula>& out) {
  if (!f.is_verdict()) {
    out.push_back(Formula::top());
    out.push_back(Formula::bottom());
  }
  std::vector<Formula> sub;
  switch (f.op()) {
    case Op::top:
    case Op::bottom:
    case Op::pred: return;
    case Op::negation:
      one_step_replacements(f.child(), sub);
      for (auto& c : sub) out.push_back(Formula::negate(c));
      return;
    case Op::conjunction:
    case Op::disjunction:
    case Op::until: {
      auto rebuild = [&](const Formula& a, const Formula& b) {
        if (f.op() == Op::conjunction) return Formula::conj(a, b);
        if (f.op() == Op::disjunction) return Formula::disj(a, b);
        return Formula::until(a, f.interval(), b);
      };
      one_step_replacements(f.lhs(), sub);
      for (auto& c : sub) out.push_back(rebuild(c, f.rhs()));
      sub.clear();
      one_step_replacements(f.rhs(), sub);
      for (auto& c : sub) out.push_back(rebuild(f.lhs(), c));
      return;
    }
  }
}

}  // namespace detail

/// Greedy shrinking: repeatedly take the first smaller formula (one subtree
/// replaced by T/F) or shorter signal (first or last sample dropped) that
/// still fails, until no candidate fails.
inline Counterexample shrink(const Formula& f, const Signal& s, const PropertyCheck& check) {
  Counterexample best{f, s, check(f, s).value_or("")};
  auto fails = [&](const Formula& g, const Signal& t) -> std::optional<std::string> {
    try {
      return check(g, t);
    } catch (const std::exception& e) {
      return std::string("exception: ") + e.what();
    }
  };
  for (bool progress_made = true; progress_made;) {
    progress_made = false;
    std::vector<Formula> candidates;
    detail::one_step_replacements(best.formula, candidates);
    for (const auto& g : candidates) {
      if (g.size() >= best.formula.size()) continue;
      if (auto why = fails(g, best.signal)) {
        best = {g, best.signal, *why};
        progress_made = true;
        break;
      }
    }
    if (progress_made || best.signal.size() <= 2) continue;
    for (int drop_first = 0; drop_first < 2 && !progress_made; ++drop_first) {
      std::vector<Sample> smp = best.signal.samples();
      if (drop_first) smp.erase(smp.begin());
      else smp.pop_back();
      Signal t(std::move(smp));
      if (auto why = fails(best.formula, t)) {
        best = {best.formula, t, *why};
        progress_made = true;
      }
    }
  }
  return best;
}

inline std::string describe(const Counterexample& c) {
  std::ostringstream os;
  os << "formula: " << format(c.formula) << "\n";
  os << "signal (" << c.signal.size() << " samples):\n";
  for (const auto& smp : c.signal.samples()) {
    os << "  t=" << format_seconds(smp.t);
    for (int v = 0; v < kNumVars; ++v) os << " " << kVarNames[v] << "=" << detail::csv_number(smp.state.values[v]);
    os << "\n";
  }
  os << "failure: " << c.detail << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Suite runner

struct PropertyReport {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::optional<Counterexample> counterexample;  // shrunk first failure
};

struct SelftestOptions {
  std::uint64_t seed = 0x5EED;
  std::size_t cases = 1000;
  ProgressFn progression = default_progress();
};

/// Runs `check` on `cases` fresh corpus instances.
inline PropertyReport run_property(const std::string& name, const PropertyCheck& check, std::size_t cases,
                                   const CorpusConfig& corpus, std::size_t signals_per_formula = 1) {
  PropertyReport r{name, 0, 0, std::nullopt};
  CorpusGenerator gen(corpus);
  for (std::size_t c = 0; c < cases; ++c) {
    const Formula f = gen.formula();
    for (std::size_t j = 0; j < signals_per_formula; ++j) {
      const Signal s = gen.signal();
      ++r.cases;
      std::optional<std::string> why;
      try {
        why = check(f, s);
      } catch (const std::exception& e) {
        why = std::string("exception: ") + e.what();
      }
      if (!why) continue;
      ++r.failures;
      if (!r.counterexample) r.counterexample = shrink(f, s, check);
    }
  }
  return r;
}

/// The full property suite. Sign consistency runs on a corpus without exact
/// zero predicate values; see sign_consistency_check for the boundary case.
inline std::vector<PropertyReport> run_selftest(const SelftestOptions& opt) {
  CorpusConfig base;
  base.seed = opt.seed;
  CorpusConfig nonzero = base;
  nonzero.exact_zeros = false;
  auto derive = [&](CorpusConfig c, std::uint64_t salt) {
    c.seed = opt.seed * 0x100000001B3ull + salt;
    return c;
  };
  std::vector<PropertyReport> out;
  out.push_back(run_property("progression_equals_rotogo", progression_equivalence_check(opt.progression), opt.cases, derive(base, 1)));
  out.push_back(run_property("sign_consistency", sign_consistency_property(), opt.cases, derive(nonzero, 2)));
  out.push_back(run_property("early_mask_equals_robustness", early_mask_check(), opt.cases, derive(base, 3)));
  out.push_back(run_property("single_step_progression", single_step_check(), opt.cases, derive(base, 4)));
  out.push_back(run_property("masked_single_step", masked_step_check(), opt.cases, derive(base, 5)));
  out.push_back(run_property("progression_chain", chain_check(), opt.cases, derive(base, 6)));
  out.push_back(run_property("simplify_preserves_robustness", simplify_check(), opt.cases, derive(base, 7), 20));
  out.push_back(run_property("suffix_only_dependence", suffix_only_check(opt.seed), opt.cases / 5, derive(base, 8)));
  return out;
}

namespace detail {

inline Formula mutant_progress_rec(const Formula& f, TimePoint d, const State& x) {
  switch (f.op()) {
    case Op::top:
    case Op::bottom: return f;
    case Op::pred: return f.predicate().evaluate(x) > 0 ? Formula::top() : Formula::bottom();
    case Op::negation: return simplify_not(mutant_progress_rec(f.child(), d, x));
    case Op::conjunction: return simplify_and(mutant_progress_rec(f.lhs(), d, x), mutant_progress_rec(f.rhs(), d, x));
    case Op::disjunction: return simplify_or(mutant_progress_rec(f.lhs(), d, x), mutant_progress_rec(f.rhs(), d, x));
    case Op::until:
      return simplify_and(mutant_progress_rec(f.lhs(), d, x),
                          simplify_until(f.lhs(), shift_truncate(f.interval(), d), f.rhs()));
  }
  return f;
}

}  // namespace detail

/// A deliberately wrong progression rule (drops the "psi now" disjunct of the
/// until case) used to check that the suite detects and shrinks failures.
inline ProgressFn mutant_progress() {
  return [](const Formula& f, TimePoint d, const State& x) { return simplify(detail::mutant_progress_rec(f, d, x)); };
}

}  // namespace rotogo
