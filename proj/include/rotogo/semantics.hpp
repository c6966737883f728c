#pragma once

#include <cstddef>
#include <vector>

#include "rotogo/ext_real.hpp"
#include "rotogo/formula.hpp"
#include "rotogo/signal.hpp"

namespace rotogo {

/// Counts which samples an evaluation reads. Used to check that evaluating a
/// progressed formula never revisits the executed prefix.
struct EvalStats {
  std::vector<char> touched;
  std::size_t predicate_evaluations = 0;

  void reset(std::size_t n) {
    touched.assign(n, 0);
    predicate_evaluations = 0;
  }
  void touch(std::size_t k) {
    if (k >= touched.size()) touched.resize(k + 1, 0);
    touched[k] = 1;
    ++predicate_evaluations;
  }
  std::size_t distinct_samples() const {
    std::size_t n = 0;
    for (char c : touched) n += c != 0;
    return n;
  }
  std::size_t earliest_touched() const {
    for (std::size_t k = 0; k < touched.size(); ++k)
      if (touched[k]) return k;
    return touched.size();
  }
};

/// Which predicate value determined a finite robustness, and at which sample.
/// value == sign * predicate->evaluate(signal.state(sample)).
struct Witness {
  const PredicateExpr* predicate = nullptr;
  std::size_t sample = 0;
  int sign = 1;
};

struct Witnessed {
  ExtReal value;
  Witness witness;
};

namespace detail {

// Value algebra for the quantitative evaluator. ExtReal is the plain case;
// Witnessed threads the argmin/argmax witness through min/max/negation.
inline ExtReal v_top(ExtReal*) { return ExtReal::pos_inf(); }
inline ExtReal v_bottom(ExtReal*) { return ExtReal::neg_inf(); }
inline ExtReal v_neg(ExtReal a) { return -a; }
inline ExtReal v_min(ExtReal a, ExtReal b) { return min(a, b); }
inline ExtReal v_max(ExtReal a, ExtReal b) { return max(a, b); }
inline bool v_is_bottom(ExtReal a) { return a.is_neg_inf(); }

inline Witnessed v_top(Witnessed*) { return {ExtReal::pos_inf(), {}}; }
inline Witnessed v_bottom(Witnessed*) { return {ExtReal::neg_inf(), {}}; }
inline Witnessed v_neg(Witnessed a) {
  a.value = -a.value;
  a.witness.sign = -a.witness.sign;
  return a;
}
inline Witnessed v_min(const Witnessed& a, const Witnessed& b) { return b.value < a.value ? b : a; }
inline Witnessed v_max(const Witnessed& a, const Witnessed& b) { return a.value < b.value ? b : a; }
inline bool v_is_bottom(const Witnessed& a) { return a.value.is_neg_inf(); }

/// Shared recursion for robustness and robustness-to-go; the two differ only
/// in how a predicate at sample k is scored (`leaf`).
template <class Value, class Leaf>
Value quantitative(const Signal& s, std::size_t k, const Formula& f, Leaf& leaf) {
  switch (f.op()) {
    case Op::top: return v_top(static_cast<Value*>(nullptr));
    case Op::bottom: return v_bottom(static_cast<Value*>(nullptr));
    case Op::pred: return leaf(f.predicate(), k);
    case Op::negation: return v_neg(quantitative<Value>(s, k, f.child(), leaf));
    case Op::conjunction:
      return v_min(quantitative<Value>(s, k, f.lhs(), leaf), quantitative<Value>(s, k, f.rhs(), leaf));
    case Op::disjunction:
      return v_max(quantitative<Value>(s, k, f.lhs(), leaf), quantitative<Value>(s, k, f.rhs(), leaf));
    case Op::until: {
      // sup_{t' in I+t} min(rho(psi, t'), inf_{t'' in [t, t')} rho(phi, t''))
      const auto [first, last] = s.index_range(f.interval(), s.time(k));
      Value best = v_bottom(static_cast<Value*>(nullptr));
      Value prefix_inf = v_top(static_cast<Value*>(nullptr));
      const Formula lhs = f.lhs();
      const Formula rhs = f.rhs();
      std::size_t m = k;
      for (std::size_t j = first; j < last; ++j) {
        for (; m < j; ++m) prefix_inf = v_min(prefix_inf, quantitative<Value>(s, m, lhs, leaf));
        if (v_is_bottom(prefix_inf)) break;  // every later candidate is -inf as well
        best = v_max(best, v_min(quantitative<Value>(s, j, rhs, leaf), prefix_inf));
      }
      return best;
    }
  }
  return v_bottom(static_cast<Value*>(nullptr));
}

inline bool boolean(const Signal& s, std::size_t k, const Formula& f) {
  switch (f.op()) {
    case Op::top: return true;
    case Op::bottom: return false;
    case Op::pred: return f.predicate().evaluate(s.state(k)) > 0;
    case Op::negation: return !boolean(s, k, f.child());
    case Op::conjunction: return boolean(s, k, f.lhs()) && boolean(s, k, f.rhs());
    case Op::disjunction: return boolean(s, k, f.lhs()) || boolean(s, k, f.rhs());
    case Op::until: {
      const auto [first, last] = s.index_range(f.interval(), s.time(k));
      for (std::size_t j = first; j < last; ++j) {
        if (!boolean(s, j, f.rhs())) continue;
        bool holds = true;
        for (std::size_t m = k; m < j && holds; ++m) holds = boolean(s, m, f.lhs());
        if (holds) return true;
      }
      return false;
    }
  }
  return false;
}

struct RobustnessLeaf {
  const Signal& s;
  EvalStats* stats;
  ExtReal operator()(const PredicateExpr& p, std::size_t k) const {
    if (stats) stats->touch(k);
    return ExtReal(p.evaluate(s.state(k)));
  }
};

struct RotogoLeaf {
  const Signal& s;
  TimePoint t_hat;
  EvalStats* stats;
  ExtReal operator()(const PredicateExpr& p, std::size_t k) const {
    if (stats) stats->touch(k);
    const double v = p.evaluate(s.state(k));
    return s.time(k) > t_hat ? ExtReal(v) : ExtReal::inf_times_sign(v);
  }
};

struct WitnessLeaf {
  const Signal& s;
  Witnessed operator()(const PredicateExpr& p, std::size_t k) const {
    return {ExtReal(p.evaluate(s.state(k))), {&p, k, 1}};
  }
};

}  // namespace detail

/// Boolean satisfaction (s, t) |= f. Quantifiers range over sample times.
inline bool sat(const Signal& s, TimePoint t, const Formula& f) { return detail::boolean(s, s.index_of(t), f); }

/// Robust satisfaction value rho(s, t, f).
inline ExtReal robustness(const Signal& s, TimePoint t, const Formula& f, EvalStats* stats = nullptr) {
  detail::RobustnessLeaf leaf{s, stats};
  return detail::quantitative<ExtReal>(s, s.index_of(t), f, leaf);
}

/// Robustness-to-go from t_hat: predicates at sample times <= t_hat score
/// +inf if satisfied and -inf otherwise.
inline ExtReal rotogo(const Signal& s, TimePoint t, TimePoint t_hat, const Formula& f, EvalStats* stats = nullptr) {
  detail::RotogoLeaf leaf{s, t_hat, stats};
  return detail::quantitative<ExtReal>(s, s.index_of(t), f, leaf);
}

inline Witnessed robustness_with_witness(const Signal& s, TimePoint t, const Formula& f) {
  detail::WitnessLeaf leaf{s};
  return detail::quantitative<Witnessed>(s, s.index_of(t), f, leaf);
}

/// (rotogo > 0) <=> sat, both evaluated at the first sample.
inline bool sign_consistency_check(const Signal& s, const Formula& f, TimePoint t_hat) {
  const TimePoint t0 = s.time(0);
  return rotogo(s, t0, t_hat, f).positive() == sat(s, t0, f);
}

}  // namespace rotogo
