#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

#include "rotogo/formula.hpp"
#include "rotogo/semantics.hpp"
#include "rotogo/signal.hpp"

namespace rotogo {

class ProgressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDefaultMaxFormulaSize = 10'000;

namespace detail {

inline Formula simplify_not(const Formula& a) {
  if (a.is_top()) return Formula::bottom();
  if (a.is_bottom()) return Formula::top();
  if (a.op() == Op::negation) return a.child();
  return Formula::negate(a);
}

inline Formula simplify_and(const Formula& a, const Formula& b) {
  if (a.is_bottom() || b.is_bottom()) return Formula::bottom();
  if (a.is_top()) return b;
  if (b.is_top()) return a;
  return Formula::conj(a, b);
}

inline Formula simplify_or(const Formula& a, const Formula& b) {
  if (a.is_top() || b.is_top()) return Formula::top();
  if (a.is_bottom()) return b;
  if (b.is_bottom()) return a;
  return Formula::disj(a, b);
}

inline Formula simplify_until(const Formula& a, const Interval& i, const Formula& b) {
  if (i.is_empty()) return Formula::bottom();
  if (a.is_bottom() && !i.contains_zero()) return Formula::bottom();
  return Formula::until(a, i, b);
}

}  // namespace detail

/// Rewrites with: !!a -> a, !T -> F, !F -> T, T & a -> a, F & a -> F,
/// F | a -> a, T | a -> T, a U_{empty} b -> F, F U_I b -> F when 0 notin I.
/// Children are simplified first, so one bottom-up pass reaches the fixed point.
inline Formula simplify(const Formula& f) {
  auto same = [](const Formula& a, const Formula& b) { return a.identity() == b.identity(); };
  switch (f.op()) {
    case Op::top:
    case Op::bottom:
    case Op::pred: return f;
    case Op::negation: {
      const Formula c = simplify(f.child());
      if (same(c, f.child()) && !c.is_verdict() && c.op() != Op::negation) return f;
      return detail::simplify_not(c);
    }
    case Op::conjunction:
    case Op::disjunction: {
      const Formula a = simplify(f.lhs());
      const Formula b = simplify(f.rhs());
      if (same(a, f.lhs()) && same(b, f.rhs()) && !a.is_verdict() && !b.is_verdict()) return f;
      return f.op() == Op::conjunction ? detail::simplify_and(a, b) : detail::simplify_or(a, b);
    }
    case Op::until: {
      const Formula a = simplify(f.lhs());
      const Formula b = simplify(f.rhs());
      if (same(a, f.lhs()) && same(b, f.rhs()) && !f.interval().is_empty() &&
          !(a.is_bottom() && !f.interval().contains_zero()))
        return f;
      return detail::simplify_until(a, f.interval(), b);
    }
  }
  return f;
}

namespace detail {

// Progression that applies the simplification rules as nodes are built, so the
// raw progressed tree is never materialized.
inline Formula progress_rec(const Formula& f, TimePoint delta, const State& x) {
  switch (f.op()) {
    case Op::top:
    case Op::bottom: return f;
    case Op::pred: return f.predicate().evaluate(x) > 0 ? Formula::top() : Formula::bottom();
    case Op::negation: return simplify_not(progress_rec(f.child(), delta, x));
    case Op::conjunction: return simplify_and(progress_rec(f.lhs(), delta, x), progress_rec(f.rhs(), delta, x));
    case Op::disjunction: return simplify_or(progress_rec(f.lhs(), delta, x), progress_rec(f.rhs(), delta, x));
    case Op::until: {
      const Interval& i = f.interval();
      const Interval shifted = shift_truncate(i, delta);
      // phi U_{I<-delta} psi, with U over the empty interval = false
      Formula rest = simplify_and(progress_rec(f.lhs(), delta, x), simplify_until(f.lhs(), shifted, f.rhs()));
      if (i.contains_zero()) return simplify_or(progress_rec(f.rhs(), delta, x), rest);
      return rest;
    }
  }
  return f;
}

}  // namespace detail

/// Formula progression P(f, delta, x): the formula that, evaluated at t + delta,
/// accounts for having observed state x at time t.
inline Formula progress(const Formula& f, TimePoint delta, const State& x,
                        std::size_t max_size = kDefaultMaxFormulaSize) {
  if (delta.ticks <= 0) throw ProgressionError("progression step must be positive");
  Formula out = simplify(detail::progress_rec(f, delta, x));
  if (out.size() > max_size)
    throw ProgressionError("progressed formula exceeds " + std::to_string(max_size) + " nodes");
  return out;
}

using ProgressFn = std::function<Formula(const Formula&, TimePoint, const State&)>;

inline ProgressFn default_progress() {
  return [](const Formula& f, TimePoint d, const State& x) { return progress(f, d, x); };
}

// ---------------------------------------------------------------------------
// Incremental monitor

struct MonitorState {
  Formula current;
  TimePoint anchor_time;
  Formula original;
  std::size_t step_count = 0;

  static MonitorState start(const Formula& f, TimePoint t0) { return {f, t0, f, 0}; }

  bool has_verdict() const { return current.is_verdict(); }
};

/// Consumes the state observed at m.anchor_time and re-anchors at next_sample_time.
inline MonitorState monitor_step(const MonitorState& m, TimePoint next_sample_time, const State& x) {
  if (!(m.anchor_time < next_sample_time)) throw ProgressionError("monitor time must strictly increase");
  MonitorState out = m;
  if (!m.current.is_verdict()) out.current = progress(m.current, next_sample_time - m.anchor_time, x);
  out.anchor_time = next_sample_time;
  ++out.step_count;
  return out;
}

/// Progresses f0 through samples 0..cut_index, then evaluates plain robustness
/// of the result at sample cut_index + 1. Equals rotogo(s, t0, t_cut, f0).
inline ExtReal rotogo_via_progression(const Signal& s, std::size_t cut_index, const Formula& f0,
                                      const ProgressFn& prog = default_progress(), EvalStats* stats = nullptr) {
  if (s.size() < 2 || cut_index + 1 >= s.size()) throw ProgressionError("cut_index out of range");
  Formula f = f0;
  for (std::size_t k = 0; k <= cut_index; ++k) f = prog(f, s.time(k + 1) - s.time(k), s.state(k));
  return robustness(s, s.time(cut_index + 1), f, stats);
}

}  // namespace rotogo
