#pragma once

// Brute-force reference evaluators written directly from the textbook
// definitions. They share nothing with the library's evaluators except the
// Formula tree they walk and predicate evaluation: time is handled as double
// seconds, interval membership is tested endpoint by endpoint, and every
// quantifier enumerates the full sample set.

#include <cmath>
#include <limits>
#include <vector>

#include "rotogo/formula.hpp"
#include "rotogo/signal.hpp"

namespace oracle {

using rotogo::Formula;
using rotogo::Op;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Trace {
  std::vector<double> times;  // seconds
  std::vector<rotogo::State> states;
};

inline Trace from_signal(const rotogo::Signal& s) {
  Trace t;
  for (const auto& smp : s.samples()) {
    t.times.push_back(static_cast<double>(smp.t.ticks) / 1e6);
    t.states.push_back(smp.state);
  }
  return t;
}

inline double seconds(rotogo::TimePoint t) { return static_cast<double>(t.ticks) / 1e6; }

/// tau - t lies in interval i.
inline bool in_interval(const rotogo::Interval& i, double t, double tau) {
  const double d = tau - t;
  const double lo = seconds(i.lower());
  if (i.lower_closed() ? d < lo : d <= lo) return false;
  if (i.upper().is_infinite()) return true;
  const double hi = seconds(i.upper().value);
  return i.upper_closed() ? d <= hi : d < hi;
}

// Boolean semantics.
inline bool sat(const Trace& s, std::size_t k, const Formula& f) {
  switch (f.op()) {
    case Op::top: return true;
    case Op::bottom: return false;
    case Op::pred: return f.predicate().evaluate(s.states[k]) > 0;
    case Op::negation: return !sat(s, k, f.child());
    case Op::conjunction: return sat(s, k, f.lhs()) && sat(s, k, f.rhs());
    case Op::disjunction: return sat(s, k, f.lhs()) || sat(s, k, f.rhs());
    case Op::until:
      for (std::size_t j = 0; j < s.times.size(); ++j) {
        if (!in_interval(f.interval(), s.times[k], s.times[j])) continue;
        if (!sat(s, j, f.rhs())) continue;
        bool all = true;
        for (std::size_t m = 0; m < s.times.size(); ++m)
          if (s.times[m] >= s.times[k] && s.times[m] < s.times[j] && !sat(s, m, f.lhs())) all = false;
        if (all) return true;
      }
      return false;
  }
  return false;
}

/// Quantitative semantics. With mask_until = -inf this is plain robustness;
/// otherwise predicates at sample times <= mask_until score +-inf by sign.
inline double rho(const Trace& s, std::size_t k, const Formula& f, double mask_until) {
  switch (f.op()) {
    case Op::top: return kInf;
    case Op::bottom: return -kInf;
    case Op::pred: {
      const double v = f.predicate().evaluate(s.states[k]);
      if (s.times[k] > mask_until) return v;
      return v > 0 ? kInf : -kInf;
    }
    case Op::negation: return -rho(s, k, f.child(), mask_until);
    case Op::conjunction: return std::min(rho(s, k, f.lhs(), mask_until), rho(s, k, f.rhs(), mask_until));
    case Op::disjunction: return std::max(rho(s, k, f.lhs(), mask_until), rho(s, k, f.rhs(), mask_until));
    case Op::until: {
      double sup = -kInf;
      for (std::size_t j = 0; j < s.times.size(); ++j) {
        if (!in_interval(f.interval(), s.times[k], s.times[j])) continue;
        double inf = kInf;
        for (std::size_t m = 0; m < s.times.size(); ++m)
          if (s.times[m] >= s.times[k] && s.times[m] < s.times[j]) inf = std::min(inf, rho(s, m, f.lhs(), mask_until));
        sup = std::max(sup, std::min(rho(s, j, f.rhs(), mask_until), inf));
      }
      return sup;
    }
  }
  return 0;
}

inline double robustness(const Trace& s, std::size_t k, const Formula& f) { return rho(s, k, f, -kInf); }
inline double rotogo(const Trace& s, std::size_t k, double t_hat, const Formula& f) { return rho(s, k, f, t_hat); }

/// Time horizon in seconds (inf if unbounded).
inline double horizon(const Formula& f) {
  switch (f.op()) {
    case Op::top:
    case Op::bottom:
    case Op::pred: return 0;
    case Op::negation: return oracle::horizon(f.child());
    case Op::conjunction:
    case Op::disjunction: return std::max(oracle::horizon(f.lhs()), oracle::horizon(f.rhs()));
    case Op::until: {
      if (f.interval().upper().is_infinite()) return kInf;
      return seconds(f.interval().upper().value) + std::max(oracle::horizon(f.lhs()), oracle::horizon(f.rhs()));
    }
  }
  return 0;
}

}  // namespace oracle
