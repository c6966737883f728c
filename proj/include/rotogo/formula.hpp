#pragma once

#include <algorithm>
#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>

#include "rotogo/interval.hpp"
#include "rotogo/predicate.hpp"

namespace rotogo {

enum class Op : std::uint8_t { top, bottom, pred, negation, conjunction, disjunction, until };

/// Immutable STL formula. Copies share structure; all operations build new
/// trees. Eventually/globally/implication exist only as constructors that
/// desugar into the core nodes.
class Formula {
 public:
  Formula() : Formula(top()) {}

  static Formula top() {
    static const Formula t(make_node(Op::top));
    return t;
  }
  static Formula bottom() {
    static const Formula b(make_node(Op::bottom));
    return b;
  }

  static Formula pred(PredicateExpr f) {
    auto n = make_node(Op::pred);
    n->predicate = std::move(f);
    return Formula(std::move(n));
  }

  static Formula negate(Formula a) {
    auto n = make_node(Op::negation);
    n->size = 1 + a.size();
    n->lhs = std::move(a.node_);
    return Formula(std::move(n));
  }

  static Formula conj(Formula a, Formula b) { return binary(Op::conjunction, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Op::disjunction, std::move(a), std::move(b)); }

  static Formula until(Formula a, Interval i, Formula b) {
    auto n = make_node(Op::until);
    n->interval = i;
    n->size = 1 + a.size() + b.size();
    n->lhs = std::move(a.node_);
    n->rhs = std::move(b.node_);
    return Formula(std::move(n));
  }

  /// F_I a = true U_I a
  static Formula eventually(Interval i, Formula a) { return until(top(), i, std::move(a)); }
  /// G_I a = !F_I !a
  static Formula globally(Interval i, Formula a) { return negate(eventually(i, negate(std::move(a)))); }
  /// a -> b = !a | b
  static Formula implies(Formula a, Formula b) { return disj(negate(std::move(a)), std::move(b)); }

  Op op() const { return node_->op; }
  bool is_top() const { return node_->op == Op::top; }
  bool is_bottom() const { return node_->op == Op::bottom; }
  bool is_verdict() const { return is_top() || is_bottom(); }

  const PredicateExpr& predicate() const { return node_->predicate; }
  const Interval& interval() const { return node_->interval; }
  /// Operand of negation, or left operand of binary nodes.
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }
  Formula child() const { return lhs(); }

  /// Number of nodes in the tree (shared subtrees counted per occurrence).
  std::size_t size() const { return node_->size; }

  const void* identity() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return true;
    const Node& x = *a.node_;
    const Node& y = *b.node_;
    if (x.op != y.op || x.size != y.size) return false;
    switch (x.op) {
      case Op::top:
      case Op::bottom: return true;
      case Op::pred: return x.predicate == y.predicate;
      case Op::negation: return a.lhs() == b.lhs();
      case Op::conjunction:
      case Op::disjunction: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
      case Op::until: return x.interval == y.interval && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
    return false;
  }

 private:
  struct Node {
    Op op;
    PredicateExpr predicate;
    Interval interval;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    std::size_t size = 1;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<Node> make_node(Op op) {
    auto n = std::make_shared<Node>();
    n->op = op;
    return n;
  }

  static Formula binary(Op op, Formula a, Formula b) {
    auto n = make_node(op);
    n->size = 1 + a.size() + b.size();
    n->lhs = std::move(a.node_);
    n->rhs = std::move(b.node_);
    return Formula(std::move(n));
  }

  std::shared_ptr<const Node> node_;
};

/// Time horizon: how far into the future a signal can influence the formula.
inline TimeBound horizon(const Formula& f) {
  switch (f.op()) {
    case Op::top:
    case Op::bottom:
    case Op::pred: return TimeBound::finite(TimePoint{0});
    case Op::negation: return horizon(f.child());
    case Op::conjunction:
    case Op::disjunction: return std::max(horizon(f.lhs()), horizon(f.rhs()));
    case Op::until: return f.interval().upper() + std::max(horizon(f.lhs()), horizon(f.rhs()));
  }
  return TimeBound::infinity();
}

inline bool is_bounded(const Formula& f) { return !horizon(f).is_infinite(); }

namespace detail {

inline std::string interval_text(const Interval& i) { return i.to_string(); }

// Every composite is emitted in parentheses so the output reparses to the same
// tree regardless of operator precedence.
inline std::string format_impl(const Formula& f) {
  switch (f.op()) {
    case Op::top: return "true";
    case Op::bottom: return "false";
    case Op::pred: return "(" + f.predicate().to_string() + " > 0)";
    case Op::negation: {
      const Formula c = f.child();
      // !(true U_I !a) prints as G_I a
      if (c.op() == Op::until && c.lhs().is_top() && c.rhs().op() == Op::negation)
        return "(G" + interval_text(c.interval()) + " " + format_impl(c.rhs().child()) + ")";
      return "!" + format_impl(c);
    }
    case Op::conjunction: return "(" + format_impl(f.lhs()) + " & " + format_impl(f.rhs()) + ")";
    case Op::disjunction: return "(" + format_impl(f.lhs()) + " | " + format_impl(f.rhs()) + ")";
    case Op::until:
      if (f.lhs().is_top()) return "(F" + interval_text(f.interval()) + " " + format_impl(f.rhs()) + ")";
      return "(" + format_impl(f.lhs()) + " U" + interval_text(f.interval()) + " " + format_impl(f.rhs()) + ")";
  }
  return {};
}

}  // namespace detail

/// Render in the concrete formula grammar; parse(format(f)) == f.
inline std::string format(const Formula& f) { return detail::format_impl(f); }

}  // namespace rotogo
