#pragma once

#include <charconv>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rotogo/state.hpp"

namespace rotogo {

/// Real-valued expression f(state) over the signal variables. A predicate
/// holds at a state iff f(state) > 0.
///
/// Nodes are stored in post-order (children precede parents), which makes
/// evaluation a single forward pass and structural equality a vector compare.
class PredicateExpr {
 public:
  enum class Kind : std::uint8_t { constant, variable, add, sub, mul, neg, pow };

  struct Node {
    Kind kind = Kind::constant;
    double value = 0.0;  // constant
    Var var = Var::x;    // variable
    int exponent = 0;    // pow
    int lhs = -1;
    int rhs = -1;
    bool operator==(const Node&) const = default;
  };

  PredicateExpr() : PredicateExpr(constant(0.0)) {}

  static PredicateExpr constant(double c) {
    if (!std::isfinite(c)) throw std::invalid_argument("predicate constant must be finite");
    Node n;
    n.kind = Kind::constant;
    n.value = c;
    return PredicateExpr(std::vector<Node>{n});
  }

  static PredicateExpr variable(Var v) {
    Node n;
    n.kind = Kind::variable;
    n.var = v;
    return PredicateExpr(std::vector<Node>{n});
  }

  friend PredicateExpr operator+(const PredicateExpr& a, const PredicateExpr& b) { return binary(Kind::add, a, b); }
  friend PredicateExpr operator-(const PredicateExpr& a, const PredicateExpr& b) { return binary(Kind::sub, a, b); }
  friend PredicateExpr operator*(const PredicateExpr& a, const PredicateExpr& b) { return binary(Kind::mul, a, b); }
  friend PredicateExpr operator-(const PredicateExpr& a) {
    std::vector<Node> nodes = *a.nodes_;
    Node n;
    n.kind = Kind::neg;
    n.lhs = static_cast<int>(nodes.size()) - 1;
    nodes.push_back(n);
    return PredicateExpr(std::move(nodes));
  }

  /// Integer power, exponent >= 0.
  PredicateExpr pow(int exponent) const {
    if (exponent < 0) throw std::invalid_argument("predicate exponent must be >= 0");
    std::vector<Node> nodes = *nodes_;
    Node n;
    n.kind = Kind::pow;
    n.exponent = exponent;
    n.lhs = static_cast<int>(nodes.size()) - 1;
    nodes.push_back(n);
    return PredicateExpr(std::move(nodes));
  }

  double evaluate(const State& s) const {
    const auto& nodes = *nodes_;
    constexpr std::size_t kInline = 32;
    double inline_buf[kInline];
    std::vector<double> heap_buf;
    double* vals = inline_buf;
    if (nodes.size() > kInline) {
      heap_buf.resize(nodes.size());
      vals = heap_buf.data();
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Node& n = nodes[i];
      switch (n.kind) {
        case Kind::constant: vals[i] = n.value; break;
        case Kind::variable: vals[i] = s[n.var]; break;
        case Kind::add: vals[i] = vals[n.lhs] + vals[n.rhs]; break;
        case Kind::sub: vals[i] = vals[n.lhs] - vals[n.rhs]; break;
        case Kind::mul: vals[i] = vals[n.lhs] * vals[n.rhs]; break;
        case Kind::neg: vals[i] = -vals[n.lhs]; break;
        case Kind::pow: {
          double r = 1.0;
          for (int k = 0; k < n.exponent; ++k) r *= vals[n.lhs];
          vals[i] = r;
          break;
        }
      }
    }
    return vals[nodes.size() - 1];
  }

  bool is_zero_constant() const {
    return nodes_->size() == 1 && nodes_->front().kind == Kind::constant && nodes_->front().value == 0.0;
  }

  const std::vector<Node>& nodes() const { return *nodes_; }

  bool operator==(const PredicateExpr& o) const { return nodes_ == o.nodes_ || *nodes_ == *o.nodes_; }

  /// Fully parenthesized rendering accepted back by the formula parser.
  std::string to_string() const { return render(static_cast<int>(nodes_->size()) - 1); }

 private:
  explicit PredicateExpr(std::vector<Node> nodes)
      : nodes_(std::make_shared<const std::vector<Node>>(std::move(nodes))) {}

  static PredicateExpr binary(Kind k, const PredicateExpr& a, const PredicateExpr& b) {
    std::vector<Node> nodes = *a.nodes_;
    const int offset = static_cast<int>(nodes.size());
    for (Node n : *b.nodes_) {
      if (n.lhs >= 0) n.lhs += offset;
      if (n.rhs >= 0) n.rhs += offset;
      nodes.push_back(n);
    }
    Node n;
    n.kind = k;
    n.lhs = offset - 1;
    n.rhs = static_cast<int>(nodes.size()) - 1;
    nodes.push_back(n);
    return PredicateExpr(std::move(nodes));
  }

  static std::string number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
  }

  std::string render(int i) const {
    const Node& n = (*nodes_)[i];
    switch (n.kind) {
      case Kind::constant: return std::signbit(n.value) ? "(" + number(n.value) + ")" : number(n.value);
      case Kind::variable: return std::string(var_name(n.var));
      case Kind::add: return "(" + render(n.lhs) + " + " + render(n.rhs) + ")";
      case Kind::sub: return "(" + render(n.lhs) + " - " + render(n.rhs) + ")";
      case Kind::mul: return "(" + render(n.lhs) + " * " + render(n.rhs) + ")";
      case Kind::neg: return "(-(" + render(n.lhs) + "))";
      case Kind::pow: return "(" + render(n.lhs) + " ^ " + std::to_string(n.exponent) + ")";
    }
    return {};
  }

  std::shared_ptr<const std::vector<Node>> nodes_;
};

}  // namespace rotogo
