#pragma once

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rotogo/formula.hpp"

namespace rotogo {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

using AliasTable = std::map<std::string, Formula, std::less<>>;

struct ParseOptions {
  /// Named sub-formulas usable as atoms (e.g. "human", "goal").
  AliasTable aliases;
  /// Seconds per tick for interval bounds written in seconds.
  double seconds_per_tick = kSecondsPerTick;
};

namespace detail {

enum class Tok {
  lparen, rparen, lbracket, rbracket, comma,
  bang, amp, bar, arrow,
  plus, minus, star, caret,
  gt, lt, ge, le,
  number, ident, end
};

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::size_t len) {
    out.push_back({k, std::string(src.substr(i, len)), line, col});
    i += len;
    col += static_cast<int>(len);
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      ++col;
      continue;
    }
    const char next = i + 1 < src.size() ? src[i + 1] : '\0';
    switch (c) {
      case '(': push(Tok::lparen, 1); continue;
      case ')': push(Tok::rparen, 1); continue;
      case '[': push(Tok::lbracket, 1); continue;
      case ']': push(Tok::rbracket, 1); continue;
      case ',': push(Tok::comma, 1); continue;
      case '!': push(Tok::bang, 1); continue;
      case '&': push(Tok::amp, 1); continue;
      case '|': push(Tok::bar, 1); continue;
      case '+': push(Tok::plus, 1); continue;
      case '*': push(Tok::star, 1); continue;
      case '^': push(Tok::caret, 1); continue;
      case '-':
        if (next == '>') push(Tok::arrow, 2);
        else push(Tok::minus, 1);
        continue;
      case '>':
        if (next == '=') push(Tok::ge, 2);
        else push(Tok::gt, 1);
        continue;
      case '<':
        if (next == '=') push(Tok::le, 2);
        else push(Tok::lt, 1);
        continue;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && std::isdigit(static_cast<unsigned char>(next)))) {
      std::size_t j = i;
      while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) ++j;
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      push(Tok::number, j - i);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      push(Tok::ident, j - i);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({Tok::end, "", line, col});
  return out;
}

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const ParseOptions& opts) : toks_(tokenize(text)), opts_(opts) {}

  Formula parse() {
    Formula f = implication();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& advance() { return toks_[pos_++]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    ++pos_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] static void fail_at(const Token& t, const std::string& msg) { throw ParseError(msg, t.line, t.column); }

  static bool is_temporal(const Token& t, std::string_view name) { return t.kind == Tok::ident && t.text == name; }

  Formula implication() {
    Formula lhs = disjunction();
    if (accept(Tok::arrow)) return Formula::implies(lhs, implication());
    return lhs;
  }

  Formula disjunction() {
    Formula f = conjunction();
    while (accept(Tok::bar)) f = Formula::disj(f, conjunction());
    return f;
  }

  Formula conjunction() {
    Formula f = until();
    while (accept(Tok::amp)) f = Formula::conj(f, until());
    return f;
  }

  Formula until() {
    Formula lhs = unary();
    if (is_temporal(peek(), "U")) {
      advance();
      Interval i = interval();
      return Formula::until(lhs, i, until());
    }
    return lhs;
  }

  Formula unary() {
    if (accept(Tok::bang)) return Formula::negate(unary());
    if (is_temporal(peek(), "F")) {
      advance();
      Interval i = interval();
      return Formula::eventually(i, unary());
    }
    if (is_temporal(peek(), "G")) {
      advance();
      Interval i = interval();
      return Formula::globally(i, unary());
    }
    return atom();
  }

  Formula atom() {
    const Token& t = peek();
    if (t.kind == Tok::lparen) {
      // "(e > e)", a bare comparison whose left side opens with a parenthesis
      // such as "(x - xe)^2 < 1", or a parenthesized formula. The first
      // alternative that parses wins; otherwise report the one that got furthest.
      const std::size_t start = pos_;
      std::optional<ParseError> best_error;
      std::size_t best_reached = 0;
      auto attempt = [&](auto&& body) -> std::optional<Formula> {
        pos_ = start;
        try {
          return body();
        } catch (const ParseError& e) {
          if (!best_error || pos_ > best_reached) {
            best_error = e;
            best_reached = pos_;
          }
          return std::nullopt;
        }
      };
      if (auto f = attempt([&] {
            advance();
            Formula r = comparison();
            expect(Tok::rparen, "')'");
            return r;
          }))
        return *f;
      if (auto f = attempt([&] { return comparison(); })) return *f;
      if (auto f = attempt([&] {
            advance();
            Formula r = implication();
            expect(Tok::rparen, "')'");
            return r;
          }))
        return *f;
      throw *best_error;
    }
    if (t.kind == Tok::number || t.kind == Tok::minus) return comparison();
    if (t.kind == Tok::ident) {
      if (t.text == "true") {
        advance();
        return Formula::top();
      }
      if (t.text == "false") {
        advance();
        return Formula::bottom();
      }
      if (var_from_name(t.text)) return comparison();
      if (auto it = opts_.aliases.find(t.text); it != opts_.aliases.end()) {
        advance();
        return it->second;
      }
      fail("unknown variable or alias '" + t.text + "'");
    }
    fail("expected a formula");
  }

  Formula comparison() {
    PredicateExpr lhs = expr();
    const Token& op = peek();
    if (op.kind != Tok::gt && op.kind != Tok::lt && op.kind != Tok::ge && op.kind != Tok::le)
      fail("expected comparison operator");
    advance();
    PredicateExpr rhs = expr();
    // f(state) > 0 canonical form; <= and >= normalize like < and >.
    if (op.kind == Tok::gt || op.kind == Tok::ge) return Formula::pred(rhs.is_zero_constant() ? lhs : lhs - rhs);
    return Formula::pred(lhs.is_zero_constant() ? rhs : rhs - lhs);
  }

  PredicateExpr expr() {
    PredicateExpr e = term();
    for (;;) {
      if (accept(Tok::plus)) e = e + term();
      else if (accept(Tok::minus)) e = e - term();
      else return e;
    }
  }

  PredicateExpr term() {
    PredicateExpr e = factor();
    while (accept(Tok::star)) e = e * factor();
    return e;
  }

  PredicateExpr factor() {
    if (peek().kind == Tok::minus) {
      advance();
      // "-3" is a negative literal unless it is a power base.
      if (peek().kind == Tok::number && toks_[pos_ + 1].kind != Tok::caret)
        return PredicateExpr::constant(-number_value(advance()));
      return -factor();
    }
    return power();
  }

  PredicateExpr power() {
    PredicateExpr base = primary();
    if (accept(Tok::caret)) {
      const Token& t = peek();
      if (t.kind != Tok::number) fail("expected integer exponent");
      advance();
      int exp = 0;
      auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), exp);
      if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size() || exp < 0)
        fail_at(t, "exponent must be a non-negative integer");
      return base.pow(exp);
    }
    return base;
  }

  PredicateExpr primary() {
    const Token& t = peek();
    if (t.kind == Tok::number) {
      advance();
      return PredicateExpr::constant(number_value(t));
    }
    if (t.kind == Tok::ident) {
      auto v = var_from_name(t.text);
      if (!v) fail("unknown variable '" + t.text + "'");
      advance();
      return PredicateExpr::variable(*v);
    }
    if (accept(Tok::lparen)) {
      PredicateExpr e = expr();
      expect(Tok::rparen, "')'");
      return e;
    }
    fail("expected an expression");
  }

  static double number_value(const Token& t) {
    double v = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc() || res.ptr != t.text.data() + t.text.size()) fail_at(t, "malformed number '" + t.text + "'");
    return v;
  }

  TimePoint time_value(const Token& t) const {
    return TimePoint::from_seconds(number_value(t), opts_.seconds_per_tick);
  }

  Interval interval() {
    const Token& open = peek();
    bool lower_closed;
    if (accept(Tok::lbracket)) lower_closed = true;
    else if (accept(Tok::lparen)) lower_closed = false;
    else fail("expected interval");
    if (peek().kind == Tok::minus) fail("interval lower bound must be >= 0");
    if (peek().kind != Tok::number) fail("expected interval lower bound");
    const TimePoint lower = time_value(advance());
    expect(Tok::comma, "','");
    TimeBound upper;
    if (peek().kind == Tok::ident && peek().text == "inf") {
      advance();
      upper = TimeBound::infinity();
    } else if (peek().kind == Tok::number) {
      upper = TimeBound::finite(time_value(advance()));
    } else {
      fail("expected interval upper bound");
    }
    bool upper_closed;
    if (accept(Tok::rbracket)) upper_closed = true;
    else if (accept(Tok::rparen)) upper_closed = false;
    else fail("expected ']' or ')'");
    try {
      return Interval::make(lower, upper, lower_closed, upper_closed);
    } catch (const IntervalError& e) {
      fail_at(open, e.what());
    }
  }

  std::vector<Token> toks_;
  const ParseOptions& opts_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Formula parse_formula(std::string_view text, const ParseOptions& opts = {}) {
  return detail::FormulaParser(text, opts).parse();
}

inline Formula parse_formula(std::string_view text, const AliasTable& aliases) {
  ParseOptions opts;
  opts.aliases = aliases;
  return parse_formula(text, opts);
}

}  // namespace rotogo
