#pragma once

#include <charconv>
#include <cmath>
#include <compare>
#include <limits>
#include <stdexcept>
#include <string>

namespace rotogo {

/// Extended real: -inf, a finite real, or +inf. Never NaN.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr explicit ExtReal(double v) : v_(v) {}

  static ExtReal finite(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("ExtReal::finite given non-finite value");
    return ExtReal(v);
  }
  static constexpr ExtReal pos_inf() { return ExtReal(std::numeric_limits<double>::infinity()); }
  static constexpr ExtReal neg_inf() { return ExtReal(-std::numeric_limits<double>::infinity()); }

  /// inf * sign(v), with sign(0) treated as negative: f = 0 violates f > 0.
  static constexpr ExtReal inf_times_sign(double v) { return v > 0 ? pos_inf() : neg_inf(); }

  constexpr double value() const { return v_; }
  bool is_finite() const { return std::isfinite(v_); }
  constexpr bool is_pos_inf() const { return v_ == std::numeric_limits<double>::infinity(); }
  constexpr bool is_neg_inf() const { return v_ == -std::numeric_limits<double>::infinity(); }
  constexpr bool positive() const { return v_ > 0; }

  constexpr ExtReal operator-() const { return ExtReal(-v_); }

  constexpr bool operator==(const ExtReal& o) const { return v_ == o.v_; }
  constexpr std::partial_ordering operator<=>(const ExtReal& o) const { return v_ <=> o.v_; }

  /// Bit-level identity (distinguishes +0 from -0).
  bool identical(const ExtReal& o) const { return std::signbit(v_) == std::signbit(o.v_) && v_ == o.v_; }

  std::string to_string() const {
    if (is_pos_inf()) return "+inf";
    if (is_neg_inf()) return "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v_);
    return std::string(buf, res.ptr);
  }

  static ExtReal parse(const std::string& s) {
    if (s == "+inf" || s == "inf") return pos_inf();
    if (s == "-inf") return neg_inf();
    double v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::invalid_argument("bad ExtReal '" + s + "'");
    return finite(v);
  }

 private:
  double v_ = 0.0;
};

inline constexpr ExtReal min(ExtReal a, ExtReal b) { return b < a ? b : a; }
inline constexpr ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }

}  // namespace rotogo
