#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

namespace qtwt {

/// Exact rational arithmetic on 128-bit integers.
///
/// Task data enters the program as decimal literals, so every value we ever
/// hold has a 10-smooth denominator (a divisor of some power of ten) and
/// round-trips exactly through to_decimal()/from_decimal(). Sums and products
/// of such values stay 10-smooth. 128-bit components leave ample headroom for
/// the sums of weighted products a small scheduling instance produces; parsing
/// rejects literals precise enough to threaten that headroom.
class Rational {
 public:
  using Int = __int128;

  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(long long value) : num_(value), den_(1) {}  // NOLINT: implicit by design
  Rational(Int numerator, Int denominator);

  /// Parses "42", "-3.25", "1.2e-3". Throws ParseError on malformed input or
  /// on literals with more than 18 significant digits / |exponent| > 18.
  static Rational from_decimal(std::string_view text);

  /// Exact decimal rendering, e.g. -13/4 -> "-3.25". Requires a 10-smooth
  /// denominator (always the case for decimal-sourced values); throws
  /// std::domain_error otherwise.
  std::string to_decimal() const;

  double to_double() const;

  Int num() const { return num_; }
  Int den() const { return den_; }
  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }

  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  Rational operator-() const;
  Rational& operator+=(const Rational& b) { return *this = *this + b; }
  Rational& operator-=(const Rational& b) { return *this = *this - b; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b);
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

 private:
  void normalize();

  Int num_;
  Int den_;  // > 0
};

Rational abs(const Rational& r);

/// Prints the exact decimal form when the denominator is 10-smooth,
/// "num/den" otherwise.
std::ostream& operator<<(std::ostream& os, const Rational& r);

}  // namespace qtwt
