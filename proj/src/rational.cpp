#include "qtwt/rational.hpp"

#include <cctype>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "qtwt/errors.hpp"

namespace qtwt {

namespace {

using Int = Rational::Int;

Int int_abs(Int v) { return v < 0 ? -v : v; }

// Exact arithmetic must fail loudly, never wrap.
Int checked_mul(Int a, Int b) {
  Int out;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw std::overflow_error("rational arithmetic exceeded 128-bit range");
  }
  return out;
}

Int checked_add(Int a, Int b) {
  Int out;
  if (__builtin_add_overflow(a, b, &out)) {
    throw std::overflow_error("rational arithmetic exceeded 128-bit range");
  }
  return out;
}

Int pow10(int e) {
  Int r = 1;
  for (int i = 0; i < e; ++i) r *= 10;
  return r;
}

std::string int128_to_string(Int v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string digits;
  while (u != 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
    u /= 10;
  }
  if (neg) digits.push_back('-');
  return std::string(digits.rbegin(), digits.rend());
}

}  // namespace

Rational::Rational(Int numerator, Int denominator) : num_(numerator), den_(denominator) {
  if (den_ == 0) throw std::invalid_argument("rational: zero denominator");
  normalize();
}

void Rational::normalize() {
  if (den_ < 0) {
    num_ = -num_;
    den_ = -den_;
  }
  if (num_ == 0) {
    den_ = 1;
    return;
  }
  Int g = std::gcd(int_abs(num_), den_);
  num_ /= g;
  den_ /= g;
}

Rational operator+(const Rational& a, const Rational& b) {
  // Shared denominator factor out front keeps the cross terms small.
  Int g = std::gcd(a.den_, b.den_);
  Int scaled_b = b.den_ / g;
  return Rational(checked_add(checked_mul(a.num_, scaled_b), checked_mul(b.num_, a.den_ / g)),
                  checked_mul(a.den_, scaled_b));
}

Rational operator-(const Rational& a, const Rational& b) {
  return a + (-b);
}

Rational operator*(const Rational& a, const Rational& b) {
  // Reduce cross factors first to keep intermediates small.
  Int g1 = std::gcd(int_abs(a.num_), b.den_);
  Int g2 = std::gcd(int_abs(b.num_), a.den_);
  return Rational(checked_mul(a.num_ / g1, b.num_ / g2),
                  checked_mul(a.den_ / g2, b.den_ / g1));
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.num_ == 0) throw std::invalid_argument("rational: division by zero");
  return Rational(checked_mul(a.num_, b.den_), checked_mul(a.den_, b.num_));
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = -num_;
  r.den_ = den_;
  return r;
}

bool operator<(const Rational& a, const Rational& b) {
  const Int g = std::gcd(a.den_, b.den_);
  return checked_mul(a.num_, b.den_ / g) < checked_mul(b.num_, a.den_ / g);
}

Rational Rational::from_decimal(std::string_view text) {
  const std::string original(text);
  auto fail = [&original]() -> Rational {
    throw ParseError("malformed decimal literal: '" + original + "'");
  };

  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }

  std::string digits;
  int frac_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++frac_digits;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) fail();

  long long exp10 = 0;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_neg = text[i] == '-';
      ++i;
    }
    if (i == text.size()) fail();
    for (; i < text.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) break;
      exp10 = exp10 * 10 + (text[i] - '0');
      if (exp10 > 100) fail();
    }
    if (exp_neg) exp10 = -exp10;
  }
  if (i != text.size()) fail();

  // Strip leading zeros; cap what remains so products stay inside 128 bits.
  std::size_t first = digits.find_first_not_of('0');
  std::string sig = first == std::string::npos ? "0" : digits.substr(first);
  if (sig.size() > 18 || exp10 > 18 || exp10 < -18 || frac_digits > 36) {
    throw ParseError("decimal literal too precise: '" + original + "'");
  }

  Int num = 0;
  for (char c : sig) num = num * 10 + (c - '0');
  if (negative) num = -num;

  long long net = exp10 - frac_digits;
  if (net >= 0) return Rational(num * pow10(static_cast<int>(net)), 1);
  return Rational(num, pow10(static_cast<int>(-net)));
}

std::string Rational::to_decimal() const {
  Int d = den_;
  int twos = 0;
  int fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) {
    throw std::domain_error("rational " + int128_to_string(num_) + "/" +
                            int128_to_string(den_) + " has no finite decimal form");
  }
  const int places = twos > fives ? twos : fives;
  Int scaled = checked_mul(num_, pow10(places) / den_);

  std::string s = int128_to_string(int_abs(scaled));
  if (places > 0) {
    if (static_cast<int>(s.size()) <= places) {
      s.insert(0, static_cast<std::size_t>(places) - s.size() + 1, '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(places), ".");
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return (num_ < 0 ? "-" : "") + s;
}

double Rational::to_double() const {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

Rational abs(const Rational& r) { return r.is_negative() ? -r : r; }

std::ostream& operator<<(std::ostream& os, const Rational& r) {
  try {
    return os << r.to_decimal();
  } catch (const std::domain_error&) {
    return os << int128_to_string(r.num()) << '/' << int128_to_string(r.den());
  }
}

}  // namespace qtwt
