#pragma once

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ordconv {

/// Exact rational arithmetic on 64-bit words.
///
/// Values are kept in lowest terms with a positive denominator. All
/// intermediate products are widened to 128 bits and narrowed back after
/// reduction; a value that does not fit throws std::overflow_error instead
/// of wrapping. Exponents, breakpoints and algebra parameters all live in
/// this type, so symbolic equality and divergence decisions stay exact.
class Rational {
 public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}  // NOLINT(implicit)
  Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::domain_error("Rational: zero denominator");
    i128 nn = n, dd = d;
    if (dd < 0) { nn = -nn; dd = -dd; }
    assign_reduced(nn, dd);
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_negative() const { return num_ < 0; }
  bool is_positive() const { return num_ > 0; }
  bool is_integer() const { return den_ == 1; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  /// Lowest-terms text form: "7", "-2/3".
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  /// Accepts "7", "-2/3", "1.25", "25e-4". Decimal forms are exact
  /// (finite decimal expansion), not rounded through a double.
  static std::optional<Rational> parse(std::string_view s);

  friend Rational operator+(const Rational& a, const Rational& b) {
    Rational r;
    r.assign_reduced(i128(a.num_) * b.den_ + i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
    return r;
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    Rational r;
    r.assign_reduced(i128(a.num_) * b.den_ - i128(b.num_) * a.den_,
                     i128(a.den_) * b.den_);
    return r;
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    Rational r;
    r.assign_reduced(i128(a.num_) * b.num_, i128(a.den_) * b.den_);
    return r;
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    Rational r;
    r.assign_reduced(i128(a.num_) * b.den_, i128(a.den_) * b.num_);
    return r;
  }
  Rational operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }
  Rational& operator/=(const Rational& o) { return *this = *this / o; }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return i128(a.num_) * b.den_ < i128(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  /// Integer power, negative allowed for nonzero base.
  Rational pow(int e) const {
    if (e == 0) return Rational(1);
    Rational base = *this;
    if (e < 0) {
      if (num_ == 0) throw std::domain_error("Rational: 0^negative");
      base = Rational(den_, num_);
      e = -e;
    }
    Rational acc(1);
    while (e > 0) {
      if (e & 1) acc *= base;
      base = (e > 1) ? base * base : base;
      e >>= 1;
    }
    return acc;
  }

  Rational abs() const { return num_ < 0 ? -*this : *this; }

 private:
  using i128 = __int128;

  void assign_reduced(i128 n, i128 d) {
    if (d < 0) { n = -n; d = -d; }
    i128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    constexpr i128 lo = std::numeric_limits<std::int64_t>::min();
    constexpr i128 hi = std::numeric_limits<std::int64_t>::max();
    if (n < lo || n > hi || d > hi)
      throw std::overflow_error("Rational: 64-bit overflow");
    num_ = static_cast<std::int64_t>(n);
    den_ = static_cast<std::int64_t>(d);
  }

  static i128 gcd128(i128 a, i128 b) {
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline std::optional<Rational> Rational::parse(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool neg = false;
  std::size_t i = 0;
  if (s[0] == '+' || s[0] == '-') {
    neg = s[0] == '-';
    i = 1;
  }
  std::int64_t intpart = 0, fracpart = 0;
  int fracdigits = 0, expo = 0;
  bool any = false;
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  for (; i < s.size() && digit(s[i]); ++i) {
    if (intpart > (std::numeric_limits<std::int64_t>::max() - 9) / 10) return std::nullopt;
    intpart = intpart * 10 + (s[i] - '0');
    any = true;
  }
  if (i < s.size() && s[i] == '/') {
    // plain fraction n/d
    if (!any) return std::nullopt;
    ++i;
    std::int64_t d = 0;
    bool dany = false;
    for (; i < s.size() && digit(s[i]); ++i) {
      if (d > (std::numeric_limits<std::int64_t>::max() - 9) / 10) return std::nullopt;
      d = d * 10 + (s[i] - '0');
      dany = true;
    }
    if (!dany || d == 0 || i != s.size()) return std::nullopt;
    Rational r(neg ? -intpart : intpart, d);
    return r;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && digit(s[i]); ++i) {
      if (fracdigits >= 18) return std::nullopt;
      fracpart = fracpart * 10 + (s[i] - '0');
      ++fracdigits;
      any = true;
    }
  }
  if (!any) return std::nullopt;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    bool eneg = false;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) {
      eneg = s[i] == '-';
      ++i;
    }
    bool eany = false;
    for (; i < s.size() && digit(s[i]); ++i) {
      if (expo > 100) return std::nullopt;
      expo = expo * 10 + (s[i] - '0');
      eany = true;
    }
    if (!eany) return std::nullopt;
    if (eneg) expo = -expo;
  }
  if (i != s.size()) return std::nullopt;
  try {
    Rational ten(10);
    Rational r = Rational(intpart) + Rational(fracpart) * ten.pow(-fracdigits);
    r = r * ten.pow(expo);
    return neg ? -r : r;
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

/// Exact integer n-th root, if v is a perfect n-th power (v >= 0, n >= 1).
inline std::optional<std::int64_t> exact_nth_root(std::int64_t v, int n) {
  if (v < 0 || n < 1) return std::nullopt;
  if (n == 1 || v == 0 || v == 1) return v;
  double guess = std::pow(static_cast<double>(v), 1.0 / n);
  auto lo = static_cast<std::int64_t>(std::floor(guess)) - 2;
  if (lo < 0) lo = 0;
  for (std::int64_t c = lo; c <= lo + 4; ++c) {
    __int128 acc = 1;
    bool over = false;
    for (int j = 0; j < n; ++j) {
      acc *= c;
      if (acc > std::numeric_limits<std::int64_t>::max()) { over = true; break; }
    }
    if (!over && acc == v) return c;
  }
  return std::nullopt;
}

/// base^e as an exact rational, when that is possible (base > 0).
/// Fails (nullopt) when a genuine irrational root would be needed.
inline std::optional<Rational> exact_pow(const Rational& base, const Rational& e) {
  if (!base.is_positive()) return std::nullopt;
  if (base == Rational(1)) return Rational(1);
  if (e.is_zero()) return Rational(1);
  if (e.is_integer()) {
    if (e.num() > 64 || e.num() < -64) return std::nullopt;  // keep words small
    try {
      return base.pow(static_cast<int>(e.num()));
    } catch (const std::overflow_error&) {
      return std::nullopt;
    }
  }
  int d = static_cast<int>(e.den());
  if (d > 64) return std::nullopt;
  auto rn = exact_nth_root(base.num(), d);
  auto rd = exact_nth_root(base.den(), d);
  if (!rn || !rd) return std::nullopt;
  Rational root(*rn, *rd);
  if (e.num() > 64 || e.num() < -64) return std::nullopt;
  try {
    return root.pow(static_cast<int>(e.num()));
  } catch (const std::overflow_error&) {
    return std::nullopt;
  }
}

}  // namespace ordconv
