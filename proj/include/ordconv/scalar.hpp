#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "ordconv/rational.hpp"

namespace ordconv {

/// Coefficient value: an exact rational that degrades to a double the
/// moment an inexact quantity enters (an irrational integration constant,
/// a norm-based scaling). Exponents never degrade; only coefficients do.
///
/// Arithmetic between two exact values stays exact; a 64-bit overflow in
/// the rational layer also falls back to double rather than failing, since
/// a coefficient is a magnitude, not a decidability-critical exponent.
class Scalar {
 public:
  Scalar() : exact_(true), rat_(0), approx_(0.0) {}
  Scalar(const Rational& r) : exact_(true), rat_(r), approx_(r.to_double()) {}  // NOLINT
  Scalar(std::int64_t n) : Scalar(Rational(n)) {}                               // NOLINT
  static Scalar inexact(double v) {
    Scalar s;
    s.exact_ = false;
    s.rat_ = Rational(0);
    s.approx_ = v;
    return s;
  }

  bool is_exact() const { return exact_; }
  const Rational& rat() const { return rat_; }  // meaningful only when exact
  double to_double() const { return approx_; }
  bool is_zero() const { return exact_ ? rat_.is_zero() : approx_ == 0.0; }
  bool is_negative() const { return exact_ ? rat_.is_negative() : approx_ < 0.0; }

  /// "2/3" when exact, shortest-roundtrip decimal otherwise.
  std::string str() const {
    if (exact_) return rat_.str();
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", approx_);
    return buf;
  }

  friend Scalar operator+(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
      try {
        return Scalar(a.rat_ + b.rat_);
      } catch (const std::overflow_error&) {}
    }
    return inexact(a.approx_ + b.approx_);
  }
  friend Scalar operator-(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
      try {
        return Scalar(a.rat_ - b.rat_);
      } catch (const std::overflow_error&) {}
    }
    return inexact(a.approx_ - b.approx_);
  }
  friend Scalar operator*(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) {
      try {
        return Scalar(a.rat_ * b.rat_);
      } catch (const std::overflow_error&) {}
    }
    return inexact(a.approx_ * b.approx_);
  }
  friend Scalar operator/(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_ && !b.rat_.is_zero()) {
      try {
        return Scalar(a.rat_ / b.rat_);
      } catch (const std::overflow_error&) {}
    }
    return inexact(a.approx_ / b.approx_);
  }
  Scalar operator-() const {
    return exact_ ? Scalar(-rat_) : inexact(-approx_);
  }
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  /// Exact representation equality where both sides are exact; numeric
  /// equality otherwise.
  friend bool operator==(const Scalar& a, const Scalar& b) {
    if (a.exact_ && b.exact_) return a.rat_ == b.rat_;
    return a.approx_ == b.approx_;
  }
  friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

 private:
  bool exact_;
  Rational rat_;
  double approx_;
};

}  // namespace ordconv
