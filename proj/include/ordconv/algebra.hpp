#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ordconv/oracle.hpp"
#include "ordconv/symfunc.hpp"

namespace ordconv {

/// Lebesgue exponent in [1, inf]; infinity is encoded distinctly so that
/// A_inf = L_1 and sup-norms take a separate code path.
class LpExponent {
 public:
  LpExponent(const Rational& v) : inf_(false), v_(v) {  // NOLINT(implicit)
    if (!(v > Rational(0))) throw std::domain_error("LpExponent: must be > 0");
  }
  LpExponent(std::int64_t v) : LpExponent(Rational(v)) {}  // NOLINT(implicit)
  static LpExponent infinite() {
    LpExponent e;
    return e;
  }

  bool is_infinite() const { return inf_; }
  const Rational& finite_value() const {
    if (inf_) throw std::logic_error("LpExponent: infinite");
    return v_;
  }
  double to_double() const {
    return inf_ ? std::numeric_limits<double>::infinity() : v_.to_double();
  }
  std::string str() const { return inf_ ? "inf" : v_.str(); }

  static std::optional<LpExponent> parse(std::string_view s) {
    if (s == "inf" || s == "Inf" || s == "INF") return infinite();
    if (auto r = Rational::parse(s); r && r->is_positive()) return LpExponent(*r);
    return std::nullopt;
  }

  /// 1/p + 1/p' = 1; conjugate of 1 is inf and vice versa.
  LpExponent conjugate() const {
    if (inf_) return LpExponent(Rational(1));
    if (v_ == Rational(1)) return infinite();
    return LpExponent(v_ / (v_ - Rational(1)));
  }

  friend bool operator==(const LpExponent& a, const LpExponent& b) {
    if (a.inf_ != b.inf_) return false;
    return a.inf_ || a.v_ == b.v_;
  }
  friend bool operator!=(const LpExponent& a, const LpExponent& b) { return !(a == b); }
  friend bool operator<(const LpExponent& a, const LpExponent& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator>(const LpExponent& a, const LpExponent& b) { return b < a; }
  friend bool operator<=(const LpExponent& a, const LpExponent& b) { return !(b < a); }
  friend bool operator>=(const LpExponent& a, const LpExponent& b) { return !(a < b); }

 private:
  LpExponent() : inf_(true), v_(0) {}
  bool inf_;
  Rational v_;
};

enum class Regime { RgtP, RltP, Requal };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::RgtP: return "r>p";
    case Regime::RltP: return "r<p";
    default: return "r=p";
  }
}

/// The exponent pair (r, p) of an (A_r, A_p) multiplier problem, with its
/// derived exponents: v with 1/v = 1/p - 1/r when r > p, and the
/// conjugate r'.
class AlgebraParams {
 public:
  AlgebraParams(LpExponent r, LpExponent p) : r_(r), p_(p) {
    auto check = [](const LpExponent& e, const char* name) {
      if (!e.is_infinite() && e.finite_value() < Rational(1))
        throw std::domain_error(std::string("AlgebraParams: ") + name +
                                " must lie in [1, inf]");
    };
    check(r_, "r");
    check(p_, "p");
  }

  const LpExponent& r() const { return r_; }
  const LpExponent& p() const { return p_; }

  Regime regime() const {
    if (r_ == p_) return Regime::Requal;
    return p_ < r_ ? Regime::RgtP : Regime::RltP;
  }

  /// Defined only for r > p: 1/v = 1/p - 1/r > 0.
  LpExponent v() const {
    if (regime() != Regime::RgtP)
      throw std::logic_error("AlgebraParams::v requires r > p");
    if (r_.is_infinite()) return p_;
    const Rational& r = r_.finite_value();
    const Rational& p = p_.finite_value();
    return LpExponent(p * r / (r - p));
  }

  LpExponent r_conjugate() const { return r_.conjugate(); }

 private:
  LpExponent r_, p_;
};

enum class NormMethod { Exact, Quadrature };

/// Certificate for an exactly-divergent integral: the offending endpoint
/// and the leading exponent/log power of the integrand there (for an L_p
/// norm this is the exponent of |f|^p, i.e. already scaled by p).
struct DivergenceCert {
  Endpoint endpoint;
  Rational exponent;
  Rational log_power;
};

/// A nonnegative extended-real norm with provenance. value is +inf exactly
/// when a divergence certificate is present; Exact results carry a zero
/// error bound.
struct NormValue {
  double value = 0;
  NormMethod method = NormMethod::Exact;
  std::optional<DivergenceCert> divergence;
  double error_bound = 0;

  bool finite() const { return !divergence.has_value(); }

  static NormValue exact(double v) { return NormValue{v, NormMethod::Exact, std::nullopt, 0}; }
  static NormValue quad(double v, double err) {
    return NormValue{v, NormMethod::Quadrature, std::nullopt, err};
  }
  static NormValue divergent(DivergenceCert c) {
    return NormValue{std::numeric_limits<double>::infinity(), NormMethod::Exact,
                     c, 0};
  }
};

struct NotInL1Error : std::runtime_error {
  explicit NotInL1Error(DivergenceCert c)
      : std::runtime_error("function is not in L_1: |f| has exponent " +
                           c.exponent.str() + " at " + endpoint_name(c.endpoint)),
        cert(c) {}
  DivergenceCert cert;
};

namespace detail_norm {

/// Closed form for int_lo^hi |sum|^P when the piece allows one:
///   - a single log-free power,
///   - an affine pair a + b x (the antiderivative sign(H)|H|^{P+1}/(B(P+1))
///     is continuous through the root, so no split is needed),
///   - an even integer P with a small term list, by expanding the P-th
///     power inside the family and integrating term by term.
/// Divergence has been ruled out exactly before this is called.
inline std::optional<double> closed_form_abs_power(const Piece& pc,
                                                   const Rational& P) {
  const auto& ts = pc.terms;
  double Pd = P.to_double();
  if (ts.size() == 1 && ts[0].log_power == 0) {
    Rational aP = ts[0].exponent * P;
    double cP = std::pow(std::abs(ts[0].coeff.to_double()), Pd);
    if (aP == Rational(-1)) {
      // only reachable on interior pieces
      if (!pc.hi || pc.lo.is_zero()) return std::nullopt;
      return cP * std::log(pc.hi->to_double() / pc.lo.to_double());
    }
    double e1 = aP.to_double() + 1.0;
    double upper = pc.hi ? std::pow(pc.hi->to_double(), e1) : 0.0;
    double lower = pc.lo.is_zero() ? 0.0 : std::pow(pc.lo.to_double(), e1);
    return cP * (upper - lower) / e1;
  }
  if (ts.size() == 2 && ts[0].log_power == 0 && ts[1].log_power == 0 &&
      ts[0].exponent == Rational(0) && ts[1].exponent == Rational(1)) {
    if (!pc.hi) return std::nullopt;  // an affine tail diverges, never here
    double A = ts[0].coeff.to_double(), B = ts[1].coeff.to_double();
    auto G = [&](double x) {
      double H = A + B * x;
      return (H < 0 ? -1.0 : 1.0) * std::pow(std::abs(H), Pd + 1.0) /
             (B * (Pd + 1.0));
    };
    return G(pc.hi->to_double()) - G(pc.lo.to_double());
  }
  if (P.is_integer() && P.num() >= 2 && P.num() <= 12 && P.num() % 2 == 0 &&
      ts.size() <= 4) {
    int n = static_cast<int>(P.num());
    std::vector<PowerLogTerm> acc{PowerLogTerm{Scalar(1), Rational(0), 0}};
    for (int i = 0; i < n; ++i) {
      std::vector<PowerLogTerm> next;
      for (const auto& a : acc)
        for (const auto& b : ts)
          next.push_back(PowerLogTerm{a.coeff * b.coeff, a.exponent + b.exponent,
                                      a.log_power + b.log_power});
      acc = detail::combine_terms(next);
      if (acc.size() > 256) return std::nullopt;
    }
    double sum = 0;
    for (const auto& t : acc) sum += definite_term_integral(t, pc.lo, pc.hi);
    return std::abs(sum);
  }
  return std::nullopt;
}

}  // namespace detail_norm

/// Essential sup of |f| over (0, inf). Unboundedness is decided exactly at
/// the endpoints; interior extrema come from piece endpoints plus critical
/// points of the term sum (analytic for one term, derivative sign scan
/// otherwise).
inline NormValue sup_norm(const PiecewiseFn& f) {
  PiecewiseFn z = normalize(f);
  if (is_zero_fn(z)) return NormValue::exact(0);
  if (auto lb = leading_behavior(z, Endpoint::ZeroPlus)) {
    if (lb->exponent < Rational(0) ||
        (lb->exponent == Rational(0) && lb->log_power > 0))
      return NormValue::divergent(
          {Endpoint::ZeroPlus, lb->exponent, Rational(lb->log_power)});
  }
  if (auto lb = leading_behavior(z, Endpoint::Infinity)) {
    if (lb->exponent > Rational(0) ||
        (lb->exponent == Rational(0) && lb->log_power > 0))
      return NormValue::divergent(
          {Endpoint::Infinity, lb->exponent, Rational(lb->log_power)});
  }

  auto const_coeff = [](const std::vector<PowerLogTerm>& ts) {
    for (const auto& t : ts)
      if (t.exponent.is_zero() && t.log_power == 0) return t.coeff.to_double();
    return 0.0;
  };

  double best = 0;
  bool analytic = true;
  for (const Piece& pc : z.pieces()) {
    if (pc.terms.empty()) continue;
    double a = pc.lo.to_double();
    double lo_val = pc.lo.is_zero() ? const_coeff(pc.terms)
                                    : evaluate_terms(pc.terms, a);
    double hi_val = pc.hi ? evaluate_terms(pc.terms, pc.hi->to_double())
                          : const_coeff(pc.terms);
    best = std::max({best, std::abs(lo_val), std::abs(hi_val)});

    double s = pc.lo.is_zero() ? (pc.hi ? pc.hi->to_double() * 1e-9 : 1e-9) : a;
    double t = pc.hi ? pc.hi->to_double() : std::max(1e6, 100.0 * std::max(a, 1.0));
    if (pc.terms.size() == 1) {
      const PowerLogTerm& tm = pc.terms[0];
      if (tm.log_power > 0 && !tm.exponent.is_zero()) {
        // d/dx x^a ln^k = x^(a-1) ln^(k-1) (a ln x + k): root at e^(-k/a)
        double xs = std::exp(-tm.log_power / tm.exponent.to_double());
        if (xs > s && xs < t)
          best = std::max(best, std::abs(evaluate_terms(pc.terms, xs)));
      }
      continue;
    }
    analytic = false;
    std::vector<PowerLogTerm> deriv;
    for (const PowerLogTerm& tm : pc.terms) {
      if (!tm.exponent.is_zero())
        deriv.push_back(PowerLogTerm{tm.coeff * Scalar(tm.exponent),
                                     tm.exponent - Rational(1), tm.log_power});
      if (tm.log_power > 0)
        deriv.push_back(PowerLogTerm{tm.coeff * Scalar(Rational(tm.log_power)),
                                     tm.exponent - Rational(1), tm.log_power - 1});
    }
    deriv = detail::combine_terms(deriv);
    for (double root : find_sign_roots(deriv, s, t, 192))
      best = std::max(best, std::abs(evaluate_terms(pc.terms, root)));
  }
  if (analytic) return NormValue::exact(best);
  return NormValue::quad(best, best * 1e-12);
}

/// L_p norm with exact divergence certification: the integral of |f|^p
/// converges at infinity iff (leading exponent)*p < -1 and at 0+ iff > -1;
/// log factors cannot rescue the critical exponent. Convergent pieces use
/// closed forms where available and the quadrature oracle otherwise.
inline NormValue lp_norm(const PiecewiseFn& f, const LpExponent& p,
                         const QuadOptions& opt = {}) {
  if (p.is_infinite()) return sup_norm(f);
  const Rational& P = p.finite_value();
  PiecewiseFn z = normalize(f);
  if (is_zero_fn(z)) return NormValue::exact(0);
  if (auto lb = leading_behavior(z, Endpoint::Infinity)) {
    Rational E = lb->exponent * P;
    if (E >= Rational(-1))
      return NormValue::divergent({Endpoint::Infinity, E, Rational(lb->log_power) * P});
  }
  if (auto lb = leading_behavior(z, Endpoint::ZeroPlus)) {
    Rational E = lb->exponent * P;
    if (E <= Rational(-1))
      return NormValue::divergent({Endpoint::ZeroPlus, E, Rational(lb->log_power) * P});
  }
  double total = 0, err = 0;
  bool exact = true;
  for (const Piece& pc : z.pieces()) {
    if (pc.terms.empty()) continue;
    if (auto cf = detail_norm::closed_form_abs_power(pc, P)) {
      total += *cf;
      continue;
    }
    QuadratureResult q =
        quad_piecewise(restrict_to(z, pc.lo, pc.hi), P, opt);
    total += q.value;
    err += q.abs_error_estimate + (q.truncation ? q.truncation->tail_bound : 0);
    exact = false;
  }
  double Pd = P.to_double();
  double val = std::pow(total, 1.0 / Pd);
  if (exact) return NormValue::exact(val);
  double eb = total > 0 ? val * (err / total) / Pd : std::pow(err, 1.0 / Pd);
  return NormValue::quad(val, eb);
}

/// Order convolution f*g = f ghat + g fhat. Exact within the family;
/// commutative by the symmetry of the construction. Requires both factors
/// integrable at 0+ so that the transforms exist.
inline PiecewiseFn order_convolve(const PiecewiseFn& f, const PiecewiseFn& g) {
  PiecewiseFn fhat = antiderivative_from_zero(f);
  PiecewiseFn ghat = antiderivative_from_zero(g);
  return add(mul(f, ghat), mul(g, fhat));
}

/// Gelfand transform of f in L_1(I): the indefinite integral from 0.
/// Raises NotInL1Error (with the divergence certificate) otherwise.
inline PiecewiseFn gelfand_transform(const PiecewiseFn& f,
                                     const QuadOptions& opt = {}) {
  NormValue l1 = lp_norm(f, LpExponent(Rational(1)), opt);
  if (!l1.finite()) throw NotInL1Error(*l1.divergence);
  return antiderivative_from_zero(f);
}

/// |||f|||_p = ||f||_1 + ||fhat||_p; infinite when either part diverges.
inline NormValue ap_norm(const PiecewiseFn& f, const LpExponent& p,
                         const QuadOptions& opt = {}) {
  NormValue l1 = lp_norm(f, LpExponent(Rational(1)), opt);
  if (!l1.finite()) return l1;
  PiecewiseFn fhat = antiderivative_from_zero(f);
  NormValue lp = lp_norm(fhat, p, opt);
  if (!lp.finite()) return lp;
  NormValue out;
  out.value = l1.value + lp.value;
  out.method = (l1.method == NormMethod::Exact && lp.method == NormMethod::Exact)
                   ? NormMethod::Exact
                   : NormMethod::Quadrature;
  out.error_bound = l1.error_bound + lp.error_bound;
  return out;
}

inline bool in_ap(const PiecewiseFn& f, const LpExponent& p,
                  const QuadOptions& opt = {}) {
  return ap_norm(f, p, opt).finite();
}

/// Limit of f at infinity when it exists in R (last piece bounded); the
/// total integral of an L_1 function is limit_at_infinity of its transform.
inline std::optional<Scalar> limit_at_infinity(const PiecewiseFn& f) {
  PiecewiseFn z = normalize(f);
  const Piece& last = z.pieces().back();
  Scalar c(0);
  for (const PowerLogTerm& t : last.terms) {
    if (t.exponent > Rational(0) ||
        (t.exponent == Rational(0) && t.log_power > 0))
      return std::nullopt;
    if (t.exponent.is_zero() && t.log_power == 0) c = t.coeff;
  }
  return c;
}

}  // namespace ordconv
