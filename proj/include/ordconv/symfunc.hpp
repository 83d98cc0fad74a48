#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ordconv/rational.hpp"
#include "ordconv/scalar.hpp"

namespace ordconv {

enum class Endpoint { ZeroPlus, Infinity };

inline const char* endpoint_name(Endpoint e) {
  return e == Endpoint::ZeroPlus ? "0+" : "inf";
}

/// One summand c * x^a * (ln x)^k of a piece.
struct PowerLogTerm {
  Scalar coeff;
  Rational exponent;
  int log_power = 0;
};

/// nullopt encodes +infinity as an interval bound.
using UpperBound = std::optional<Rational>;

/// Value of the function on (lo, hi) is the sum of `terms`; an empty list
/// is the zero function on the piece.
struct Piece {
  Rational lo;
  UpperBound hi;
  std::vector<PowerLogTerm> terms;
};

struct MalformedPartitionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonIntegrableAtZeroError : std::runtime_error {
  NonIntegrableAtZeroError(Rational e, int k)
      : std::runtime_error("not integrable at 0+: leading term x^(" + e.str() +
                           ")*ln^" + std::to_string(k)),
        exponent(e),
        log_power(k) {}
  Rational exponent;
  int log_power;
};

/// Dominating term at an endpoint: minimal exponent at 0+, maximal at
/// infinity, ties broken by the higher log power in both cases.
struct LeadingBehavior {
  Endpoint endpoint;
  Rational exponent;
  int log_power;
  Scalar coeff;
};

/// A measurable function on (0, inf) represented exactly as power-log sums
/// over finitely many intervals. Pieces partition (0, inf); the value at a
/// breakpoint follows the right-hand piece (a.e. classes need a
/// representative only for evaluation). Immutable after construction.
class PiecewiseFn {
 public:
  /// Validates the partition. A trailing gap (last piece ending below
  /// infinity) is filled with an explicit zero tail; interior gaps,
  /// overlaps or a start above zero throw MalformedPartitionError.
  static PiecewiseFn from_pieces(std::vector<Piece> pieces) {
    if (pieces.empty())
      pieces.push_back(Piece{Rational(0), std::nullopt, {}});
    std::stable_sort(pieces.begin(), pieces.end(),
                     [](const Piece& a, const Piece& b) { return a.lo < b.lo; });
    if (!pieces.front().lo.is_zero())
      throw MalformedPartitionError("partition must start at 0, starts at " +
                                    pieces.front().lo.str());
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      const Piece& pc = pieces[i];
      if (pc.hi && !(pc.lo < *pc.hi))
        throw MalformedPartitionError("empty piece at lo=" + pc.lo.str());
      bool last = i + 1 == pieces.size();
      if (!last) {
        if (!pc.hi)
          throw MalformedPartitionError("interior piece extends to inf at lo=" +
                                        pc.lo.str());
        const Rational& next = pieces[i + 1].lo;
        if (*pc.hi < next)
          throw MalformedPartitionError("gap at (" + pc.hi->str() + ", " +
                                        next.str() + ")");
        if (next < *pc.hi)
          throw MalformedPartitionError("overlap at " + next.str());
      }
    }
    if (pieces.back().hi) {
      Rational end = *pieces.back().hi;
      pieces.push_back(Piece{end, std::nullopt, {}});
    }
    return PiecewiseFn(std::move(pieces));
  }

  static PiecewiseFn zero() { return from_pieces({}); }

  static PiecewiseFn constant(Scalar c) {
    if (c.is_zero()) return zero();
    return from_pieces(
        {Piece{Rational(0), std::nullopt, {PowerLogTerm{c, Rational(0), 0}}}});
  }

  const std::vector<Piece>& pieces() const { return pieces_; }

 private:
  explicit PiecewiseFn(std::vector<Piece> p) : pieces_(std::move(p)) {}
  std::vector<Piece> pieces_;
};

namespace detail {

inline bool term_order(const PowerLogTerm& a, const PowerLogTerm& b) {
  if (a.exponent != b.exponent) return a.exponent < b.exponent;
  return a.log_power < b.log_power;
}

inline std::vector<PowerLogTerm> combine_terms(std::vector<PowerLogTerm> ts) {
  std::sort(ts.begin(), ts.end(), term_order);
  std::vector<PowerLogTerm> out;
  for (auto& t : ts) {
    if (!out.empty() && out.back().exponent == t.exponent &&
        out.back().log_power == t.log_power) {
      out.back().coeff += t.coeff;
    } else {
      out.push_back(t);
    }
  }
  out.erase(std::remove_if(out.begin(), out.end(),
                           [](const PowerLogTerm& t) { return t.coeff.is_zero(); }),
            out.end());
  return out;
}

inline bool same_terms(const std::vector<PowerLogTerm>& a,
                       const std::vector<PowerLogTerm>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].exponent != b[i].exponent || a[i].log_power != b[i].log_power ||
        a[i].coeff != b[i].coeff)
      return false;
  }
  return true;
}

}  // namespace detail

/// Canonical form: like terms combined, zero coefficients dropped, adjacent
/// pieces with identical term lists merged. Idempotent; symbolic equality
/// of two functions is equality of their normalized forms.
inline PiecewiseFn normalize(const PiecewiseFn& f) {
  std::vector<Piece> out;
  for (const Piece& pc : f.pieces()) {
    Piece np{pc.lo, pc.hi, detail::combine_terms(pc.terms)};
    if (!out.empty() && detail::same_terms(out.back().terms, np.terms)) {
      out.back().hi = np.hi;
    } else {
      out.push_back(std::move(np));
    }
  }
  return PiecewiseFn::from_pieces(std::move(out));
}

inline bool symbolically_equal(const PiecewiseFn& f, const PiecewiseFn& g) {
  PiecewiseFn nf = normalize(f), ng = normalize(g);
  const auto& a = nf.pieces();
  const auto& b = ng.pieces();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].lo != b[i].lo) return false;
    if (a[i].hi.has_value() != b[i].hi.has_value()) return false;
    if (a[i].hi && *a[i].hi != *b[i].hi) return false;
    if (!detail::same_terms(a[i].terms, b[i].terms)) return false;
  }
  return true;
}

inline bool is_zero_fn(const PiecewiseFn& f) {
  for (const Piece& pc : f.pieces())
    for (const PowerLogTerm& t : pc.terms)
      if (!t.coeff.is_zero()) return false;
  return true;
}

/// Interior finite breakpoints, ascending.
inline std::vector<Rational> breakpoints(const PiecewiseFn& f) {
  std::vector<Rational> out;
  for (const Piece& pc : f.pieces())
    if (!pc.lo.is_zero()) out.push_back(pc.lo);
  return out;
}

enum class PointwiseOp { Add, Mul };

inline PiecewiseFn pointwise(PointwiseOp op, const PiecewiseFn& f,
                             const PiecewiseFn& g) {
  // Common refinement of the two breakpoint sets.
  std::vector<Rational> cuts = breakpoints(f);
  for (const Rational& b : breakpoints(g)) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto terms_on = [](const PiecewiseFn& fn, const Rational& lo)
      -> const std::vector<PowerLogTerm>& {
    const Piece* found = &fn.pieces().back();
    for (const Piece& pc : fn.pieces()) {
      if (pc.lo <= lo && (!pc.hi || lo < *pc.hi)) {
        found = &pc;
        break;
      }
    }
    return found->terms;
  };

  std::vector<Piece> out;
  Rational lo(0);
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    UpperBound hi = (i < cuts.size()) ? UpperBound(cuts[i]) : std::nullopt;
    const auto& ft = terms_on(f, lo);
    const auto& gt = terms_on(g, lo);
    std::vector<PowerLogTerm> ts;
    if (op == PointwiseOp::Add) {
      ts = ft;
      ts.insert(ts.end(), gt.begin(), gt.end());
    } else {
      for (const auto& a : ft)
        for (const auto& b : gt)
          ts.push_back(PowerLogTerm{a.coeff * b.coeff, a.exponent + b.exponent,
                                    a.log_power + b.log_power});
    }
    out.push_back(Piece{lo, hi, std::move(ts)});
    if (hi) lo = *hi;
  }
  return normalize(PiecewiseFn::from_pieces(std::move(out)));
}

inline PiecewiseFn scale(const PiecewiseFn& f, const Scalar& c) {
  std::vector<Piece> out;
  for (const Piece& pc : f.pieces()) {
    Piece np{pc.lo, pc.hi, pc.terms};
    for (auto& t : np.terms) t.coeff *= c;
    out.push_back(std::move(np));
  }
  return normalize(PiecewiseFn::from_pieces(std::move(out)));
}

inline PiecewiseFn add(const PiecewiseFn& f, const PiecewiseFn& g) {
  return pointwise(PointwiseOp::Add, f, g);
}
inline PiecewiseFn mul(const PiecewiseFn& f, const PiecewiseFn& g) {
  return pointwise(PointwiseOp::Mul, f, g);
}
inline PiecewiseFn negate(const PiecewiseFn& f) { return scale(f, Scalar(-1)); }
inline PiecewiseFn sub(const PiecewiseFn& f, const PiecewiseFn& g) {
  return add(f, negate(g));
}

/// d/dx [c x^a ln^k x] = c a x^(a-1) ln^k x + c k x^(a-1) ln^(k-1) x.
inline PiecewiseFn differentiate(const PiecewiseFn& f) {
  std::vector<Piece> out;
  for (const Piece& pc : f.pieces()) {
    std::vector<PowerLogTerm> ts;
    for (const PowerLogTerm& t : pc.terms) {
      if (!t.exponent.is_zero())
        ts.push_back(PowerLogTerm{t.coeff * Scalar(t.exponent),
                                  t.exponent - Rational(1), t.log_power});
      if (t.log_power > 0)
        ts.push_back(PowerLogTerm{t.coeff * Scalar(Rational(t.log_power)),
                                  t.exponent - Rational(1), t.log_power - 1});
    }
    out.push_back(Piece{pc.lo, pc.hi, std::move(ts)});
  }
  return normalize(PiecewiseFn::from_pieces(std::move(out)));
}

namespace detail {

/// Antiderivative of a single term, constants omitted. Uses the ln-rule at
/// exponent -1 and the descending-log recursion otherwise; both stay inside
/// the power-log family.
inline std::vector<PowerLogTerm> term_antiderivative(const PowerLogTerm& t) {
  std::vector<PowerLogTerm> out;
  if (t.exponent == Rational(-1)) {
    out.push_back(PowerLogTerm{t.coeff / Scalar(Rational(t.log_power + 1)),
                               Rational(0), t.log_power + 1});
    return out;
  }
  // int x^a ln^k = x^(a+1) sum_j (-1)^(k-j) (k!/j!) / (a+1)^(k-j+1) ln^j
  Rational a1 = t.exponent + Rational(1);
  Scalar factor = t.coeff / Scalar(a1);
  for (int j = t.log_power; j >= 0; --j) {
    out.push_back(PowerLogTerm{factor, a1, j});
    if (j > 0) factor = factor * Scalar(Rational(-j)) / Scalar(a1);
  }
  return out;
}

inline std::vector<PowerLogTerm> terms_antiderivative(
    const std::vector<PowerLogTerm>& ts) {
  std::vector<PowerLogTerm> out;
  for (const auto& t : ts) {
    auto a = term_antiderivative(t);
    out.insert(out.end(), a.begin(), a.end());
  }
  return combine_terms(out);
}

}  // namespace detail

inline double evaluate_terms(const std::vector<PowerLogTerm>& ts, double x) {
  double lx = std::log(x);
  double sum = 0.0;
  for (const PowerLogTerm& t : ts) {
    double lp = 1.0;
    for (int j = 0; j < t.log_power; ++j) lp *= lx;
    sum += t.coeff.to_double() * std::pow(x, t.exponent.to_double()) * lp;
  }
  return sum;
}

/// Exact value of a term sum at a rational point, when representable in Q:
/// needs exact coefficients and either x = 1 (where ln vanishes) or
/// log-free terms whose power of x is itself rational.
inline std::optional<Rational> exact_eval_terms(
    const std::vector<PowerLogTerm>& ts, const Rational& x) {
  Rational sum(0);
  for (const PowerLogTerm& t : ts) {
    if (!t.coeff.is_exact()) return std::nullopt;
    if (x == Rational(1)) {
      if (t.log_power == 0) {
        try {
          sum += t.coeff.rat();
        } catch (const std::overflow_error&) {
          return std::nullopt;
        }
      }
      continue;  // ln 1 = 0 kills logged terms
    }
    if (t.log_power > 0) return std::nullopt;
    auto p = exact_pow(x, t.exponent);
    if (!p) return std::nullopt;
    try {
      sum += t.coeff.rat() * *p;
    } catch (const std::overflow_error&) {
      return std::nullopt;
    }
  }
  return sum;
}

inline Scalar eval_terms_scalar(const std::vector<PowerLogTerm>& ts,
                                const Rational& x) {
  if (auto r = exact_eval_terms(ts, x)) return Scalar(*r);
  return Scalar::inexact(evaluate_terms(ts, x.to_double()));
}

inline std::optional<LeadingBehavior> leading_behavior(const PiecewiseFn& f,
                                                       Endpoint ep) {
  PiecewiseFn z = normalize(f);
  const Piece& pc =
      ep == Endpoint::ZeroPlus ? z.pieces().front() : z.pieces().back();
  if (pc.terms.empty()) return std::nullopt;
  const PowerLogTerm* best = &pc.terms.front();
  for (const PowerLogTerm& t : pc.terms) {
    bool better;
    if (ep == Endpoint::ZeroPlus)
      better = t.exponent < best->exponent ||
               (t.exponent == best->exponent && t.log_power > best->log_power);
    else
      better = t.exponent > best->exponent ||
               (t.exponent == best->exponent && t.log_power > best->log_power);
    if (better) best = &t;
  }
  return LeadingBehavior{ep, best->exponent, best->log_power, best->coeff};
}

/// F(x) = int_0^x f, exact within the family. Requires integrability at 0+
/// (leading exponent > -1; exponent -1 is rejected for any log power).
/// Integration constants accumulate across pieces so F is continuous.
inline PiecewiseFn antiderivative_from_zero(const PiecewiseFn& f) {
  PiecewiseFn z = normalize(f);
  if (auto lb = leading_behavior(z, Endpoint::ZeroPlus)) {
    if (lb->exponent <= Rational(-1))
      throw NonIntegrableAtZeroError(lb->exponent, lb->log_power);
  }
  std::vector<Piece> out;
  Scalar carry(0);
  bool first = true;
  for (const Piece& pc : z.pieces()) {
    auto a = detail::terms_antiderivative(pc.terms);
    // On the first piece every antiderivative exponent is positive, so the
    // limit of A at 0+ is zero and the constant is just zero.
    Scalar c0(0);
    if (!first) {
      Scalar at_lo = eval_terms_scalar(a, pc.lo);
      c0 = carry - at_lo;
      // Once a coefficient has degraded to double, an exactly-zero
      // continuity constant comes back as rounding residue; a residue
      // constant would corrupt the exact divergence analysis downstream.
      if (!c0.is_exact()) {
        double scale = std::max(std::abs(carry.to_double()),
                                std::abs(at_lo.to_double()));
        if (std::abs(c0.to_double()) <= 1e-12 * scale) c0 = Scalar(0);
      }
    }
    first = false;
    if (pc.hi) carry = eval_terms_scalar(a, *pc.hi) + c0;
    std::vector<PowerLogTerm> ts = a;
    if (!c0.is_zero()) ts.push_back(PowerLogTerm{c0, Rational(0), 0});
    out.push_back(Piece{pc.lo, pc.hi, std::move(ts)});
  }
  return normalize(PiecewiseFn::from_pieces(std::move(out)));
}

/// Right-continuous evaluation; at a breakpoint the right-hand piece wins.
inline double evaluate(const PiecewiseFn& f, double x) {
  if (!(x > 0.0)) throw std::domain_error("evaluate: x must be positive");
  const Piece* sel = &f.pieces().back();
  for (const Piece& pc : f.pieces()) {
    if (pc.lo.to_double() <= x && (!pc.hi || x < pc.hi->to_double())) {
      sel = &pc;
      break;
    }
  }
  return evaluate_terms(sel->terms, x);
}

/// Right-continuous value at an exact rational point.
inline Scalar value_at(const PiecewiseFn& f, const Rational& x) {
  if (!x.is_positive()) throw std::domain_error("value_at: x must be positive");
  for (const Piece& pc : f.pieces())
    if (pc.lo <= x && (!pc.hi || x < *pc.hi)) return eval_terms_scalar(pc.terms, x);
  return eval_terms_scalar(f.pieces().back().terms, x);
}

/// Limit from the left at x > 0 (the piece whose closure contains x from
/// below; power-log sums are continuous on piece interiors).
inline Scalar left_limit_at(const PiecewiseFn& f, const Rational& x) {
  if (!x.is_positive())
    throw std::domain_error("left_limit_at: x must be positive");
  for (const Piece& pc : f.pieces())
    if (pc.lo < x && (!pc.hi || x <= *pc.hi)) return eval_terms_scalar(pc.terms, x);
  return eval_terms_scalar(f.pieces().back().terms, x);
}

/// f restricted to (lo, hi), zero elsewhere.
inline PiecewiseFn restrict_to(const PiecewiseFn& f, const Rational& lo,
                               const UpperBound& hi) {
  std::vector<Piece> out;
  if (lo.is_positive()) out.push_back(Piece{Rational(0), lo, {}});
  for (const Piece& pc : f.pieces()) {
    Rational s = std::max(pc.lo, lo);
    UpperBound t = pc.hi;
    if (hi && (!t || *hi < *t)) t = hi;
    if (!t || s < *t) out.push_back(Piece{s, t, pc.terms});
  }
  if (hi) out.push_back(Piece{*hi, std::nullopt, {}});
  return normalize(PiecewiseFn::from_pieces(std::move(out)));
}

/// Signed integral of one term over (s, t) in double precision. An infinite
/// t needs exponent < -1, s = 0 needs exponent > -1; within those ranges the
/// antiderivative vanishes at the improper end.
inline double definite_term_integral(const PowerLogTerm& t, const Rational& s,
                                     const UpperBound& hi) {
  auto a = detail::term_antiderivative(t);
  double upper = hi ? evaluate_terms(a, hi->to_double()) : 0.0;
  double lower = s.is_zero() ? 0.0 : evaluate_terms(a, s.to_double());
  return upper - lower;
}

/// Numeric roots of a term sum inside (a, b), located by sampling and
/// bisection. Used for sign-resolved integration splits and extremum scans;
/// never for divergence decisions.
inline std::vector<double> find_sign_roots(const std::vector<PowerLogTerm>& ts,
                                           double a, double b, int samples = 96) {
  std::vector<double> roots;
  if (ts.size() < 1 || !(a < b)) return roots;
  bool logspace = b / a > 16.0;
  auto at = [&](int i) {
    double u = static_cast<double>(i) / samples;
    return logspace ? a * std::pow(b / a, u) : a + (b - a) * u;
  };
  double prev_x = at(0), prev_v = evaluate_terms(ts, prev_x);
  for (int i = 1; i <= samples; ++i) {
    double x = at(i), v = evaluate_terms(ts, x);
    if ((prev_v < 0 && v > 0) || (prev_v > 0 && v < 0)) {
      double lo = prev_x, hix = x;
      for (int it = 0; it < 200 && (hix - lo) > 1e-15 * hix; ++it) {
        double m = 0.5 * (lo + hix);
        double vm = evaluate_terms(ts, m);
        if ((vm < 0) == (prev_v < 0))
          lo = m;
        else
          hix = m;
      }
      roots.push_back(0.5 * (lo + hix));
    }
    if (v != 0.0) {
      prev_x = x;
      prev_v = v;
    }
  }
  return roots;
}

}  // namespace ordconv
