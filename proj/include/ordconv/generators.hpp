#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ordconv/algebra.hpp"
#include "ordconv/symfunc.hpp"

namespace ordconv {

/// Fixed documented default seed for every randomized scenario.
inline constexpr std::uint64_t kDefaultSeed = 987654321ULL;

/// Seeded generator for random members of the function family. Two
/// rational-closed sub-families keep the whole convolution/transform
/// pipeline inside exact rational coefficients:
///   - poly: piecewise polynomials over arbitrary rational breakpoints with
///     an integer power tail (exponent <= -2) or a zero tail;
///   - bp1: two pieces split at x = 1, fractional exponents and log factors
///     allowed (boundary evaluations at 1 are rational).
/// Mixing the two in one product would put fractional powers against
/// non-unit breakpoints, so paired draws come from a single sub-family.
class FnGen {
 public:
  explicit FnGen(std::uint64_t seed = kDefaultSeed) : eng_(seed) {}

  std::mt19937_64& engine() { return eng_; }

  int int_in(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(eng_);
  }

  Rational rational_in(int num_lo, int num_hi, int den_hi) {
    int den = int_in(1, den_hi);
    int num = int_in(num_lo, num_hi);
    return Rational(num, den);
  }

  Rational nonzero_coeff() {
    int num = 0;
    while (num == 0) num = int_in(-4, 4);
    return Rational(num, int_in(1, 3));
  }

  /// L_1 member of the poly sub-family.
  PiecewiseFn l1_poly() {
    static const Rational kBps[] = {Rational(1, 4), Rational(1, 3), Rational(1, 2),
                                    Rational(2, 3), Rational(1),    Rational(3, 2),
                                    Rational(2),    Rational(3),    Rational(4)};
    int nbp = int_in(0, 3);
    std::vector<Rational> bps;
    for (int i = 0; i < nbp; ++i) bps.push_back(kBps[int_in(0, 8)]);
    std::sort(bps.begin(), bps.end());
    bps.erase(std::unique(bps.begin(), bps.end()), bps.end());

    std::vector<Piece> ps;
    Rational lo(0);
    for (const Rational& b : bps) {
      std::vector<PowerLogTerm> ts;
      int nterms = int_in(0, 2);
      for (int t = 0; t < nterms; ++t)
        ts.push_back(PowerLogTerm{Scalar(nonzero_coeff()), Rational(int_in(0, 3)), 0});
      ps.push_back(Piece{lo, b, std::move(ts)});
      lo = b;
    }
    std::vector<PowerLogTerm> tail;
    if (int_in(0, 1) == 0 && !lo.is_zero()) {
      tail.push_back(PowerLogTerm{Scalar(nonzero_coeff()), Rational(-int_in(2, 4)), 0});
    } else if (lo.is_zero()) {
      // single piece overall: keep it integrable by using a compact bump
      ps.push_back(Piece{lo, Rational(1),
                         {PowerLogTerm{Scalar(nonzero_coeff()), Rational(int_in(0, 2)), 0}}});
      lo = Rational(1);
      tail.push_back(PowerLogTerm{Scalar(nonzero_coeff()), Rational(-int_in(2, 4)), 0});
    }
    ps.push_back(Piece{lo, std::nullopt, std::move(tail)});
    return PiecewiseFn::from_pieces(std::move(ps));
  }

  /// L_1 member of the bp1 sub-family: head exponents > -1 (logs allowed),
  /// tail exponents < -1.
  PiecewiseFn l1_bp1() {
    static const Rational kHead[] = {Rational(-3, 4), Rational(-1, 2), Rational(-1, 3),
                                     Rational(0),     Rational(1, 3),  Rational(1, 2),
                                     Rational(1),     Rational(2)};
    static const Rational kTail[] = {Rational(-3, 2), Rational(-2), Rational(-5, 2),
                                     Rational(-3),    Rational(-4)};
    std::vector<PowerLogTerm> head, tail;
    int nh = int_in(1, 2), nt = int_in(1, 2);
    for (int i = 0; i < nh; ++i)
      head.push_back(PowerLogTerm{Scalar(nonzero_coeff()), kHead[int_in(0, 7)],
                                  int_in(0, 4) == 4 ? int_in(1, 2) : 0});
    for (int i = 0; i < nt; ++i)
      tail.push_back(PowerLogTerm{Scalar(nonzero_coeff()), kTail[int_in(0, 4)],
                                  int_in(0, 4) == 4 ? 1 : 0});
    std::vector<Piece> ps;
    ps.push_back(Piece{Rational(0), Rational(1), std::move(head)});
    ps.push_back(Piece{Rational(1), std::nullopt, std::move(tail)});
    return PiecewiseFn::from_pieces(std::move(ps));
  }

  PiecewiseFn l1_member() { return int_in(0, 1) ? l1_poly() : l1_bp1(); }

  /// A pair from one sub-family; exact rational closure is preserved under
  /// convolution, transform and pointwise products of the pair.
  std::pair<PiecewiseFn, PiecewiseFn> l1_pair() {
    if (int_in(0, 1)) return {l1_poly(), l1_poly()};
    return {l1_bp1(), l1_bp1()};
  }

  /// Member of A_p built transform-first: fhat rises like x^a from 0,
  /// optionally plateaus, then decays like x^(-b) with b > 1/p; f is its
  /// exact derivative.
  PiecewiseFn ap_member(const LpExponent& p) {
    Rational a(int_in(1, 4), 2);  // rise exponent in {1/2, 1, 3/2, 2}
    Rational c = nonzero_coeff();
    Rational inv_p = p.is_infinite() ? Rational(0) : Rational(1) / p.finite_value();
    static const Rational kDelta[] = {Rational(1, 4), Rational(1, 2), Rational(1),
                                      Rational(2)};
    Rational b = inv_p + kDelta[int_in(0, 3)];
    // the plateau variant needs 2^b rational to keep the tail coefficient
    // exact; otherwise the tail hangs off the junction at 1
    bool plateau = int_in(0, 2) == 0 && exact_pow(Rational(2), b).has_value();

    std::vector<Piece> ps;
    ps.push_back(Piece{Rational(0), Rational(1), {PowerLogTerm{Scalar(c), a, 0}}});
    Rational tail_from(1);
    Rational tail_coeff = c;
    if (plateau) {
      ps.push_back(Piece{Rational(1), Rational(2), {PowerLogTerm{Scalar(c), Rational(0), 0}}});
      tail_from = Rational(2);
      tail_coeff = c * *exact_pow(Rational(2), b);
    }
    ps.push_back(Piece{tail_from, std::nullopt, {PowerLogTerm{Scalar(tail_coeff), -b, 0}}});
    PiecewiseFn fhat = PiecewiseFn::from_pieces(std::move(ps));
    return differentiate(fhat);
  }

  /// Pure-power function on (0,1)/(1,inf) plus an exponent p, composed so
  /// that the L_p integral is convergent or divergent on demand.
  struct PurePowerCase {
    PiecewiseFn f;
    Rational p;
    bool divergent;
  };

  PurePowerCase pure_power_case() {
    static const Rational kP[] = {Rational(1), Rational(3, 2), Rational(2),
                                  Rational(7, 3), Rational(3)};
    Rational p = kP[int_in(0, 4)];
    int kind = int_in(0, 2);  // 0 convergent, 1 divergent at 0+, 2 at inf
    // head exponent e0: convergent needs e0*p > -1; tail needs e1*p < -1
    Rational critical = Rational(-1) / p;
    Rational e0 = kind == 1 ? critical - Rational(int_in(0, 2), 2)
                            : critical + Rational(int_in(1, 4), 4);
    Rational e1 = kind == 2 ? critical + Rational(int_in(0, 2), 2)
                            : critical - Rational(int_in(1, 4), 4);
    std::vector<Piece> ps;
    ps.push_back(Piece{Rational(0), Rational(1),
                       {PowerLogTerm{Scalar(nonzero_coeff()), e0, 0}}});
    ps.push_back(Piece{Rational(1), std::nullopt,
                       {PowerLogTerm{Scalar(nonzero_coeff()), e1, 0}}});
    return {PiecewiseFn::from_pieces(std::move(ps)), p, kind != 0};
  }

  /// Bounded phi with decaying derivative: a self-multiplier of A_r for
  /// every r.
  PiecewiseFn bounded_decaying_phi() {
    Rational c0(int_in(1, 6), 2);
    Rational c1(int_in(-2, 2), 2);
    Rational d(int_in(1, 4), 2);  // tail decay exponent
    std::vector<PowerLogTerm> head{PowerLogTerm{Scalar(c0), Rational(0), 0}};
    if (!c1.is_zero()) head.push_back(PowerLogTerm{Scalar(c1), Rational(1), 0});
    Rational at1 = c0 + c1;
    if (at1.is_zero()) at1 = c0;  // keep the tail nonzero
    std::vector<Piece> ps;
    ps.push_back(Piece{Rational(0), Rational(1), std::move(head)});
    ps.push_back(Piece{Rational(1), std::nullopt, {PowerLogTerm{Scalar(at1), -d, 0}}});
    if ((c0 + c1).is_zero())
      ps[0].terms.pop_back();  // drop the ramp instead of a jump at 1
    return PiecewiseFn::from_pieces(std::move(ps));
  }

 private:
  std::mt19937_64 eng_;
};

/// The three-step test function whose transform rises to 1 on (0, a),
/// plateaus to b, descends linearly to 0 at c, and vanishes beyond.
inline PiecewiseFn tent_function(const Rational& a, const Rational& b,
                                 const Rational& c) {
  if (!(Rational(0) < a && a < b && b < c))
    throw std::domain_error("tent_function: need 0 < a < b < c");
  std::vector<Piece> ps;
  ps.push_back(Piece{Rational(0), a, {PowerLogTerm{Scalar(Rational(1) / a), Rational(0), 0}}});
  ps.push_back(Piece{a, b, {}});
  ps.push_back(Piece{b, c, {PowerLogTerm{Scalar(Rational(1) / (b - c)), Rational(0), 0}}});
  return PiecewiseFn::from_pieces(std::move(ps));
}

}  // namespace ordconv
