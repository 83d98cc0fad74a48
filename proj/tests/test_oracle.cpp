#include <catch_amalgamated.hpp>

#include "ordconv/algebra.hpp"
#include "ordconv/oracle.hpp"

using namespace ordconv;

namespace {

PiecewiseFn fn(std::vector<Piece> ps) { return PiecewiseFn::from_pieces(std::move(ps)); }

PowerLogTerm term(Rational c, Rational e, int k = 0) {
  return PowerLogTerm{Scalar(c), e, k};
}

}  // namespace

TEST_CASE("basic definite integral") {
  PiecewiseFn f = fn({Piece{Rational(0), std::nullopt, {term(Rational(1), Rational(1))}}});
  QuadratureResult q = quad_integral(f, Rational(0), Rational(1));
  CHECK(std::abs(q.value - 0.5) < 1e-12);
  CHECK(q.abs_error_estimate + (q.truncation ? q.truncation->tail_bound : 0) >=
        std::abs(q.value - 0.5));
}

TEST_CASE("semi-infinite tail with recorded truncation") {
  PiecewiseFn f = fn({Piece{Rational(0), Rational(1), {}},
                      Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(-3, 2))}}});
  QuadratureResult q = quad_integral(f, Rational(1), std::nullopt, {1e-10, 1 << 14});
  CHECK(std::abs(q.value - 2.0) < 2e-10 * 2.0 + 1e-12);
  REQUIRE(q.truncation.has_value());
  CHECK(q.truncation->used_cutoff > 1.0);
  CHECK(q.abs_error_estimate + q.truncation->tail_bound >= std::abs(q.value - 2.0));
}

TEST_CASE("endpoint singularity handled by power substitution") {
  PiecewiseFn f = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(-1, 2))}}});
  QuadratureResult q = quad_integral(f, Rational(0), Rational(1));
  CHECK(std::abs(q.value - 2.0) < 1e-9);
}

TEST_CASE("quadrature refuses integrals the exact layer marked divergent") {
  PiecewiseFn tail = fn({Piece{Rational(0), Rational(1), {}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(-1, 2))}}});
  CHECK_THROWS_AS(quad_integral(tail, Rational(1), std::nullopt),
                  ConvergenceNotCertifiedError);
  PiecewiseFn head = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(-3, 2))}}});
  CHECK_THROWS_AS(quad_integral(head, Rational(0), Rational(1)),
                  ConvergenceNotCertifiedError);
  CHECK_THROWS_AS(quad_lp_norm(tail, Rational(2)), ConvergenceNotCertifiedError);
}

TEST_CASE("quadrature L_p norms against closed forms") {
  // transform of the decaying-tail example at alpha = 1/2
  PiecewiseFn fhat = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(1))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(-1, 2))}}});
  QuadratureResult q = quad_lp_norm(fhat, Rational(3), {1e-10, 1 << 14});
  double want = std::pow(9.0 / 4.0, 1.0 / 3.0);
  CHECK(std::abs(q.value - want) / want < 1e-9);

  CHECK(quad_lp_norm(PiecewiseFn::zero(), Rational(2)).value == 0.0);

  // int_0^1 x^2 ln^2 x = 2/27
  PiecewiseFn xlnx = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(1), 1)}}});
  QuadratureResult q2 = quad_lp_norm(xlnx, Rational(2), {1e-11, 1 << 14});
  double want2 = std::sqrt(2.0 / 27.0);
  CHECK(std::abs(q2.value - want2) / want2 < 1e-9);
}

TEST_CASE("sign changes are resolved before |f|^p panels") {
  // |2x - 1| on (0,1): integral of |f| is 1/4 + 1/4 = 1/2... rather
  // int_0^1 |2x-1| dx = 1/2; the kink at 1/2 must not degrade accuracy.
  PiecewiseFn f = fn({Piece{Rational(0), Rational(1),
                            {term(Rational(2), Rational(1)), term(Rational(-1), Rational(0))}}});
  QuadratureResult q = quad_piecewise(f, Rational(1), {1e-12, 1 << 14});
  CHECK(std::abs(q.value - 0.5) < 1e-11);
}

TEST_CASE("sample compare separates equal from unequal") {
  PiecewiseFn f = fn({Piece{Rational(0), Rational(1),
                            {term(Rational(1), Rational(1)), term(Rational(1), Rational(1))}}});
  auto same = sample_compare(f, normalize(f), 64);
  CHECK(same.max_rel_dev == 0.0);

  PiecewiseFn x = fn({Piece{Rational(0), std::nullopt, {term(Rational(1), Rational(1))}}});
  PiecewiseFn xeps = fn({Piece{Rational(0), std::nullopt,
                               {term(Rational(1), Rational(1)), term(Rational(1, 1000), Rational(0))}}});
  auto diff = sample_compare(x, xeps, 64);
  CHECK(diff.max_rel_dev > 1e-10);
}

TEST_CASE("error honesty on closed-form integrals") {
  struct Case {
    PiecewiseFn f;
    UpperBound hi;
    double truth;
  };
  std::vector<Case> cases;
  // int_0^1 3x^2 = 1
  cases.push_back({fn({Piece{Rational(0), std::nullopt, {term(Rational(3), Rational(2))}}}),
                   Rational(1), 1.0});
  // int_1^inf 2 x^-3 = 1
  cases.push_back({fn({Piece{Rational(0), Rational(1), {}},
                       Piece{Rational(1), std::nullopt, {term(Rational(2), Rational(-3))}}}),
                   std::nullopt, 1.0});
  // int_0^1 x^(-1/3) = 3/2
  cases.push_back({fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(-1, 3))}}}),
                   Rational(1), 1.5});
  for (const auto& c : cases) {
    QuadratureResult q = quad_integral(c.f, Rational(0), c.hi, {1e-10, 1 << 14});
    double err = q.abs_error_estimate + (q.truncation ? q.truncation->tail_bound : 0);
    CHECK(std::abs(q.value - c.truth) <= err + 1e-12);
  }
}
