#include <catch_amalgamated.hpp>

#include "ordconv/generators.hpp"
#include "ordconv/multiplier.hpp"

using namespace ordconv;

namespace {

PiecewiseFn fn(std::vector<Piece> ps) { return PiecewiseFn::from_pieces(std::move(ps)); }

PowerLogTerm term(Rational c, Rational e, int k = 0) {
  return PowerLogTerm{Scalar(c), e, k};
}

PiecewiseFn phi_decaying() {  // 1 on (0,1], x^(-2/3) beyond (v=3, eps=1/3)
  return fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
             Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(-2, 3))}}});
}

PiecewiseFn phi_growing() {  // 1 on (0,1), x^(1/2) beyond (r=3/2, p=3, eps=1/6)
  return fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
             Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(1, 2))}}});
}

const AlgebraParams kGt{LpExponent(Rational(3)), LpExponent(Rational(3, 2))};
const AlgebraParams kLt{LpExponent(Rational(3, 2)), LpExponent(Rational(3))};

const ConditionResult* by_name(const std::vector<ConditionResult>& cs,
                               const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace

TEST_CASE("absolute continuity verdicts") {
  CHECK(check_absolutely_continuous(phi_decaying()).status == Status::Holds);

  PiecewiseFn unbounded0 = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(-1, 2))}},
                               Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(0))}}});
  ConditionResult c = check_absolutely_continuous(unbounded0);
  CHECK(c.status == Status::Fails);

  PiecewiseFn step = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(2), Rational(0))}}});
  ConditionResult s = check_absolutely_continuous(step);
  CHECK(s.status == Status::Fails);
  bool has_jump_loc = false;
  for (auto& kv : s.data) has_jump_loc |= kv.first == "at" && kv.second == "1";
  CHECK(has_jump_loc);
}

TEST_CASE("total variation growth exponents") {
  // decaying phi: V bounded, exponent 0, total variation
  // int_1^inf (2/3) x^(-5/3) = 1
  auto v1 = tv_growth_exponent(phi_decaying());
  REQUIRE(v1);
  CHECK(v1->exponent == Rational(0));
  CHECK(v1->log_power == 0);
  CHECK(v1->coeff.to_double() == Catch::Approx(1.0).epsilon(1e-12));

  // growing phi: V(x) = x^(1/2) - 1, exponent exactly 1/2 = 1/r - 1/p + eps
  auto v2 = tv_growth_exponent(phi_growing());
  REQUIRE(v2);
  CHECK(v2->exponent == Rational(1, 2));
  CHECK(v2->log_power == 0);
  CHECK(v2->coeff.to_double() == Catch::Approx(1.0));

  CHECK_FALSE(tv_growth_exponent(PiecewiseFn::constant(Scalar(5))).has_value());

  PiecewiseFn step = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(2), Rational(0))}}});
  CHECK_THROWS_AS(tv_growth_exponent(step), PreconditionError);
}

TEST_CASE("L_q tail surrogate probes") {
  // phi' = -(2/3)x^(-5/3) on (1,inf) lies in L_{3/2}(1,inf)
  ConditionResult ok = check_mphi_prime_surrogate(phi_decaying(), kGt, Rational(1),
                                                  LpExponent(Rational(3, 2)));
  CHECK(ok.status == Status::Holds);

  ConditionResult zero = check_mphi_prime_surrogate(
      PiecewiseFn::constant(Scalar(3)), kGt, Rational(1), LpExponent(Rational(1)));
  CHECK(zero.status == Status::Holds);
  bool zero_contribution = false;
  for (auto& kv : zero.data)
    zero_contribution |= kv.first == "contribution" && std::strtod(kv.second.c_str(), nullptr) == 0.0;
  CHECK(zero_contribution);

  // phi = x on (1,inf): phi' = 1 beyond 1 lies in no L_q(1,inf), q finite
  PiecewiseFn ramp = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(1))}}});
  ConditionResult bad = check_mphi_prime_surrogate(ramp, kGt, Rational(1),
                                                   LpExponent(Rational(3, 2)));
  CHECK(bad.status == Status::Fails);
  SurrogateSearch search = surrogate_search(ramp, kGt);
  CHECK(search.result.status == Status::Fails);
  CHECK_FALSE(search.contribution.has_value());

  CHECK_THROWS_AS(check_mphi_prime_surrogate(ramp, kGt, Rational(1), LpExponent(Rational(2))),
                  std::domain_error);  // q > r' = 3/2
}

TEST_CASE("necessary conditions for r > p") {
  auto all_hold = [](const std::vector<ConditionResult>& cs) {
    for (const auto& c : cs)
      if (c.status != Status::Holds) return false;
    return true;
  };
  CHECK(all_hold(check_necessary_r_gt_p(PiecewiseFn::constant(Scalar(1)), kGt)));
  CHECK(all_hold(check_necessary_r_gt_p(phi_decaying(), kGt)));

  PiecewiseFn ramp = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(1))}}});
  auto cs = check_necessary_r_gt_p(ramp, kGt);
  const ConditionResult* bounded = by_name(cs, "thm3.i.bounded");
  REQUIRE(bounded);
  CHECK(bounded->status == Status::Fails);

  CHECK_THROWS_AS(check_necessary_r_gt_p(ramp, kLt), RegimeError);
}

TEST_CASE("sufficient conditions for r > p") {
  SufficiencyOutcome dec = check_sufficient_r_gt_p(phi_decaying(), kGt);
  REQUIRE(dec.upper_bound.has_value());
  // bound = (cheapest surrogate contribution) + sup + ||phi||_v: the q = 3/2
  // probe gives ((2/3)^(3/2) * int_1^inf x^(-5/2))^(2/3) = (2/3)^(5/3),
  // sup = 1 and ||phi||_3 = 2^(1/3)
  double want = std::pow(2.0 / 3.0, 5.0 / 3.0) + 1.0 + std::pow(2.0, 1.0 / 3.0);
  CHECK(*dec.upper_bound == Catch::Approx(want).epsilon(1e-9));

  SufficiencyOutcome one = check_sufficient_r_gt_p(PiecewiseFn::constant(Scalar(1)), kGt);
  CHECK_FALSE(one.upper_bound.has_value());
  const ConditionResult* lv = by_name(one.conditions, "thm4.i.phi-in-Lv");
  REQUIRE(lv);
  CHECK(lv->status == Status::Fails);

  SufficiencyOutcome zero = check_sufficient_r_gt_p(PiecewiseFn::zero(), kGt);
  REQUIRE(zero.upper_bound.has_value());
  CHECK(*zero.upper_bound == 0.0);
}

TEST_CASE("sufficient conditions for r < p") {
  SufficiencyOutcome one = check_sufficient_r_lt_p(PiecewiseFn::constant(Scalar(1)), kLt);
  REQUIRE(one.upper_bound.has_value());
  CHECK(*one.upper_bound == Catch::Approx(2.0));

  SufficiencyOutcome grow = check_sufficient_r_lt_p(phi_growing(), kLt);
  CHECK_FALSE(grow.upper_bound.has_value());
  const ConditionResult* c1 = by_name(grow.conditions, "thm6.i.bounded-or-Lp");
  REQUIRE(c1);
  CHECK(c1->status == Status::Fails);

  SufficiencyOutcome dec = check_sufficient_r_lt_p(phi_decaying(), kLt);
  CHECK(dec.upper_bound.has_value());
}

TEST_CASE("necessary conditions for r < p") {
  auto cs = check_necessary_r_lt_p(phi_growing(), kLt);
  REQUIRE(cs.size() == 4);
  for (const auto& c : cs) CHECK(c.status == Status::Holds);
  const ConditionResult* growth = by_name(cs, "thm7.iv.growth");
  REQUIRE(growth);
  bool has_exponent = false;
  for (auto& kv : growth->data)
    has_exponent |= kv.first == "lp_growth_exponent" && kv.second == "5/6";
  CHECK(has_exponent);

  PiecewiseFn step = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(2), Rational(0))}}});
  auto cs2 = check_necessary_r_lt_p(step, kLt);
  CHECK(by_name(cs2, "thm7.i.continuous")->status == Status::Fails);

  PiecewiseFn sing = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(-1, 2))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(0))}}});
  auto cs3 = check_necessary_r_lt_p(sing, kLt);
  const ConditionResult* loc = by_name(cs3, "thm7.iii.local-Lp");
  REQUIRE(loc);
  CHECK(loc->status == Status::Fails);
  bool cert = false;
  for (auto& kv : loc->data) cert |= kv.first == "exponent" && kv.second == "-3/2";
  CHECK(cert);
}

TEST_CASE("witness search across the three examples") {
  auto w1 = witness_search(PiecewiseFn::constant(Scalar(1)), kGt);
  REQUIRE(w1);
  CHECK(w1->alpha == Rational(1, 2));
  CHECK(w1->failure.endpoint == Endpoint::Infinity);
  CHECK(w1->failure.exponent == Rational(-3, 4));
  CHECK(ap_norm(w1->f, kGt.r()).finite());

  auto w2 = witness_search(phi_growing(), kLt);
  REQUIRE(w2);
  CHECK(w2->alpha == Rational(5, 6));
  CHECK_FALSE(lp_norm(mul(phi_growing(), antiderivative_from_zero(w2->f)), kLt.p()).finite());

  CHECK_FALSE(witness_search(phi_decaying(), kGt).has_value());
}

TEST_CASE("operator norm lower bounds") {
  CHECK(operator_norm_lower_bound(PiecewiseFn::zero(), kGt,
                                  default_witness_pool(kGt, 5)) == 0.0);

  // identity operator at r = p: every ratio is exactly 1
  AlgebraParams same{LpExponent(Rational(2)), LpExponent(Rational(2))};
  double lb = operator_norm_lower_bound(PiecewiseFn::constant(Scalar(1)), same,
                                        default_witness_pool(same, 6));
  CHECK(lb == Catch::Approx(1.0).epsilon(1e-10));

  CHECK_THROWS_AS(
      operator_norm_lower_bound(phi_decaying(), kGt, {PiecewiseFn::constant(Scalar(1))}),
      std::invalid_argument);
}

TEST_CASE("lower bound consistent with certified upper bound") {
  MultiplierReport rep = classify(phi_decaying(), kGt);
  REQUIRE(rep.norm_upper_bound);
  double lb = operator_norm_lower_bound(phi_decaying(), kGt,
                                        default_witness_pool(kGt, 20));
  CHECK(lb <= *rep.norm_upper_bound * (1 + 1e-9));
}

TEST_CASE("pool scans give the same result on any thread count") {
  auto pool = default_witness_pool(kGt, 12);
  double one = operator_norm_lower_bound(phi_decaying(), kGt, pool, {}, 1);
  double four = operator_norm_lower_bound(phi_decaying(), kGt, pool, {}, 4);
  CHECK(one == four);
}

TEST_CASE("point evaluation constant stays in the unit interval") {
  for (auto p : {LpExponent(Rational(1)), LpExponent(Rational(2)), LpExponent::infinite()}) {
    for (auto x : {Rational(1, 2), Rational(1), Rational(4)}) {
      double k = point_eval_constant(x, p);
      CHECK(k > 0.0);
      CHECK(k <= 1.0);
    }
  }
  // frozen oracle: the w = s = 1 triangle at x = 1, p = 1 has value
  // fhat(1)/|||f|||_1 = 1/(2 + 1) = 1/3
  CHECK(point_eval_constant(Rational(1), LpExponent(Rational(1))) >= 1.0 / 3.0 - 1e-12);
  // at p = inf a box of mass 1/2 is optimal among scaled boxes and the
  // estimate is nondecreasing in x
  double prev = 0;
  for (auto x : {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2), Rational(8)}) {
    double k = point_eval_constant(x, LpExponent::infinite());
    CHECK(k >= prev - 1e-12);
    prev = k;
  }
}

TEST_CASE("classification of the three worked examples") {
  MultiplierReport m1 = classify(PiecewiseFn::constant(Scalar(1)), kGt);
  CHECK(m1.verdict == Verdict::NotMultiplier);
  CHECK(m1.witness.has_value());

  MultiplierReport m2 = classify(phi_decaying(), kGt);
  CHECK(m2.verdict == Verdict::Multiplier);
  CHECK(m2.norm_upper_bound.has_value());
  CHECK_FALSE(m2.witness.has_value());

  MultiplierReport m3 = classify(phi_growing(), kLt);
  CHECK(m3.verdict == Verdict::NotMultiplier);
  REQUIRE(m3.witness.has_value());
  for (const auto& c : m3.necessary) CHECK(c.status == Status::Holds);
}

TEST_CASE("equal exponents fall under the self-multiplier conditions") {
  AlgebraParams same{LpExponent(Rational(2)), LpExponent(Rational(2))};
  MultiplierReport rep = classify(PiecewiseFn::constant(Scalar(1)), same);
  CHECK(rep.regime == Regime::Requal);
  CHECK(rep.verdict == Verdict::Multiplier);
  REQUIRE(rep.norm_upper_bound);
  CHECK(*rep.norm_upper_bound == Catch::Approx(2.0));

  PiecewiseFn ramp = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(1))}}});
  MultiplierReport unb = classify(ramp, same);
  CHECK(unb.verdict == Verdict::NotMultiplier);
}

TEST_CASE("failure certificates re-verify independently") {
  // unbounded certificate: recompute the leading behavior it quotes
  PiecewiseFn ramp = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(1), Rational(1))}}});
  auto cs = check_necessary_r_gt_p(ramp, kGt);
  const ConditionResult* bounded = by_name(cs, "thm3.i.bounded");
  REQUIRE(bounded);
  REQUIRE(bounded->status == Status::Fails);
  Rational quoted(0);
  for (auto& kv : bounded->data)
    if (kv.first == "exponent") quoted = *Rational::parse(kv.second);
  auto lb = leading_behavior(ramp, Endpoint::Infinity);
  REQUIRE(lb);
  CHECK(lb->exponent == quoted);
  CHECK(lb->exponent > Rational(0));

  // jump certificate: one-sided values really differ at the quoted point
  PiecewiseFn step = fn({Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}},
                         Piece{Rational(1), std::nullopt, {term(Rational(2), Rational(0))}}});
  ConditionResult ac = check_absolutely_continuous(step);
  REQUIRE(ac.status == Status::Fails);
  Rational at(0);
  for (auto& kv : ac.data)
    if (kv.first == "at") at = *Rational::parse(kv.second);
  CHECK(left_limit_at(step, at).rat() != value_at(step, at).rat());
}
