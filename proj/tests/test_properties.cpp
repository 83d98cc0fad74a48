#include <catch_amalgamated.hpp>

#include "ordconv/dsl.hpp"
#include "ordconv/generators.hpp"
#include "ordconv/json_io.hpp"
#include "ordconv/multiplier.hpp"
#include "ordconv/oracle.hpp"

using namespace ordconv;
using nlohmann::json;

namespace {

bool valid_partition(const PiecewiseFn& f) {
  const auto& ps = f.pieces();
  if (!ps.front().lo.is_zero() || ps.back().hi) return false;
  for (std::size_t i = 0; i + 1 < ps.size(); ++i)
    if (!ps[i].hi || *ps[i].hi != ps[i + 1].lo) return false;
  return true;
}

PowerLogTerm term(Rational c, Rational e, int k = 0) {
  return PowerLogTerm{Scalar(c), e, k};
}

}  // namespace

TEST_CASE("closure of the family under the calculus") {
  FnGen gen(2024);
  for (int i = 0; i < 100; ++i) {
    auto [f, g] = gen.l1_pair();
    PiecewiseFn sum = add(f, g), prod = mul(f, g), df = differentiate(f);
    PiecewiseFn F = antiderivative_from_zero(f);
    for (const PiecewiseFn* h : {&sum, &prod, &df, &F}) {
      CHECK(valid_partition(*h));
      PiecewiseFn n = normalize(*h);
      CHECK(symbolically_equal(n, piecewise_from_json(json(n))));
    }
  }
}

TEST_CASE("derivative of the antiderivative returns the function") {
  FnGen gen(31);
  for (int i = 0; i < 100; ++i) {
    PiecewiseFn f = gen.l1_member();
    CHECK(symbolically_equal(differentiate(antiderivative_from_zero(f)), f));
  }
}

TEST_CASE("pointwise product evaluates multiplicatively") {
  FnGen gen(47);
  std::mt19937_64 xs(48);
  std::uniform_real_distribution<double> uni(-5.0, 5.0);
  for (int i = 0; i < 20; ++i) {
    auto [f, g] = gen.l1_pair();
    PiecewiseFn prod = mul(f, g);
    for (int j = 0; j < 100; ++j) {
      double x = std::pow(10.0, uni(xs));
      double lhs = evaluate(prod, x);
      double rhs = evaluate(f, x) * evaluate(g, x);
      CHECK(std::abs(lhs - rhs) <=
            1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
    }
  }
}

TEST_CASE("leading behavior predicts the endpoint limit") {
  // family with well-separated exponents and a single log at most, so the
  // ratio settles within the sampled range
  std::mt19937_64 rng(7777);
  auto rnd = [&](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  for (int i = 0; i < 60; ++i) {
    Rational e_head(rnd(-2, 4), 2);          // step 1/2
    Rational e_tail = e_head - Rational(rnd(2, 6), 2);
    int k_head = rnd(0, 1), k_tail = rnd(0, 1);
    Rational c_head(rnd(1, 5)), c_tail(rnd(1, 5), 2);
    PiecewiseFn f = PiecewiseFn::from_pieces(
        {Piece{Rational(0), std::nullopt,
               {PowerLogTerm{Scalar(c_head), e_head, k_head},
                PowerLogTerm{Scalar(c_tail), e_tail, k_tail}}}});
    for (Endpoint ep : {Endpoint::ZeroPlus, Endpoint::Infinity}) {
      auto lb = leading_behavior(f, ep);
      REQUIRE(lb);
      double x = ep == Endpoint::Infinity ? std::pow(10.0, 40) : std::pow(10.0, -40);
      double lead = lb->coeff.to_double() * std::pow(x, lb->exponent.to_double());
      for (int j = 0; j < lb->log_power; ++j) lead *= std::log(x);
      double ratio = evaluate(f, x) / lead;
      CHECK(std::abs(ratio - 1.0) < 1e-3);
    }
  }
}

TEST_CASE("transform homomorphism on random pairs") {
  FnGen gen(55);
  for (int i = 0; i < 40; ++i) {
    auto [f, g] = gen.l1_pair();
    PiecewiseFn lhs = gelfand_transform(order_convolve(f, g));
    PiecewiseFn rhs = mul(gelfand_transform(f), gelfand_transform(g));
    CHECK(symbolically_equal(lhs, rhs));
    CHECK(sample_compare(lhs, rhs, 50, 1000 + i).max_rel_dev < 1e-10);
  }
}

TEST_CASE("order convolution is commutative and associative") {
  FnGen gen(66);
  for (int i = 0; i < 25; ++i) {
    PiecewiseFn f = gen.l1_poly(), g = gen.l1_poly(), h = gen.l1_poly();
    CHECK(symbolically_equal(order_convolve(f, g), order_convolve(g, f)));
    CHECK(symbolically_equal(order_convolve(order_convolve(f, g), h),
                             order_convolve(f, order_convolve(g, h))));
  }
  for (int i = 0; i < 25; ++i) {
    PiecewiseFn f = gen.l1_bp1(), g = gen.l1_bp1(), h = gen.l1_bp1();
    CHECK(symbolically_equal(order_convolve(f, g), order_convolve(g, f)));
    CHECK(symbolically_equal(order_convolve(order_convolve(f, g), h),
                             order_convolve(f, order_convolve(g, h))));
  }
}

TEST_CASE("Banach algebra bound for the L_1 norm") {
  FnGen gen(77);
  LpExponent one{Rational(1)};
  for (int i = 0; i < 30; ++i) {
    auto [f, g] = gen.l1_pair();
    double lhs = lp_norm(order_convolve(f, g), one).value;
    double rhs = lp_norm(f, one).value * lp_norm(g, one).value;
    CHECK(lhs <= rhs * (1 + 1e-8) + 1e-12);
  }
  // equality for nonnegative factors
  for (int i = 0; i < 10; ++i) {
    PiecewiseFn f = PiecewiseFn::from_pieces(
        {Piece{Rational(0), Rational(i + 1), {term(Rational(i + 1, 2), Rational(0))}}});
    PiecewiseFn g = PiecewiseFn::from_pieces(
        {Piece{Rational(0), Rational(2), {term(Rational(1, 3), Rational(1))}}});
    double lhs = lp_norm(order_convolve(f, g), one).value;
    double rhs = lp_norm(f, one).value * lp_norm(g, one).value;
    CHECK(lhs == Catch::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("transform is dominated by the L_1 norm") {
  FnGen gen(88);
  for (int i = 0; i < 40; ++i) {
    PiecewiseFn f = gen.l1_member();
    double l1 = lp_norm(f, LpExponent(Rational(1))).value;
    double sup = sup_norm(gelfand_transform(f)).value;
    CHECK(sup <= l1 * (1 + 1e-8) + 1e-12);
  }
}

TEST_CASE("unit balls embed with norm below two") {
  FnGen gen(99);
  const std::pair<Rational, Rational> grid[] = {
      {Rational(1), Rational(3, 2)}, {Rational(3, 2), Rational(3)},
      {Rational(2), Rational(4)}};
  for (const auto& [pq, rq] : grid) {
    LpExponent p(pq), r(rq);
    for (int i = 0; i < 10; ++i) {
      PiecewiseFn f = gen.ap_member(p);
      double np = ap_norm(f, p).value;
      PiecewiseFn fs = scale(f, Scalar::inexact(1.0 / np));
      NormValue nr = ap_norm(fs, r);
      REQUIRE(nr.finite());
      CHECK(nr.value < 2.0);
      CHECK(lp_norm(antiderivative_from_zero(fs), r).value < 1.0);
    }
  }
}

TEST_CASE("A_p membership is nested upward") {
  FnGen gen(111);
  for (int i = 0; i < 30; ++i) {
    LpExponent p{Rational(1 + (i % 3), 1)};
    PiecewiseFn f = gen.ap_member(p);
    REQUIRE(in_ap(f, p));
    LpExponent r{p.finite_value() + Rational(1 + (i % 2))};
    CHECK(in_ap(f, r));
    CHECK(in_ap(f, LpExponent::infinite()));
  }
}

TEST_CASE("approximate identity contracts the A_p distance") {
  PiecewiseFn f = PiecewiseFn::from_pieces(
      {Piece{Rational(0), Rational(1), {term(Rational(1), Rational(0))}}});
  for (Rational pq : {Rational(1), Rational(2)}) {
    LpExponent p(pq);
    double prev = std::numeric_limits<double>::infinity();
    double best = prev;
    for (int k = 1; k <= 10; ++k) {
      std::int64_t n = std::int64_t(1) << k;
      PiecewiseFn en = PiecewiseFn::from_pieces(
          {Piece{Rational(0), Rational(1, n), {term(Rational(n), Rational(0))}}});
      double v = ap_norm(sub(order_convolve(f, en), f), p).value;
      CHECK(v <= prev * (1 + 1e-10));
      prev = v;
      best = std::min(best, v);
    }
    CHECK(best < 0.01);
  }
}

TEST_CASE("witnesses returned by the search always satisfy their contract") {
  std::vector<PiecewiseFn> phis = {
      PiecewiseFn::constant(Scalar(1)),
      parse_function("0..1: 1; 1..inf: x^(1/2)"),
      parse_function("0..1: 1; 1..inf: x^(-2/3)"),
      parse_function("0..1: x; 1..inf: 1"),
  };
  std::vector<AlgebraParams> prms = {
      {LpExponent(Rational(3)), LpExponent(Rational(3, 2))},
      {LpExponent(Rational(3, 2)), LpExponent(Rational(3))},
      {LpExponent(Rational(2)), LpExponent(Rational(2))},
      {LpExponent::infinite(), LpExponent(Rational(2))},
  };
  for (const auto& phi : phis) {
    for (const auto& prm : prms) {
      auto w = witness_search(phi, prm);
      if (!w) continue;
      CHECK(ap_norm(w->f, prm.r()).finite());
      CHECK_FALSE(lp_norm(mul(phi, antiderivative_from_zero(w->f)), prm.p()).finite());
    }
  }
}

TEST_CASE("classify never certifies a multiplier alongside a witness") {
  FnGen gen(131);
  std::vector<AlgebraParams> prms = {
      {LpExponent(Rational(3)), LpExponent(Rational(3, 2))},
      {LpExponent(Rational(3, 2)), LpExponent(Rational(3))},
      {LpExponent(Rational(2)), LpExponent(Rational(2))},
  };
  for (int i = 0; i < 20; ++i) {
    PiecewiseFn phi = gen.bounded_decaying_phi();
    for (const auto& prm : prms) {
      MultiplierReport rep = classify(phi, prm);  // throws on inconsistency
      if (rep.verdict == Verdict::Multiplier) CHECK_FALSE(rep.witness.has_value());
    }
  }
}

TEST_CASE("certified multipliers keep sup within twice the bound") {
  FnGen gen(141);
  AlgebraParams prm{LpExponent(Rational(3)), LpExponent(Rational(3, 2))};
  PiecewiseFn phi = parse_function("0..1: 1; 1..inf: x^(-2/3)");
  MultiplierReport rep = classify(phi, prm, {}, true);
  REQUIRE(rep.norm_upper_bound);
  REQUIRE(rep.norm_lower_bound);
  CHECK(*rep.norm_lower_bound <= *rep.norm_upper_bound * (1 + 1e-9));
  CHECK(sup_norm(phi).value <= 2 * *rep.norm_upper_bound);
}

TEST_CASE("classification is total over a varied phi pool") {
  // arbitrary family members (decaying, growing, logged, signed) against a
  // grid of exponent pairs: classify must always return a structurally
  // sound report, whatever the verdict
  FnGen gen(161);
  std::vector<AlgebraParams> prms = {
      {LpExponent(Rational(3)), LpExponent(Rational(3, 2))},
      {LpExponent(Rational(5, 2)), LpExponent(Rational(2))},
      {LpExponent(Rational(3, 2)), LpExponent(Rational(3))},
      {LpExponent(Rational(1)), LpExponent(Rational(2))},
      {LpExponent(Rational(2)), LpExponent(Rational(2))},
      {LpExponent::infinite(), LpExponent(Rational(3, 2))},
      {LpExponent(Rational(2)), LpExponent::infinite()},
  };
  for (int i = 0; i < 25; ++i) {
    PiecewiseFn phi = gen.l1_member();  // rich shapes; role here is just "phi"
    for (const auto& prm : prms) {
      MultiplierReport rep = classify(phi, prm);
      if (rep.verdict == Verdict::Multiplier) {
        CHECK(rep.norm_upper_bound.has_value());
        CHECK_FALSE(rep.witness.has_value());
      }
      if (rep.witness) {
        CHECK(ap_norm(rep.witness->f, prm.r()).finite());
      }
      for (const auto& c : rep.necessary) {
        if (c.status == Status::Fails) CHECK_FALSE(c.data.empty());
      }
    }
  }
}

TEST_CASE("self-multipliers never classify downward as non-multipliers") {
  FnGen gen(151);
  for (int i = 0; i < 12; ++i) {
    PiecewiseFn phi = gen.bounded_decaying_phi();
    Rational r(2);
    MultiplierReport self = classify(phi, {LpExponent(r), LpExponent(r)});
    REQUIRE(self.verdict == Verdict::Multiplier);
    MultiplierReport up = classify(phi, {LpExponent(r), LpExponent(r + Rational(1))});
    CHECK(up.verdict != Verdict::NotMultiplier);
  }
}
