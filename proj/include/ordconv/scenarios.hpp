#pragma once

#include <chrono>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ordconv/generators.hpp"
#include "ordconv/multiplier.hpp"
#include "ordconv/oracle.hpp"

namespace ordconv {

struct Assertion {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ScenarioReport {
  std::string id;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<Assertion> assertions;

  bool pass() const {
    for (const auto& a : assertions)
      if (!a.pass) return false;
    return true;
  }
  void put(const std::string& k, const std::string& v) { params.emplace_back(k, v); }
  void assert_that(const std::string& name, bool ok, const std::string& detail) {
    assertions.push_back(Assertion{name, ok, detail});
  }
};

struct ScenarioOptions {
  std::uint64_t seed = kDefaultSeed;
  int count = 0;  // 0 = scenario default
  int threads = 1;
  QuadOptions quad;
  std::optional<Rational> r, p, eps, alpha, beta, gamma;
};

namespace detail_scn {

inline std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline LpExponent lp_of(const std::optional<Rational>& v, const Rational& dflt) {
  return LpExponent(v.value_or(dflt));
}

/// phi of the decaying-tail example: 1 on (0,1], x^(-1/v - eps) beyond.
inline PiecewiseFn phi_decaying(const Rational& v, const Rational& eps) {
  std::vector<Piece> ps;
  ps.push_back(Piece{Rational(0), Rational(1), {PowerLogTerm{Scalar(1), Rational(0), 0}}});
  ps.push_back(Piece{Rational(1), std::nullopt,
                     {PowerLogTerm{Scalar(1), -(Rational(1) / v) - eps, 0}}});
  return PiecewiseFn::from_pieces(std::move(ps));
}

/// phi of the growing-tail example: 1 on (0,1), x^(1/r - 1/p + eps) beyond.
inline PiecewiseFn phi_growing(const Rational& r, const Rational& p,
                               const Rational& eps) {
  Rational e = Rational(1) / r - Rational(1) / p + eps;
  std::vector<Piece> ps;
  ps.push_back(Piece{Rational(0), Rational(1), {PowerLogTerm{Scalar(1), Rational(0), 0}}});
  ps.push_back(Piece{Rational(1), std::nullopt, {PowerLogTerm{Scalar(1), e, 0}}});
  return PiecewiseFn::from_pieces(std::move(ps));
}

inline const ConditionResult* find_condition(const std::vector<ConditionResult>& cs,
                                             const std::string& name) {
  for (const auto& c : cs)
    if (c.name == name) return &c;
  return nullptr;
}

}  // namespace detail_scn

/// Transform homomorphism: (f*g)^ = fhat * ghat, symbolically and sampled.
inline ScenarioReport scenario_homomorphism(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "homomorphism";
  int count = opt.count > 0 ? opt.count : 200;
  rep.put("seed", std::to_string(opt.seed));
  rep.put("pairs", std::to_string(count));
  FnGen gen(opt.seed);
  int sym_fail = 0, dev_fail = 0;
  double worst_dev = 0;
  for (int i = 0; i < count; ++i) {
    auto [f, g] = gen.l1_pair();
    PiecewiseFn conv = order_convolve(f, g);
    PiecewiseFn lhs = gelfand_transform(conv, opt.quad);
    PiecewiseFn rhs = mul(gelfand_transform(f, opt.quad), gelfand_transform(g, opt.quad));
    if (!symbolically_equal(lhs, rhs)) ++sym_fail;
    auto cmp = sample_compare(lhs, rhs, 100, opt.seed + i);
    worst_dev = std::max(worst_dev, cmp.max_rel_dev);
    if (cmp.max_rel_dev >= 1e-10) ++dev_fail;
  }
  rep.assert_that("symbolic-equality", sym_fail == 0,
                  std::to_string(sym_fail) + " of " + std::to_string(count) +
                      " pairs differ");
  rep.assert_that("sample-deviation<1e-10", dev_fail == 0,
                  "max relative deviation " + detail_scn::fmt(worst_dev));
  return rep;
}

/// Unit-ball embedding: |||f|||_p = 1 implies |||f|||_r < 2 and
/// ||fhat||_r < 1 for r > p.
inline ScenarioReport scenario_prop2(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "prop2";
  int count = opt.count > 0 ? opt.count : 50;
  rep.put("seed", std::to_string(opt.seed));
  rep.put("per-pair", std::to_string(count));
  const std::pair<Rational, Rational> grid[] = {
      {Rational(1), Rational(3, 2)}, {Rational(3, 2), Rational(3)},
      {Rational(2), Rational(4)}};
  FnGen gen(opt.seed);
  double worst_r = 0, worst_hat = 0;
  int fails = 0;
  for (const auto& [pq, rq] : grid) {
    LpExponent p(pq), r(rq);
    for (int i = 0; i < count; ++i) {
      PiecewiseFn f = gen.ap_member(p);
      NormValue np = ap_norm(f, p, opt.quad);
      if (!np.finite() || np.value <= 0) {
        ++fails;
        continue;
      }
      PiecewiseFn fs = scale(f, Scalar::inexact(1.0 / np.value));
      NormValue nr = ap_norm(fs, r, opt.quad);
      NormValue nhat = lp_norm(antiderivative_from_zero(fs), r, opt.quad);
      if (!nr.finite() || nr.value >= 2.0) ++fails;
      if (!nhat.finite() || nhat.value >= 1.0) ++fails;
      if (nr.finite()) worst_r = std::max(worst_r, nr.value);
      if (nhat.finite()) worst_hat = std::max(worst_hat, nhat.value);
    }
  }
  rep.assert_that("norm-r<2 and hat<1", fails == 0,
                  "max |||f|||_r = " + detail_scn::fmt(worst_r) +
                      ", max ||fhat||_r = " + detail_scn::fmt(worst_hat));
  return rep;
}

/// phi = 1 with r > p: every necessary condition holds, yet the witness
/// family certifies NotMultiplier with tail exponent -alpha*p.
inline ScenarioReport scenario_ex5i(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "ex5i";
  Rational r = opt.r.value_or(Rational(3));
  Rational p = opt.p.value_or(Rational(3, 2));
  rep.put("r", r.str());
  rep.put("p", p.str());
  AlgebraParams params{LpExponent(r), LpExponent(p)};
  PiecewiseFn phi = PiecewiseFn::constant(Scalar(1));
  MultiplierReport mr = classify(phi, params, opt.quad);
  rep.assert_that("verdict", mr.verdict == Verdict::NotMultiplier,
                  verdict_name(mr.verdict));
  rep.assert_that("witness-found", mr.witness.has_value(),
                  mr.witness ? "alpha = " + mr.witness->alpha.str() : "none");
  bool nec_all = !mr.necessary.empty();
  for (const auto& c : mr.necessary) nec_all = nec_all && c.status == Status::Holds;
  rep.assert_that("necessary-all-hold", nec_all, "");
  if (mr.witness) {
    Rational expected_alpha = (Rational(1) / r + Rational(1) / p) / Rational(2);
    Rational expected_exp = -expected_alpha * p;
    rep.assert_that("witness-alpha", mr.witness->alpha == expected_alpha,
                    "alpha = " + mr.witness->alpha.str());
    rep.assert_that("certificate-exponent",
                    mr.witness->failure.exponent == expected_exp &&
                        mr.witness->failure.endpoint == Endpoint::Infinity,
                    "exponent " + mr.witness->failure.exponent.str());
  }
  return rep;
}

/// phi = 1 then x^(-1/v-eps) with r > p: a certified multiplier via the
/// sufficient conditions, with a finite norm bound and the L_{r'} tail probe.
inline ScenarioReport scenario_ex5ii(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "ex5ii";
  Rational r = opt.r.value_or(Rational(3));
  Rational p = opt.p.value_or(Rational(3, 2));
  AlgebraParams params{LpExponent(r), LpExponent(p)};
  Rational v = params.v().finite_value();
  Rational eps = opt.eps.value_or(Rational(1, 3));
  rep.put("r", r.str());
  rep.put("p", p.str());
  rep.put("eps", eps.str());
  rep.put("v", v.str());
  PiecewiseFn phi = detail_scn::phi_decaying(v, eps);
  MultiplierReport mr = classify(phi, params, opt.quad);
  rep.assert_that("verdict", mr.verdict == Verdict::Multiplier,
                  verdict_name(mr.verdict));
  rep.assert_that("upper-bound-finite",
                  mr.norm_upper_bound && std::isfinite(*mr.norm_upper_bound),
                  mr.norm_upper_bound ? detail_scn::fmt(*mr.norm_upper_bound)
                                      : "absent");
  const ConditionResult* s =
      detail_scn::find_condition(mr.sufficient, "thm4.iii.mphi-prime-surrogate");
  bool probe_ok = false;
  std::string key = "probe(a=1,q=" + params.r_conjugate().str() + ")";
  if (s)
    for (const auto& kv : s->data)
      if (kv.first == key && kv.second.rfind("holds", 0) == 0) probe_ok = true;
  rep.assert_that("surrogate-Lrc-tail-holds", probe_ok, key);
  rep.assert_that("no-witness", !mr.witness.has_value(), "");
  return rep;
}

/// phi = 1 then x^(1/r-1/p+eps) with r < p: all necessary conditions hold,
/// the TV growth exponent is exactly 1/r - 1/p + eps, and the witness at
/// the analytic threshold has phi*fhat decaying exactly like x^(-1/p).
inline ScenarioReport scenario_ex8(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "ex8";
  Rational r = opt.r.value_or(Rational(3, 2));
  Rational p = opt.p.value_or(Rational(3));
  Rational eps = opt.eps.value_or(Rational(1, 6));
  rep.put("r", r.str());
  rep.put("p", p.str());
  rep.put("eps", eps.str());
  AlgebraParams params{LpExponent(r), LpExponent(p)};
  PiecewiseFn phi = detail_scn::phi_growing(r, p, eps);
  MultiplierReport mr = classify(phi, params, opt.quad);
  rep.assert_that("verdict", mr.verdict == Verdict::NotMultiplier,
                  verdict_name(mr.verdict));
  bool nec_all = mr.necessary.size() == 4;
  for (const auto& c : mr.necessary) nec_all = nec_all && c.status == Status::Holds;
  rep.assert_that("thm7-necessary-all-hold", nec_all, "");

  auto tv = tv_growth_exponent(phi, opt.quad);
  Rational want = Rational(1) / r - Rational(1) / p + eps;
  rep.assert_that("tv-growth-exponent", tv && tv->exponent == want,
                  tv ? tv->exponent.str() : "zero");

  rep.assert_that("witness-found", mr.witness.has_value(),
                  mr.witness ? "alpha = " + mr.witness->alpha.str() : "none");
  if (mr.witness) {
    Rational astar = want + Rational(1) / p;  // = 1/r + eps
    rep.assert_that("witness-alpha-threshold", mr.witness->alpha == astar,
                    mr.witness->alpha.str());
    PiecewiseFn fhat = antiderivative_from_zero(mr.witness->f);
    auto tail = leading_behavior(mul(phi, fhat), Endpoint::Infinity);
    rep.assert_that("phi-fhat-tail-is-x^(-1/p)",
                    tail && tail->exponent == -(Rational(1) / p) &&
                        tail->log_power == 0,
                    tail ? tail->exponent.str() : "zero");
  }
  return rep;
}

/// Tent norm identity: |||tent(a,b,c)|||_r = 2 + ((c + r(b-a))/(r+1))^(1/r).
inline ScenarioReport scenario_thm7_tent(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "thm7-tent";
  int count = opt.count > 0 ? opt.count : 50;
  rep.put("seed", std::to_string(opt.seed));
  rep.put("count", std::to_string(count));
  FnGen gen(opt.seed);
  double worst = 0;
  int fails = 0;
  for (int i = 0; i < count; ++i) {
    Rational a, b, c, r;
    if (i == 0 && opt.alpha && opt.beta && opt.gamma) {
      a = *opt.alpha;
      b = *opt.beta;
      c = *opt.gamma;
      r = opt.r.value_or(Rational(2));
    } else {
      a = Rational(gen.int_in(1, 8), gen.int_in(2, 4));
      b = a + Rational(gen.int_in(1, 8), gen.int_in(1, 4));
      c = b + Rational(gen.int_in(1, 8), gen.int_in(1, 4));
      r = Rational(1) + Rational(gen.int_in(0, 9), 3);
    }
    PiecewiseFn f = tent_function(a, b, c);
    NormValue n = ap_norm(f, LpExponent(r), opt.quad);
    double rd = r.to_double();
    double formula =
        2.0 + std::pow((c.to_double() + rd * (b.to_double() - a.to_double())) /
                           (rd + 1.0),
                       1.0 / rd);
    double rel = std::abs(n.value - formula) / formula;
    worst = std::max(worst, rel);
    if (!(rel <= 1e-12)) ++fails;
  }
  rep.assert_that("formula-match<=1e-12", fails == 0,
                  "max relative difference " + detail_scn::fmt(worst));
  return rep;
}

/// Bound consistency for the decaying example: empirical lower bound below
/// the certified upper bound, and sup-norm within twice the upper bound.
inline ScenarioReport scenario_thm3_bound(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "thm3-bound";
  Rational r = opt.r.value_or(Rational(3));
  Rational p = opt.p.value_or(Rational(3, 2));
  AlgebraParams params{LpExponent(r), LpExponent(p)};
  Rational eps = opt.eps.value_or(Rational(1, 3));
  int pool_n = opt.count > 0 ? opt.count : 20;
  rep.put("r", r.str());
  rep.put("p", p.str());
  rep.put("pool", std::to_string(pool_n));
  PiecewiseFn phi = detail_scn::phi_decaying(params.v().finite_value(), eps);
  MultiplierReport mr = classify(phi, params, opt.quad);
  rep.assert_that("multiplier-with-bound",
                  mr.verdict == Verdict::Multiplier && mr.norm_upper_bound,
                  verdict_name(mr.verdict));
  if (!mr.norm_upper_bound) return rep;
  double upper = *mr.norm_upper_bound;
  double lower = operator_norm_lower_bound(phi, params,
                                           default_witness_pool(params, pool_n),
                                           opt.quad, opt.threads);
  rep.assert_that("lower<=upper", lower <= upper * (1 + 1e-9),
                  detail_scn::fmt(lower) + " vs " + detail_scn::fmt(upper));
  double sup = sup_norm(phi).value;
  rep.assert_that("sup<=2*upper", sup <= 2 * upper * (1 + 1e-9),
                  detail_scn::fmt(sup) + " vs 2*" + detail_scn::fmt(upper));
  return rep;
}

/// e_n = n on (0, 1/n) against f = 1 on (0,1): |||f*e_n - f|||_p shrinks
/// monotonically below 0.01 within n <= 2^15.
inline ScenarioReport scenario_approx_identity(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "approx-identity";
  LpExponent p = detail_scn::lp_of(opt.p, Rational(2));
  rep.put("p", p.str());
  PiecewiseFn f = PiecewiseFn::from_pieces(
      {Piece{Rational(0), Rational(1), {PowerLogTerm{Scalar(1), Rational(0), 0}}}});
  double prev = std::numeric_limits<double>::infinity();
  double best = prev;
  bool monotone = true;
  std::string series;
  for (int k = 1; k <= 15; ++k) {
    std::int64_t n = std::int64_t(1) << k;
    PiecewiseFn en = PiecewiseFn::from_pieces(
        {Piece{Rational(0), Rational(1, n), {PowerLogTerm{Scalar(Rational(n)), Rational(0), 0}}}});
    PiecewiseFn d = sub(order_convolve(f, en), f);
    NormValue nv = ap_norm(d, p, opt.quad);
    if (nv.value > prev * (1 + 1e-12)) monotone = false;
    prev = nv.value;
    best = std::min(best, nv.value);
    if (k <= 5 || k == 15) series += (series.empty() ? "" : ", ") + detail_scn::fmt(nv.value);
  }
  rep.assert_that("nonincreasing", monotone, series);
  rep.assert_that("drops-below-0.01", best < 0.01, "min " + detail_scn::fmt(best));
  return rep;
}

/// Exact vs quadrature L_p norms on random pure powers; divergent cases are
/// refused by the oracle outright.
inline ScenarioReport check_oracle_agreement(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "oracle-agreement";
  int count = opt.count > 0 ? opt.count : 100;
  rep.put("seed", std::to_string(opt.seed));
  rep.put("count", std::to_string(count));
  FnGen gen(opt.seed);
  double worst = 0;
  int fails = 0, divergent_seen = 0;
  for (int i = 0; i < count; ++i) {
    auto c = gen.pure_power_case();
    NormValue exact = lp_norm(c.f, LpExponent(c.p), opt.quad);
    if (c.divergent) {
      ++divergent_seen;
      if (exact.finite() || exact.method != NormMethod::Exact) ++fails;
      bool threw = false;
      try {
        quad_lp_norm(c.f, c.p, opt.quad);
      } catch (const ConvergenceNotCertifiedError&) {
        threw = true;
      }
      if (!threw) ++fails;
      continue;
    }
    if (!exact.finite() || exact.method != NormMethod::Exact) {
      ++fails;
      continue;
    }
    QuadratureResult q = quad_lp_norm(c.f, c.p, opt.quad);
    double rel = std::abs(q.value - exact.value) / std::max(exact.value, 1e-300);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-8)) ++fails;
  }
  rep.assert_that("agreement<=1e-8-and-divergence-refused", fails == 0,
                  "max relative difference " + detail_scn::fmt(worst) + ", " +
                      std::to_string(divergent_seen) + " divergent cases");
  return rep;
}

/// A multiplier of A_r to itself must not classify as NotMultiplier into
/// any larger A_p.
inline ScenarioReport check_regime_embedding(const ScenarioOptions& opt = {}) {
  ScenarioReport rep;
  rep.id = "regime-embedding";
  int count = opt.count > 0 ? opt.count : 20;
  rep.put("seed", std::to_string(opt.seed));
  rep.put("count", std::to_string(count));
  FnGen gen(opt.seed);
  int fails = 0;
  std::string note;
  for (int i = 0; i < count; ++i) {
    PiecewiseFn phi = gen.bounded_decaying_phi();
    Rational r = Rational(1) + Rational(gen.int_in(0, 6), 3);
    LpExponent rl(r);
    LpExponent pl = gen.int_in(0, 4) == 0
                        ? LpExponent::infinite()
                        : LpExponent(r + Rational(gen.int_in(1, 4), 2));
    MultiplierReport self = classify(phi, AlgebraParams{rl, rl}, opt.quad);
    if (self.verdict != Verdict::Multiplier) {
      ++fails;
      note = "self-classification failed at r=" + r.str();
      continue;
    }
    MultiplierReport up = classify(phi, AlgebraParams{rl, pl}, opt.quad);
    if (up.verdict == Verdict::NotMultiplier) {
      ++fails;
      note = "embedding violated at r=" + r.str() + ", p=" + pl.str();
    }
  }
  rep.assert_that("no-notmultiplier-upward", fails == 0, note);
  return rep;
}

/// CLI-facing dispatcher over the eight built-in scenario ids.
inline ScenarioReport run_scenario(const std::string& id,
                                   const ScenarioOptions& opt = {}) {
  if (id == "prop2") return scenario_prop2(opt);
  if (id == "ex5i") return scenario_ex5i(opt);
  if (id == "ex5ii") return scenario_ex5ii(opt);
  if (id == "ex8") return scenario_ex8(opt);
  if (id == "thm7-tent") return scenario_thm7_tent(opt);
  if (id == "thm3-bound") return scenario_thm3_bound(opt);
  if (id == "homomorphism") return scenario_homomorphism(opt);
  if (id == "approx-identity") return scenario_approx_identity(opt);
  throw std::invalid_argument("unknown scenario id: " + id);
}

}  // namespace ordconv
