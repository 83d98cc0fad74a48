#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ordconv/algebra.hpp"
#include "ordconv/multiplier.hpp"
#include "ordconv/oracle.hpp"
#include "ordconv/symfunc.hpp"

namespace ordconv {

// Rationals travel as "num/den" strings end to end; coefficients are
// strings while exact and JSON numbers once degraded.

inline void to_json(nlohmann::json& j, const Scalar& s) {
  if (s.is_exact())
    j = s.rat().str();
  else
    j = s.to_double();
}

inline void to_json(nlohmann::json& j, const PowerLogTerm& t) {
  j = nlohmann::json{{"coeff", t.coeff}, {"exp", t.exponent.str()},
                     {"logpow", t.log_power}};
}

inline void to_json(nlohmann::json& j, const Piece& p) {
  j = nlohmann::json{{"lo", p.lo.str()},
                     {"hi", p.hi ? nlohmann::json(p.hi->str()) : nlohmann::json("inf")},
                     {"terms", p.terms}};
}

inline void to_json(nlohmann::json& j, const PiecewiseFn& f) {
  j = nlohmann::json{{"pieces", f.pieces()}};
}

inline PiecewiseFn piecewise_from_json(const nlohmann::json& j) {
  std::vector<Piece> pieces;
  for (const auto& jp : j.at("pieces")) {
    Piece pc;
    auto lo = Rational::parse(jp.at("lo").get<std::string>());
    if (!lo) throw std::invalid_argument("bad lo rational");
    pc.lo = *lo;
    std::string hi = jp.at("hi").get<std::string>();
    if (hi != "inf") {
      auto h = Rational::parse(hi);
      if (!h) throw std::invalid_argument("bad hi rational");
      pc.hi = *h;
    }
    for (const auto& jt : jp.at("terms")) {
      PowerLogTerm t;
      if (jt.at("coeff").is_string()) {
        auto c = Rational::parse(jt.at("coeff").get<std::string>());
        if (!c) throw std::invalid_argument("bad coeff rational");
        t.coeff = Scalar(*c);
      } else {
        t.coeff = Scalar::inexact(jt.at("coeff").get<double>());
      }
      auto e = Rational::parse(jt.at("exp").get<std::string>());
      if (!e) throw std::invalid_argument("bad exponent rational");
      t.exponent = *e;
      t.log_power = jt.at("logpow").get<int>();
      pc.terms.push_back(t);
    }
    pieces.push_back(std::move(pc));
  }
  return PiecewiseFn::from_pieces(std::move(pieces));
}

inline void to_json(nlohmann::json& j, const DivergenceCert& c) {
  j = nlohmann::json{{"endpoint", endpoint_name(c.endpoint)},
                     {"exponent", c.exponent.str()},
                     {"log_power", c.log_power.str()}};
}

inline void to_json(nlohmann::json& j, const NormValue& n) {
  j = nlohmann::json{
      {"value", n.finite() ? nlohmann::json(n.value) : nlohmann::json("inf")},
      {"method", n.method == NormMethod::Exact ? "exact" : "quadrature"},
      {"error_bound", n.error_bound}};
  if (n.divergence) j["divergence"] = *n.divergence;
}

inline void to_json(nlohmann::json& j, const QuadratureResult& q) {
  j = nlohmann::json{{"value", q.value},
                     {"abs_error_estimate", q.abs_error_estimate},
                     {"subdivisions", q.subdivisions}};
  if (q.truncation)
    j["truncation"] = nlohmann::json{{"used_cutoff", q.truncation->used_cutoff},
                                     {"tail_bound", q.truncation->tail_bound}};
}

inline void to_json(nlohmann::json& j, const SampleCompareReport& r) {
  j = nlohmann::json{{"n", r.n}, {"max_rel_dev", r.max_rel_dev},
                     {"worst_x", r.worst_x}};
}

inline void to_json(nlohmann::json& j, const AlgebraParams& p) {
  j = nlohmann::json{{"r", p.r().str()}, {"p", p.p().str()},
                     {"regime", regime_name(p.regime())},
                     {"r_conjugate", p.r_conjugate().str()}};
  if (p.regime() == Regime::RgtP) j["v"] = p.v().str();
}

inline void to_json(nlohmann::json& j, const ConditionResult& c) {
  nlohmann::json data = nlohmann::json::object();
  for (const auto& kv : c.data) data[kv.first] = kv.second;
  j = nlohmann::json{{"name", c.name},
                     {"status", status_name(c.status)},
                     {"evidence", nlohmann::json{{"text", c.text}, {"data", data}}}};
}

inline void to_json(nlohmann::json& j, const Witness& w) {
  j = nlohmann::json{{"alpha", w.alpha.str()}, {"f", w.f}, {"failure", w.failure}};
}

inline void to_json(nlohmann::json& j, const MultiplierReport& r) {
  j = nlohmann::json{{"params", r.params},
                     {"regime", regime_name(r.regime)},
                     {"verdict", verdict_name(r.verdict)}};
  // one flat condition list, deduplicated by name (r = p shares the sets)
  nlohmann::json conds = nlohmann::json::array();
  std::vector<std::string> seen;
  auto push = [&](const ConditionResult& c) {
    for (const auto& s : seen)
      if (s == c.name) return;
    seen.push_back(c.name);
    conds.push_back(c);
  };
  for (const auto& c : r.necessary) push(c);
  for (const auto& c : r.sufficient) push(c);
  j["conditions"] = conds;
  if (r.witness) j["witness"] = *r.witness;
  if (r.norm_upper_bound) j["norm_upper_bound"] = *r.norm_upper_bound;
  if (r.norm_lower_bound) j["norm_lower_bound"] = *r.norm_lower_bound;
}

}  // namespace ordconv
