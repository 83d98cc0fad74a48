// Command-line front end for the order-convolution algebra library.
//
// Exit codes: 0 on success (a classification verdict counts as success),
// 2 when classify ends Undetermined, 1 on any error.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ordconv/dsl.hpp"
#include "ordconv/json_io.hpp"
#include "ordconv/ordconv.hpp"

namespace {

using nlohmann::json;
using namespace ordconv;

struct GlobalFlags {
  bool json_out = false;
  double tol = 1e-10;
  int threads = 1;
};

void emit(const GlobalFlags& g, const std::string& command, const json& data,
          const std::string& text) {
  if (g.json_out) {
    json envelope{{"command", command}, {"data", data}};
    std::cout << envelope.dump(2) << "\n";
  } else {
    std::cout << text;
  }
}

Rational parse_rational_flag(const std::string& s, const std::string& flag) {
  auto r = Rational::parse(s);
  if (!r) throw CLI::ValidationError(flag, "expected a rational like 3/2 or 0.5");
  return *r;
}

LpExponent parse_exponent_flag(const std::string& s, const std::string& flag) {
  auto e = LpExponent::parse(s);
  if (!e) throw CLI::ValidationError(flag, "expected a rational >= 1 or 'inf'");
  return *e;
}

std::string norm_text(const NormValue& n) {
  if (!n.finite()) {
    return "value: inf (divergent at " +
           std::string(endpoint_name(n.divergence->endpoint)) + ", exponent " +
           n.divergence->exponent.str() + ", log power " +
           n.divergence->log_power.str() + ")\n";
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "value: %.15g (%s, error bound %.3g)\n", n.value,
                n.method == NormMethod::Exact ? "exact" : "quadrature",
                n.error_bound);
  return buf;
}

std::string conditions_text(const std::vector<ConditionResult>& cs) {
  std::string out;
  for (const auto& c : cs) {
    out += "  [" + std::string(status_name(c.status)) + "] " + c.name;
    if (!c.text.empty()) out += ": " + c.text;
    for (const auto& kv : c.data) out += "\n      " + kv.first + " = " + kv.second;
    out += "\n";
  }
  return out;
}

int run_classify(const GlobalFlags& g, const std::string& phi_text,
                 const std::string& r_text, const std::string& p_text,
                 bool with_bounds) {
  PiecewiseFn phi = parse_function(phi_text);
  AlgebraParams params{parse_exponent_flag(r_text, "--r"),
                       parse_exponent_flag(p_text, "--p")};
  QuadOptions q{g.tol, 1 << 14};
  MultiplierReport rep = classify(phi, params, q, with_bounds);
  std::string text = "regime:  " + std::string(regime_name(rep.regime)) +
                     "\nverdict: " + verdict_name(rep.verdict) + "\n";
  if (rep.norm_upper_bound)
    text += "norm upper bound: " + std::to_string(*rep.norm_upper_bound) + "\n";
  if (rep.norm_lower_bound)
    text += "norm lower bound: " + std::to_string(*rep.norm_lower_bound) + "\n";
  if (rep.witness) {
    text += "witness: alpha = " + rep.witness->alpha.str() +
            ", f = " + serialize_function(rep.witness->f) + "\n";
    text += "  divergence at " +
            std::string(endpoint_name(rep.witness->failure.endpoint)) +
            ", exponent " + rep.witness->failure.exponent.str() + "\n";
  }
  text += "necessary conditions:\n" + conditions_text(rep.necessary);
  text += "sufficient conditions:\n" + conditions_text(rep.sufficient);
  emit(g, "classify", json(rep), text);
  return rep.verdict == Verdict::Undetermined ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"order-convolution algebra on (0,inf): norms, transforms and "
               "(A_r, A_p) multiplier classification"};
  app.require_subcommand(1);
  app.fallthrough();  // let --json/--tol/--threads appear after the subcommand

  GlobalFlags g;
  app.add_flag("--json", g.json_out, "emit machine-readable JSON");
  app.add_option("--tol", g.tol, "quadrature relative tolerance")
      ->default_val(1e-10);
  app.add_option("--threads", g.threads, "worker threads for pool scans")
      ->default_val(1);

  std::string fn_text, f_text, g_text, phi_text, at_text, p_text, r_text;
  bool ap_flag = false, bounds_flag = false;

  auto* c_eval = app.add_subcommand("eval", "evaluate a function at a point");
  c_eval->add_option("--fn", fn_text, "function (DSL)")->required();
  c_eval->add_option("--at", at_text, "evaluation point (rational or decimal)")
      ->required();

  auto* c_conv = app.add_subcommand("convolve", "order convolution f*g");
  c_conv->add_option("--f", f_text, "left factor (DSL)")->required();
  c_conv->add_option("--g", g_text, "right factor (DSL)")->required();

  auto* c_trans = app.add_subcommand("transform", "Gelfand transform (indefinite integral)");
  c_trans->add_option("--fn", fn_text, "function (DSL)")->required();

  auto* c_norm = app.add_subcommand("norm", "L_p norm, or A_p norm with --ap");
  c_norm->add_option("--fn", fn_text, "function (DSL)")->required();
  c_norm->add_option("--p", p_text, "exponent in [1, inf]")->required();
  c_norm->add_flag("--ap", ap_flag, "compute |||f|||_p = ||f||_1 + ||fhat||_p");

  auto* c_cls = app.add_subcommand("classify", "(A_r, A_p) multiplier verdict for phi");
  c_cls->add_option("--phi", phi_text, "multiplier function (DSL)")->required();
  c_cls->add_option("--r", r_text, "source exponent")->required();
  c_cls->add_option("--p", p_text, "target exponent")->required();
  c_cls->add_flag("--bounds", bounds_flag, "also estimate a norm lower bound");

  auto* c_wit = app.add_subcommand("witness", "search the witness family only");
  c_wit->add_option("--phi", phi_text, "multiplier function (DSL)")->required();
  c_wit->add_option("--r", r_text, "source exponent")->required();
  c_wit->add_option("--p", p_text, "target exponent")->required();

  std::string scen_id;
  ScenarioOptions scen;
  std::string s_r, s_p, s_eps, s_alpha, s_beta, s_gamma;
  auto* c_scen = app.add_subcommand("scenario", "run a built-in verification scenario");
  c_scen->add_option("--id", scen_id,
                     "one of: prop2, ex5i, ex5ii, ex8, thm7-tent, thm3-bound, "
                     "homomorphism, approx-identity")
      ->required();
  c_scen->add_option("--seed", scen.seed, "random seed");
  c_scen->add_option("--count", scen.count, "iteration count override");
  c_scen->add_option("--r", s_r, "r override");
  c_scen->add_option("--p", s_p, "p override");
  c_scen->add_option("--eps", s_eps, "epsilon override");
  c_scen->add_option("--alpha", s_alpha, "tent alpha");
  c_scen->add_option("--beta", s_beta, "tent beta");
  c_scen->add_option("--gamma", s_gamma, "tent gamma");

  CLI11_PARSE(app, argc, argv);

  try {
    QuadOptions quad{g.tol, 1 << 14};

    if (c_eval->parsed()) {
      PiecewiseFn f = parse_function(fn_text);
      Rational x = parse_rational_flag(at_text, "--at");
      double v = evaluate(f, x.to_double());
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.15g\n", v);
      emit(g, "eval", json{{"x", x.str()}, {"value", v}}, buf);
      return 0;
    }
    if (c_conv->parsed()) {
      PiecewiseFn f = parse_function(f_text);
      PiecewiseFn gg = parse_function(g_text);
      PiecewiseFn h = order_convolve(f, gg);
      emit(g, "convolve", json{{"function", h}, {"dsl", serialize_function(h)}},
           serialize_function(h) + "\n");
      return 0;
    }
    if (c_trans->parsed()) {
      PiecewiseFn f = parse_function(fn_text);
      PiecewiseFn h = gelfand_transform(f, quad);
      emit(g, "transform", json{{"function", h}, {"dsl", serialize_function(h)}},
           serialize_function(h) + "\n");
      return 0;
    }
    if (c_norm->parsed()) {
      PiecewiseFn f = parse_function(fn_text);
      LpExponent p = parse_exponent_flag(p_text, "--p");
      NormValue n = ap_flag ? ap_norm(f, p, quad) : lp_norm(f, p, quad);
      emit(g, "norm", json(n), norm_text(n));
      return 0;
    }
    if (c_cls->parsed()) return run_classify(g, phi_text, r_text, p_text, bounds_flag);
    if (c_wit->parsed()) {
      PiecewiseFn phi = parse_function(phi_text);
      AlgebraParams params{parse_exponent_flag(r_text, "--r"),
                           parse_exponent_flag(p_text, "--p")};
      auto w = witness_search(phi, params, quad);
      if (w) {
        emit(g, "witness", json(*w),
             "alpha = " + w->alpha.str() + ", f = " + serialize_function(w->f) +
                 "\ndivergence exponent " + w->failure.exponent.str() + " at " +
                 endpoint_name(w->failure.endpoint) + "\n");
      } else {
        emit(g, "witness", json(nullptr), "no witness found\n");
      }
      return 0;
    }
    if (c_scen->parsed()) {
      scen.quad = quad;
      scen.threads = g.threads;
      auto opt_rat = [](const std::string& s) -> std::optional<Rational> {
        if (s.empty()) return std::nullopt;
        auto r = Rational::parse(s);
        if (!r) throw std::invalid_argument("bad rational override: " + s);
        return r;
      };
      scen.r = opt_rat(s_r);
      scen.p = opt_rat(s_p);
      scen.eps = opt_rat(s_eps);
      scen.alpha = opt_rat(s_alpha);
      scen.beta = opt_rat(s_beta);
      scen.gamma = opt_rat(s_gamma);
      ScenarioReport rep = run_scenario(scen_id, scen);
      json data{{"id", rep.id}, {"pass", rep.pass()}};
      json params = json::object(), asserts = json::array();
      for (const auto& kv : rep.params) params[kv.first] = kv.second;
      for (const auto& a : rep.assertions)
        asserts.push_back(json{{"name", a.name}, {"pass", a.pass}, {"detail", a.detail}});
      data["params"] = params;
      data["assertions"] = asserts;
      std::string text = "scenario " + rep.id + ": " +
                         (rep.pass() ? "PASS" : "FAIL") + "\n";
      for (const auto& a : rep.assertions)
        text += std::string("  [") + (a.pass ? "pass" : "FAIL") + "] " + a.name +
                (a.detail.empty() ? "" : "  (" + a.detail + ")") + "\n";
      emit(g, "scenario", data, text);
      return rep.pass() ? 0 : 1;
    }
  } catch (const DslParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
