#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <queue>
#include <random>
#include <stdexcept>
#include <vector>

#include "ordconv/symfunc.hpp"

namespace ordconv {

/// Raised when quadrature is asked for an integral the exact layer marked
/// divergent. Divergence is always decided symbolically, never numerically.
struct ConvergenceNotCertifiedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Truncation {
  double used_cutoff = 0;
  double tail_bound = 0;
};

struct QuadratureResult {
  double value = 0;
  double abs_error_estimate = 0;
  int subdivisions = 0;
  std::optional<Truncation> truncation;
};

struct QuadOptions {
  double rel_tol = 1e-10;
  int max_panels = 1 << 14;
};

namespace detail_quad {

// 15-point Gauss-Legendre rule on [-1, 1].
inline constexpr double kGlNode[8] = {
    0.0000000000000000, 0.2011940939974345, 0.3941513470775634,
    0.5709721726085388, 0.7244177313601700, 0.8482065834104272,
    0.9372733924007059, 0.9879925180204854};
inline constexpr double kGlWeight[8] = {
    0.2025782419255613, 0.1984314853271116, 0.1861610000155622,
    0.1662692058169939, 0.1395706779261543, 0.1071592204671719,
    0.0703660474881081, 0.0307532419961173};

template <typename F>
double gl15(const F& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double sum = kGlWeight[0] * f(c);
  for (int i = 1; i < 8; ++i) {
    double d = h * kGlNode[i];
    sum += kGlWeight[i] * (f(c + d) + f(c - d));
  }
  return sum * h;
}

struct Seg {
  double a, b, value, err;
  bool operator<(const Seg& o) const { return err < o.err; }
};

template <typename F>
Seg make_seg(const F& f, double a, double b) {
  double coarse = gl15(f, a, b);
  double m = 0.5 * (a + b);
  double fine = gl15(f, a, m) + gl15(f, m, b);
  // roundoff floor: even a rule-exact panel carries summation noise
  double err = std::abs(coarse - fine) + 4e-16 * std::abs(fine);
  return Seg{a, b, fine, err};
}

/// Worst-first interval halving; the final sum is a pairwise tree over
/// segments sorted by position, so the result does not depend on the
/// refinement schedule.
template <typename F>
void adaptive(const F& f, double a, double b, double abs_tol, int max_panels,
              double* value, double* err, int* panels) {
  std::priority_queue<Seg> pq;
  pq.push(make_seg(f, a, b));
  *panels += 1;
  double total_err = pq.top().err;
  while (total_err > abs_tol && *panels < max_panels &&
         pq.top().err > abs_tol / (2.0 * pq.size())) {
    Seg worst = pq.top();
    pq.pop();
    double m = 0.5 * (worst.a + worst.b);
    if (!(worst.a < m && m < worst.b)) {  // width exhausted
      pq.push(worst);
      break;
    }
    Seg l = make_seg(f, worst.a, m), r = make_seg(f, m, worst.b);
    total_err += l.err + r.err - worst.err;
    pq.push(l);
    pq.push(r);
    *panels += 1;
  }
  std::vector<Seg> segs;
  while (!pq.empty()) {
    segs.push_back(pq.top());
    pq.pop();
  }
  std::sort(segs.begin(), segs.end(),
            [](const Seg& x, const Seg& y) { return x.a < y.a; });
  std::vector<double> vals;
  vals.reserve(segs.size());
  double e = 0;
  for (const Seg& s : segs) {
    vals.push_back(s.value);
    e += s.err;
  }
  // pairwise tree reduction
  while (vals.size() > 1) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < vals.size(); i += 2)
      next.push_back(vals[i] + vals[i + 1]);
    if (vals.size() & 1) next.push_back(vals.back());
    vals.swap(next);
  }
  *value += vals.empty() ? 0.0 : vals[0];
  *err += e;
}

/// Exact bound on int_T^inf x^E ln^K x dx for E < -1, K >= 0.
inline double power_log_tail(double E, int K, double T) {
  double lt = std::log(T);
  double head = -std::pow(T, E + 1) / (E + 1);
  double acc = head;  // K = 0 value
  for (int j = 1; j <= K; ++j) {
    double lp = 1;
    for (int i = 0; i < j; ++i) lp *= lt;
    acc = (-std::pow(T, E + 1) * lp - j * acc) / (E + 1);
  }
  return acc;
}

}  // namespace detail_quad

namespace detail_quad {

struct TailModel {
  double E;       // effective exponent of the integrand bound
  int K;          // effective log power
  double C;       // coefficient bound
  double from;    // bound valid for x >= from
};

inline TailModel tail_model(const std::vector<PowerLogTerm>& terms, double p) {
  TailModel m{0, 0, 0, 3.0};
  Rational emax = terms.front().exponent;
  int kmax = terms.front().log_power;
  double csum = 0;
  for (const auto& t : terms) {
    if (t.exponent > emax) emax = t.exponent;
    kmax = std::max(kmax, t.log_power);
    csum += std::abs(t.coeff.to_double());
  }
  m.E = emax.to_double() * p;
  m.K = static_cast<int>(std::ceil(kmax * p));
  m.C = std::pow(csum, p);
  return m;
}

}  // namespace detail_quad

/// Shared engine: integrates f (signed) or |f|^p over the support of f,
/// after certifying convergence from exact leading behavior. Splits at
/// breakpoints and sign changes, substitutes x = u^m at an integrable
/// singularity at 0, and truncates an infinite tail at a cutoff whose
/// omitted mass is bounded exactly from the leading term.
inline QuadratureResult quad_piecewise(const PiecewiseFn& g,
                                       std::optional<Rational> abs_power,
                                       const QuadOptions& opt = {}) {
  PiecewiseFn z = normalize(g);
  if (is_zero_fn(z)) return {};
  double p = abs_power ? abs_power->to_double() : 1.0;
  bool absmode = abs_power.has_value();
  bool even_p = absmode && abs_power->is_integer() && (abs_power->num() % 2 == 0);

  // Exact convergence certification; quadrature never decides divergence.
  if (auto lb = leading_behavior(z, Endpoint::ZeroPlus)) {
    Rational eff = lb->exponent * (absmode ? *abs_power : Rational(1));
    if (eff <= Rational(-1))
      throw ConvergenceNotCertifiedError(
          "integrand not certified convergent at 0+ (exponent " + eff.str() + ")");
  }
  if (auto lb = leading_behavior(z, Endpoint::Infinity)) {
    Rational eff = lb->exponent * (absmode ? *abs_power : Rational(1));
    if (eff >= Rational(-1))
      throw ConvergenceNotCertifiedError(
          "integrand not certified convergent at infinity (exponent " +
          eff.str() + ")");
  }

  auto integrand = [&](double x) -> double {
    double v = evaluate(z, x);
    if (!absmode) return v;
    return std::pow(std::abs(v), p);
  };

  QuadratureResult res;
  double tail_scale_hint = 0;

  for (const Piece& pc : z.pieces()) {
    if (pc.terms.empty()) continue;
    double a = pc.lo.to_double();
    bool infinite = !pc.hi.has_value();
    double b = infinite ? 0 : pc.hi->to_double();

    // Panel boundaries inside the piece: sign changes (kinks of |f|^p) and
    // the log kink at x = 1.
    auto splits_in = [&](double lo, double hi) {
      std::vector<double> cuts;
      if (absmode && !even_p) {
        if (pc.terms.size() > 1)
          for (double r : find_sign_roots(pc.terms, lo, hi)) cuts.push_back(r);
        bool has_log = false;
        for (const auto& t : pc.terms) has_log |= t.log_power > 0;
        if (has_log && lo < 1.0 && 1.0 < hi) cuts.push_back(1.0);
      }
      std::sort(cuts.begin(), cuts.end());
      return cuts;
    };

    auto run_range = [&](double lo, double hi, double tol_here) {
      std::vector<double> cuts = splits_in(lo, hi);
      cuts.insert(cuts.begin(), lo);
      cuts.push_back(hi);
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        double s = cuts[i], t = cuts[i + 1];
        if (!(s < t)) continue;
        // geometric pre-split for very wide ranges
        int chunks = (s > 0 && t / s > 64) ? 1 + static_cast<int>(std::log2(t / s) / 4)
                                           : 1;
        double rho = std::pow(t / std::max(s, 1e-300), 1.0 / chunks);
        double cs = s;
        for (int c = 0; c < chunks; ++c) {
          double ct = (c + 1 == chunks) ? t : cs * rho;
          detail_quad::adaptive(integrand, cs, ct, tol_here / cuts.size(),
                                opt.max_panels, &res.value,
                                &res.abs_error_estimate, &res.subdivisions);
          cs = ct;
        }
      }
    };

    // A rough scale for tolerance allocation.
    double rough;
    {
      double rb = infinite ? std::max(2 * std::max(a, 1.0), 16.0) : b;
      rough = std::abs(detail_quad::gl15(integrand, a, rb));
    }
    double tol_piece = opt.rel_tol * std::max(rough, 1e-300);

    if (!infinite) {
      if (pc.lo.is_zero()) {
        // integrable singularity or log kink at 0: substitute x = u^m
        auto lb = leading_behavior(z, Endpoint::ZeroPlus);
        double e_eff = lb ? lb->exponent.to_double() * (absmode ? p : 1.0) : 0.0;
        int kmax = lb ? lb->log_power : 0;
        if (e_eff < 0 || kmax > 0) {
          int m = 2;
          if (e_eff < 0)
            m = std::min(64, std::max(2, static_cast<int>(std::ceil(2.0 / (1.0 + e_eff)))));
          double ub = std::pow(b, 1.0 / m);
          auto h = [&](double u) {
            double x = std::pow(u, m);
            if (x <= 0) return 0.0;
            return integrand(x) * m * std::pow(u, m - 1);
          };
          detail_quad::adaptive(h, 0.0, ub, tol_piece, opt.max_panels, &res.value,
                                &res.abs_error_estimate, &res.subdivisions);
          tail_scale_hint = std::max(tail_scale_hint, std::abs(res.value));
          continue;
        }
      }
      run_range(a, b, tol_piece);
      tail_scale_hint = std::max(tail_scale_hint, std::abs(res.value));
      continue;
    }

    // Infinite tail: integrate to a cutoff T whose remainder is bounded
    // exactly by the leading-term tail integral.
    detail_quad::TailModel tm =
        detail_quad::tail_model(pc.terms, absmode ? p : 1.0);
    double T = std::max({2 * std::max(a, 1.0), 16.0, tm.from});
    run_range(a, T, tol_piece);
    double scale = std::max({std::abs(res.value), tail_scale_hint, 1e-300});
    double bound = tm.C * detail_quad::power_log_tail(tm.E, tm.K, T);
    int guard = 0;
    while (bound > opt.rel_tol * scale && T < 1e120 && ++guard < 500) {
      run_range(T, 4 * T, opt.rel_tol * std::max(bound, 1e-300));
      T *= 4;
      scale = std::max(scale, std::abs(res.value));
      bound = tm.C * detail_quad::power_log_tail(tm.E, tm.K, T);
    }
    res.truncation = Truncation{T, bound};
  }
  return res;
}

/// Signed integral of f over (lo, hi); hi omitted means infinity.
inline QuadratureResult quad_integral(const PiecewiseFn& f, const Rational& lo,
                                      const UpperBound& hi,
                                      const QuadOptions& opt = {}) {
  return quad_piecewise(restrict_to(f, lo, hi), std::nullopt, opt);
}

/// (int |f|^p)^(1/p) over (0, inf) by quadrature, after exact certification.
inline QuadratureResult quad_lp_norm(const PiecewiseFn& f, const Rational& p,
                                     const QuadOptions& opt = {}) {
  if (!(p > Rational(0))) throw std::domain_error("quad_lp_norm: p must be > 0");
  QuadratureResult raw = quad_piecewise(f, p, opt);
  QuadratureResult out = raw;
  double pd = p.to_double();
  out.value = std::pow(raw.value, 1.0 / pd);
  double tail = raw.truncation ? raw.truncation->tail_bound : 0.0;
  if (raw.value > 0)
    out.abs_error_estimate =
        out.value * ((raw.abs_error_estimate + tail) / raw.value) / pd;
  else
    out.abs_error_estimate = std::pow(raw.abs_error_estimate + tail, 1.0 / pd);
  return out;
}

struct SampleCompareReport {
  int n = 0;
  double max_rel_dev = 0;
  double worst_x = 0;
};

/// Evaluates both functions at n log-uniform points on (1e-6, 1e6), nudged
/// off breakpoints, and reports the largest relative deviation. The scale
/// floor keeps sub-1e-12 values from reporting spurious blowups.
inline SampleCompareReport sample_compare(const PiecewiseFn& f,
                                          const PiecewiseFn& g, int n,
                                          std::uint64_t seed = 0x5eedf00dULL) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-6.0, 6.0);
  std::vector<double> bps;
  for (const Rational& b : breakpoints(f)) bps.push_back(b.to_double());
  for (const Rational& b : breakpoints(g)) bps.push_back(b.to_double());
  SampleCompareReport rep;
  rep.n = n;
  for (int i = 0; i < n; ++i) {
    double x = std::pow(10.0, uni(rng));
    for (double b : bps)
      if (std::abs(x - b) < 1e-9 * std::max(x, b)) x *= 1.0 + 1e-4;
    double fv = evaluate(f, x), gv = evaluate(g, x);
    double scale = std::max({std::abs(fv), std::abs(gv), 1e-12});
    double dev = std::abs(fv - gv) / scale;
    if (dev > rep.max_rel_dev) {
      rep.max_rel_dev = dev;
      rep.worst_x = x;
    }
  }
  return rep;
}

}  // namespace ordconv
