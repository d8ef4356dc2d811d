#include "lvp/exponent.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "lvp/quad.hpp"

namespace lvp {

double PerturbationSpec::m(double x, double u) const {
  double acc = 0.0;
  for (const auto& term : terms) acc += term.a(x) * term.k.w(u);
  return acc;
}

PerturbationSpec zero_perturbation() { return PerturbationSpec{}; }

double ScalingTable::rho_at(const JumpMeasure& mu, double t) const {
  for (std::size_t i = 0; i < t_nodes.size(); ++i)
    if (std::abs(t_nodes[i] - t) <= 1e-14 * t) return rho[i];
  return scaling_rho(mu, t);
}

double scaling_rho(const JumpMeasure& mu, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("scaling_rho needs t > 0");
  const double target = 1.0 / t;
  auto f = [&](double xi) { return mu.qU(xi) - target; };

  double hi = 1.0;
  double fhi = f(hi);
  int flat = 0;
  double prev = fhi;
  while (fhi < 0.0) {
    hi *= 2.0;
    fhi = f(hi);
    flat = (fhi <= prev + 1e-14 * target) ? flat + 1 : 0;
    prev = fhi;
    if (flat >= 4 || hi > 1e300)
      throw ScalingUndefined("scaling undefined at t = " + std::to_string(t) +
                             ": q^U stays below 1/t (sup about " +
                             std::to_string(fhi + target) + ")");
  }
  double lo = hi;
  double flo = fhi;
  while (flo >= 0.0) {
    lo *= 0.5;
    flo = f(lo);
    if (lo < 1e-300) throw ScalingUndefined("q^U does not vanish at the origin");
  }
  // q^U is nondecreasing; the bracket [lo, hi] straddles the root.
  boost::math::tools::eps_tolerance<double> tol(44);
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (a + b);
}

A1Report check_A1(const JumpMeasure& mu, double xi_lo, double xi_hi,
                  int per_decade) {
  A1Report rep;
  const double decades = std::log10(xi_hi / xi_lo);
  const int n = static_cast<int>(std::lround(decades * per_decade)) + 1;
  std::vector<double> running;
  double sup = 0.0;
  for (int j = 0; j < n; ++j) {
    double xi = xi_lo * std::pow(10.0, static_cast<double>(j) / per_decade);
    double u = mu.qU(xi), l = mu.qL(xi);
    if (l <= 0.0 && u > 0.0) {
      rep.witness_xi = xi;
      rep.pass = false;
      return rep;
    }
    double r = u / l;
    rep.xi.push_back(xi);
    rep.ratio.push_back(r);
    sup = std::max(sup, r);
    running.push_back(sup);
  }
  rep.beta_hat = sup;
  rep.alpha_hat = 2.0 / sup;
  double start = 0.0;
  for (std::size_t j = 0; j < rep.xi.size(); ++j)
    if (rep.xi[j] >= xi_hi / 10.0 * (1.0 - 1e-12)) {
      start = running[j];
      break;
    }
  rep.top_decade_variation = (running.back() - start) / running.back();
  rep.pass = rep.top_decade_variation < 0.05 && rep.beta_hat > 1.0;
  return rep;
}

std::vector<double> default_sigma_nodes() {
  std::vector<double> t;
  for (int j = 0; j <= 8; ++j) t.push_back(std::pow(10.0, -3.0 + j / 8.0));
  return t;
}

double estimate_sigma(const JumpMeasure& mu, const std::vector<double>& t_nodes,
                      double alpha_hat) {
  if (t_nodes.empty()) throw InsufficientData("no t nodes");
  const double tmin = *std::min_element(t_nodes.begin(), t_nodes.end());
  std::vector<double> xs, ys;
  for (double t : t_nodes)
    if (t <= 10.0 * tmin * (1.0 + 1e-12)) {
      xs.push_back(-std::log(t));
      ys.push_back(std::log(scaling_rho(mu, t)));
    }
  if (xs.size() < 4)
    throw InsufficientData("sigma fit needs at least 4 nodes in the smallest decade");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  double slope = sxy / sxx;
  return std::clamp(1.0 / slope, alpha_hat, 2.0);
}

ScalingTable make_scaling_table(const JumpMeasure& mu, std::vector<double> t_nodes) {
  std::sort(t_nodes.begin(), t_nodes.end());
  ScalingTable tab;
  A1Report a1 = check_A1(mu);
  if (!a1.pass) throw std::runtime_error("condition A1 not verified for this measure");
  tab.beta_hat = a1.beta_hat;
  tab.alpha = a1.alpha_hat;
  tab.t_nodes = t_nodes;
  for (double t : t_nodes) tab.rho.push_back(scaling_rho(mu, t));
  tab.sigma_hat = estimate_sigma(mu, default_sigma_nodes(), tab.alpha);
  return tab;
}

SamplePlan SamplePlan::standard() {
  SamplePlan p;
  for (int i = -20; i <= 20; ++i) p.x.push_back(i * std::numbers::pi / 10.0);
  for (int j = 0; j <= 48; ++j) {
    double u = std::pow(10.0, -8.0 + j * 0.25);
    p.u.push_back(u);
    p.u.push_back(-u);
  }
  return p;
}

PerturbationReport check_perturbation(const PerturbationSpec& pert,
                                      const JumpMeasure& mu,
                                      const SamplePlan& plan) {
  PerturbationReport rep;
  for (double x : plan.x)
    for (double u : plan.u) {
      double v = pert.m(x, u), w = pert.m(x, -u);
      if (std::abs(v - w) > 1e-12 * std::max(1.0, std::abs(v))) {
        rep.symmetric = false;
        if (!rep.witness) rep.witness = {x, u};
      }
      double env = pert.envelope_c * std::min(1.0, std::pow(std::abs(u), pert.envelope_eps));
      if (v < 0.0 || v > env * (1.0 + 1e-12) + 1e-300) {
        rep.enveloped = false;
        if (!rep.witness) rep.witness = {x, u};
      }
    }
  rep.pass = rep.symmetric && rep.enveloped;

  if (pert.is_zero()) {
    rep.divergent_regime = false;
    rep.intensity = 0.0;
    rep.regime = "bounded";
    return rep;
  }
  const double eps = pert.envelope_eps;
  if (const auto* s = std::get_if<Stable>(&mu.spec()); s && !mu.weighted()) {
    rep.divergent_regime = eps <= s->alpha;
    if (!rep.divergent_regime) rep.intensity = mu.reweighted(cap_power(eps)).tail(0.0 + 1e-300);
  } else {
    JumpMeasure w = mu.reweighted(cap_power(eps));
    std::vector<double> vals;
    for (int j = 1; j <= 6; ++j) vals.push_back(w.tail(std::pow(10.0, -2.0 * j)));
    double d_last = vals[5] - vals[4], d_prev = vals[4] - vals[3];
    double r = d_prev > 0.0 ? d_last / d_prev : 0.0;
    rep.divergent_regime = !(r < 0.9);
    if (!rep.divergent_regime) rep.intensity = vals[5] + d_last * r / (1.0 - r);
  }
  if (rep.divergent_regime) rep.intensity = std::numeric_limits<double>::infinity();
  rep.regime = rep.divergent_regime ? "main" : "bounded";
  return rep;
}

namespace {

std::vector<double> logspace(double lo_exp, double hi_exp, int per_decade) {
  std::vector<double> v;
  int n = static_cast<int>(std::lround((hi_exp - lo_exp) * per_decade));
  for (int j = 0; j <= n; ++j)
    v.push_back(std::pow(10.0, lo_exp + static_cast<double>(j) / per_decade));
  return v;
}

}  // namespace

TailReport check_tail_hypotheses(const JumpMeasure& mu, const TailFunctionSpec& tail,
                                 const ScalingTable& scaling) {
  TailReport rep;
  const auto& h = tail.h;
  const std::vector<double> vgrid = logspace(0.0, 4.0, 10);

  // Domination of the rescaled tail (condition I) or density (condition II).
  double top = 0.0, rest = 0.0;
  for (std::size_t i = 0; i < scaling.t_nodes.size(); ++i) {
    double t = scaling.t_nodes[i], rho = scaling.rho[i];
    for (double v : vgrid) {
      double lhs;
      if (tail.kind == TailFunctionSpec::Kind::survival) {
        lhs = t * mu.tail(v / rho);
      } else {
        if (!mu.has_density())
          throw std::invalid_argument("density tail condition needs a density measure");
        lhs = (t / rho) * mu.density(v / rho);
      }
      double r = lhs / h(v);
      if (!std::isfinite(r)) {
        rep.witness = {t, v};
        r = std::numeric_limits<double>::infinity();
      }
      rep.fitted_C = std::max(rep.fitted_C, r);
      (v >= 1e3 ? top : rest) = std::max(v >= 1e3 ? top : rest, r);
    }
  }
  rep.dominated = std::isfinite(rep.fitted_C) && top <= 2.0 * rest;

  // Long-tailedness: h(x - y) / h(x) -> 1.
  rep.long_tailed = true;
  for (double y : {1.0, 3.0}) {
    double first = std::abs(h(1e2 - y) / h(1e2) - 1.0);
    double last = std::abs(h(1e6 - y) / h(1e6) - 1.0);
    if (!(last < 1e-2 && last <= first + 1e-15)) rep.long_tailed = false;
  }

  rep.monotone = true;
  double prev = std::numeric_limits<double>::infinity();
  for (double x : logspace(0.0, 6.0, 10)) {
    double v = std::pow(x, 2.0 * tail.eps) * h(x);
    if (v > prev * (1.0 + 1e-12)) {
      rep.monotone = false;
      if (!rep.witness) rep.witness = {x, v};
    }
    prev = v;
  }

  rep.hyp_a = true;
  for (double c : {1.0, 1.5, 2.0, 4.0, 10.0, 100.0})
    for (double x : logspace(0.0, 4.0, 10))
      if (h(c * x) > h(x) / c * (1.0 + 1e-12)) {
        rep.hyp_a = false;
        if (!rep.witness) rep.witness = {c, x};
      }

  double b_top = 0.0, b_rest = 0.0;
  for (double x : logspace(0.0, 6.0, 10)) {
    double r = h(x) / h(2.0 * x);
    if (!std::isfinite(r)) r = std::numeric_limits<double>::infinity();
    (x >= 1e5 ? b_top : b_rest) = std::max(x >= 1e5 ? b_top : b_rest, r);
  }
  rep.hyp_b_constant = std::max(b_top, b_rest);
  rep.hyp_b = std::isfinite(b_top) && b_top <= 1.5 * b_rest;

  if (!rep.dominated) rep.failure = "tail domination";
  else if (!rep.long_tailed) rep.failure = "h is not long-tailed";
  else if (!rep.monotone) rep.failure = "x^{2 eps} h(x) not decreasing";
  else if (!rep.hyp_a) rep.failure = "h(cx) <= h(x)/c violated";
  else if (!rep.hyp_b) rep.failure = "h(x) <= c h(2x) violated";
  rep.pass = rep.failure.empty();
  return rep;
}

SubexpReport check_subexponential(const TailFunctionSpec& tail) {
  SubexpReport rep;
  const auto& h = tail.h;
  const std::vector<double> xs{10, 30, 100, 300, 1e3, 3e3, 1e4};
  double norm = 1.0;
  if (tail.kind == TailFunctionSpec::Kind::density)
    norm = quad::qags(h, 0.0, 1.0, 0.0, 1e-10).value + quad::qagiu(h, 1.0, 0.0, 1e-10).value;

  for (double x : xs) {
    double r;
    if (tail.kind == TailFunctionSpec::Kind::survival) {
      // P(X1 + X2 > x) = h(x) + int_[0,x] h(x - y) dG(y), G = 1 - h, with
      // an atom of size 1 - h(0) at the origin.
      const int n = 20000;
      double acc = h(x) + (1.0 - h(0.0)) * h(x);
      double yprev = 0.0, hprev = h(0.0);
      for (int i = 1; i <= n; ++i) {
        double s = static_cast<double>(i) / n;
        double y = 0.5 * x * (1.0 - std::cos(std::numbers::pi * s));
        double hy = h(y);
        acc += h(x - 0.5 * (y + yprev)) * (hprev - hy);
        yprev = y;
        hprev = hy;
      }
      r = acc / h(x);
    } else {
      auto f = [&](double y) { return h(x - y) * h(y); };
      double conv = quad::qags(f, 0.0, 0.5 * x, 0.0, 1e-10).value +
                    quad::qags(f, 0.5 * x, x, 0.0, 1e-10).value;
      r = conv / (norm * h(x));
    }
    rep.x.push_back(x);
    rep.ratio.push_back(r);
  }
  double last = rep.ratio.back(), prev = rep.ratio[rep.ratio.size() - 2];
  if (std::abs(last - 2.0) < 0.05 && std::abs(last - prev) < 0.05)
    rep.verdict = SubexpReport::Verdict::pass;
  else if (!std::isfinite(last) || (last > 4.0 && last > prev))
    rep.verdict = SubexpReport::Verdict::fail;
  else
    rep.verdict = SubexpReport::Verdict::inconclusive;
  return rep;
}

}  // namespace lvp
