#include "lvp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "lvp/quad.hpp"

namespace lvp {

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
    case Verdict::unstable: return "unstable";
  }
  return "unknown";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |x - y|, measured around the circle when the grid is periodic.
double separation(const KernelGrid& g, double x, double y) {
  double d = std::abs(x - y);
  if (g.period > 0.0) {
    d = std::fmod(d, g.period);
    d = std::min(d, g.period - d);
  }
  return d;
}

double drift_of(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*lo > 0.0)) return kInf;
  return *hi / *lo;
}

std::vector<double> times_of(const std::vector<KernelGrid>& family) {
  std::vector<double> t;
  for (const auto& g : family) t.push_back(g.t);
  return t;
}

std::string key(const std::string& name, double value) {
  std::ostringstream os;
  os << name << "@" << value;
  return os.str();
}

}  // namespace

ValidationReport check_conservation(const std::vector<KernelGrid>& family, double tol,
                                    const JumpMeasure* mu) {
  ValidationReport rep;
  rep.check = "conservation";
  rep.tolerance = tol;
  rep.t_nodes = times_of(family);
  double worst = 0.0, worst_tail = 0.0;
  bool inconclusive = false;
  for (const auto& g : family) {
    rep.grid_points += static_cast<int>(g.values.size());
    for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
      double mass = g.values.row(i).sum() * g.y.step;
      double tail = 0.0;
      if (g.period <= 0.0) {
        if (!mu) {
          inconclusive = true;
          continue;
        }
        const double x = g.x.at(static_cast<int>(i));
        const double left = x - g.y.start, right = g.y.back() - x;
        tail = 0.5 * g.t * (mu->tail(std::max(left, 0.0)) + mu->tail(std::max(right, 0.0)));
        if (tail > 1e-4) inconclusive = true;
        mass += tail;
      }
      worst_tail = std::max(worst_tail, tail);
      const double err = std::abs(mass - 1.0);
      if (err > worst) {
        worst = err;
        rep.witness = std::make_pair(g.t, g.x.at(static_cast<int>(i)));
      }
    }
  }
  rep.residual = worst;
  rep.constants["tail_mass"] = worst_tail;
  if (inconclusive) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "grid too narrow for the mass beyond its edges";
  } else {
    rep.verdict = worst <= tol ? Verdict::pass : Verdict::fail;
  }
  return rep;
}

ValidationReport check_nonnegativity(const std::vector<KernelGrid>& family, double rel_tol) {
  ValidationReport rep;
  rep.check = "nonnegativity";
  rep.tolerance = rel_tol;
  rep.t_nodes = times_of(family);
  double worst = 0.0;
  int clamped = 0;
  for (const auto& g : family) {
    rep.grid_points += static_cast<int>(g.values.size());
    const double mx = g.values.maxCoeff();
    Eigen::Index i = 0, j = 0;
    const double mn = std::min(g.values.minCoeff(&i, &j), g.min_value);
    clamped += g.clamped;
    const double depth = mn < 0.0 ? -mn / mx : 0.0;
    if (depth > worst) {
      worst = depth;
      rep.witness = std::make_pair(g.x.at(static_cast<int>(i)), g.y.at(static_cast<int>(j)));
    }
  }
  rep.residual = worst;
  rep.constants["clamped_entries"] = clamped;
  rep.verdict = worst <= rel_tol ? Verdict::pass : Verdict::fail;
  if (clamped > 0) rep.note = "small negatives clamped";
  return rep;
}

ValidationReport check_chapman_kolmogorov(const KernelGrid& ps, const KernelGrid& pts,
                                          const KernelGrid& pt, double tol) {
  auto same = [](const UniformGrid& a, const UniformGrid& b) {
    return a.size == b.size && std::abs(a.step - b.step) <= 1e-12 * a.step &&
           std::abs(a.start - b.start) <= 1e-9 * std::max(1.0, std::abs(a.start));
  };
  if (!same(ps.y, pts.x) || !same(ps.x, pt.x) || !same(pts.y, pt.y))
    throw std::invalid_argument("Chapman-Kolmogorov: kernels live on different grids");
  ValidationReport rep;
  rep.check = "chapman_kolmogorov";
  rep.tolerance = tol;
  rep.t_nodes = {ps.t, pts.t, pt.t};
  rep.grid_points = static_cast<int>(pt.values.size());
  const double concentration = (ps.values.rowwise().maxCoeff() * ps.y.step).maxCoeff();
  rep.constants["cell_mass"] = concentration;
  if (concentration > 0.5) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "p_s concentrates on a single cell; refine the grid";
    return rep;
  }
  const Eigen::MatrixXd composed = ps.values * pts.values * ps.y.step;
  Eigen::Index i = 0, j = 0;
  const double diff = (composed - pt.values).cwiseAbs().maxCoeff(&i, &j);
  rep.residual = diff / pt.values.cwiseAbs().maxCoeff();
  rep.witness = std::make_pair(pt.x.at(static_cast<int>(i)), pt.y.at(static_cast<int>(j)));
  rep.verdict = rep.residual <= tol ? Verdict::pass : Verdict::fail;
  return rep;
}

ValidationReport check_on_diagonal(const std::vector<KernelGrid>& family,
                                   const std::vector<double>& rho, double drift) {
  if (rho.size() != family.size())
    throw std::invalid_argument("one scaling value per kernel is required");
  ValidationReport rep;
  rep.check = "on_diagonal";
  rep.tolerance = drift;
  rep.t_nodes = times_of(family);
  std::vector<double> lows, highs;
  for (size_t k = 0; k < family.size(); ++k) {
    const auto& g = family[k];
    const Eigen::Index n = std::min(g.values.rows(), g.values.cols());
    double lo = kInf, hi = -kInf;
    for (Eigen::Index i = 0; i < n; ++i) {
      // Diagonal entries exist only where the row and column grids coincide.
      const double v = g.values(i, i) / rho[k];
      if (v < lo) {
        lo = v;
        if (v <= 0.0) rep.witness = std::make_pair(g.t, g.x.at(static_cast<int>(i)));
      }
      hi = std::max(hi, v);
    }
    rep.grid_points += static_cast<int>(n);
    lows.push_back(lo);
    highs.push_back(hi);
    rep.constants[key("c1", g.t)] = lo;
    rep.constants[key("c2", g.t)] = hi;
  }
  const double c1 = *std::min_element(lows.begin(), lows.end());
  const double c2 = *std::max_element(highs.begin(), highs.end());
  rep.constants["c1"] = c1;
  rep.constants["c2"] = c2;
  const double d = std::max(drift_of(lows), drift_of(highs));
  rep.constants["drift"] = d;
  rep.residual = d;
  if (!(c1 > 0.0)) rep.verdict = Verdict::fail;
  else rep.verdict = d < drift ? Verdict::pass : Verdict::unstable;
  return rep;
}

ValidationReport check_lower_bound(const std::vector<KernelGrid>& family,
                                   const std::vector<double>& rho) {
  if (rho.size() != family.size())
    throw std::invalid_argument("one scaling value per kernel is required");
  ValidationReport rep;
  rep.check = "lower_bound";
  rep.t_nodes = times_of(family);
  double best_d3 = -kInf, best_d4 = 0.0;
  for (double d4 : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    double d3 = kInf;
    std::vector<double> per_t;
    for (size_t k = 0; k < family.size(); ++k) {
      const auto& g = family[k];
      double local = kInf;
      for (Eigen::Index j = 0; j < g.values.cols(); ++j)
        for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
          const double d = separation(g, g.x.at(static_cast<int>(i)), g.y.at(static_cast<int>(j)));
          const double w = 1.0 - d4 * d * rho[k];
          if (w <= 0.0) continue;
          local = std::min(local, g.values(i, j) / (rho[k] * w));
        }
      per_t.push_back(local);
      d3 = std::min(d3, local);
    }
    if (d3 > best_d3) {
      best_d3 = d3;
      best_d4 = d4;
      for (size_t k = 0; k < family.size(); ++k) rep.constants[key("d3", family[k].t)] = per_t[k];
    }
  }
  for (const auto& g : family) rep.grid_points += static_cast<int>(g.values.size());
  rep.constants["d3"] = best_d3;
  rep.constants["d4"] = best_d4;
  rep.residual = best_d3;
  rep.verdict = best_d3 > 0.0 && std::isfinite(best_d3) ? Verdict::pass : Verdict::fail;
  return rep;
}

double example_rhs(ExampleBound kind, double alpha, double eps, double t, double distance) {
  const double scale = std::pow(t, 1.0 / alpha);
  double bracket = 1.0;
  if (distance >= scale) {
    const double e = kind == ExampleBound::stable ? 1.0 + alpha : alpha;
    const double r = scale / distance;
    bracket += std::pow(r, e) + std::pow(t, eps / alpha) * std::pow(r, e - eps);
  }
  return bracket / scale;
}

ValidationReport check_example_bounds(const std::vector<KernelGrid>& family,
                                      ExampleBound kind, double alpha, double eps,
                                      double drift) {
  ValidationReport rep;
  rep.check = kind == ExampleBound::stable ? "example_bound_stable" : "example_bound_dyadic";
  rep.tolerance = drift;
  rep.t_nodes = times_of(family);
  std::vector<double> fitted;
  for (const auto& g : family) {
    double sup = 0.0;
    for (Eigen::Index j = 0; j < g.values.cols(); ++j)
      for (Eigen::Index i = 0; i < g.values.rows(); ++i) {
        const double x = g.x.at(static_cast<int>(i)), y = g.y.at(static_cast<int>(j));
        const double r = g.values(i, j) / example_rhs(kind, alpha, eps, g.t, separation(g, x, y));
        if (r > sup) {
          sup = r;
          if (!std::isfinite(r)) rep.witness = std::make_pair(x, y);
        }
      }
    rep.grid_points += static_cast<int>(g.values.size());
    fitted.push_back(sup);
    rep.constants[key("C", g.t)] = sup;
  }
  const double C = *std::max_element(fitted.begin(), fitted.end());
  const double d = drift_of(fitted);
  rep.constants["C"] = C;
  rep.constants["drift"] = d;
  rep.residual = d;
  if (!std::isfinite(C)) rep.verdict = Verdict::fail;
  else rep.verdict = d < drift ? Verdict::pass : Verdict::unstable;
  return rep;
}

std::vector<double> apply_semigroup(const KernelGrid& p, const std::function<double(double)>& f) {
  Eigen::VectorXd fv(p.y.size);
  for (int j = 0; j < p.y.size; ++j) fv(j) = f(p.y.at(j));
  const Eigen::VectorXd out = p.values * fv * p.y.step;
  return {out.data(), out.data() + out.size()};
}

std::vector<double> generator_action(const ModelSpec& model, const SmoothFunction& f,
                                     const std::vector<double>& x) {
  constexpr double split = 0.25;
  std::vector<JumpMeasure> pieces;
  for (const auto& term : model.pert.terms) pieces.push_back(model.base.reweighted(term.k));
  std::vector<double> out(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    double v = levy_action(model.base, f, x[i], split);
    for (size_t l = 0; l < pieces.size(); ++l) {
      const double a = model.pert.terms[l].a(x[i]);
      if (a != 0.0) v += a * levy_action(pieces[l], f, x[i], split);
    }
    out[i] = v;
  }
  return out;
}

ValidationReport check_generator_identity(const ModelSpec& model, const KernelFamily& family,
                                          const SmoothFunction& f, double t, double tol,
                                          int time_nodes) {
  if (!f.f) throw std::invalid_argument("generator identity needs a test function");
  if (!f.d2) throw std::invalid_argument("test function must supply its second derivative");
  ValidationReport rep;
  rep.check = "generator_identity";
  const KernelGrid pt = family(t);
  const std::vector<double> nodes = pt.y.nodes();
  const std::vector<double> Lf = generator_action(model, f, nodes);
  double sup_Lf = 0.0;
  for (double v : Lf) sup_Lf = std::max(sup_Lf, std::abs(v));
  auto Lf_at = [&](double y) {
    const long j = std::lround((y - pt.y.start) / pt.y.step);
    return Lf[static_cast<size_t>(std::clamp<long>(j, 0, pt.y.size - 1))];
  };
  const std::vector<double> Ttf = apply_semigroup(pt, f.f);
  std::vector<double> integral(Ttf.size(), 0.0);
  // Row sums of a sampled kernel alias once e^{-s q} is still large at twice
  // the grid Nyquist frequency. Below that time the integral starts with a
  // trapezoid from T_0 L f = L f.
  const double xi_alias = 2.0 * std::numbers::pi / pt.y.step;
  double s0 = std::min(t, 8.0 / model.base.q(xi_alias));
  if (s0 < 1e-3 * t) s0 = 0.0;
  if (s0 > 0.0) {
    const std::vector<double> v = apply_semigroup(family(s0), Lf_at);
    for (size_t i = 0; i < v.size(); ++i) integral[i] += 0.5 * s0 * (Lf[i] + v[i]);
    rep.t_nodes.push_back(s0);
  }
  if (s0 < t) {
    const quad::Rule rule = quad::gauss_legendre(time_nodes, s0, t);
    for (size_t k = 0; k < rule.nodes.size(); ++k) {
      const std::vector<double> v = apply_semigroup(family(rule.nodes[k]), Lf_at);
      for (size_t i = 0; i < v.size(); ++i) integral[i] += rule.weights[k] * v[i];
      rep.t_nodes.push_back(rule.nodes[k]);
    }
  }
  rep.constants["resolved_time"] = s0;
  rep.t_nodes.push_back(t);
  double worst = 0.0;
  for (size_t i = 0; i < Ttf.size(); ++i) {
    const double x = pt.x.at(static_cast<int>(i));
    const double r = std::abs(Ttf[i] - f.f(x) - integral[i]);
    if (r > worst) {
      worst = r;
      rep.witness = std::make_pair(t, x);
    }
  }
  rep.grid_points = static_cast<int>(Ttf.size());
  rep.residual = worst;
  rep.tolerance = tol * (1.0 + sup_Lf);
  rep.constants["sup_Lf"] = sup_Lf;
  rep.verdict = worst <= rep.tolerance ? Verdict::pass : Verdict::fail;
  return rep;
}

namespace {

// int_R f(z) dz for an integrable f smooth away from the given points.
double line_integral(const std::function<double(double)>& f, std::vector<double> breaks) {
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  const double lo = breaks.front(), hi = breaks.back();
  double acc = 0.0;
  if (breaks.size() > 1) acc += quad::qags_pieces(f, breaks, 0.0, 1e-9).value;
  acc += quad::qagiu(f, hi, 0.0, 1e-9).value;
  acc += quad::qagiu([&](double z) { return f(-z); }, -lo, 0.0, 1e-9).value;
  return acc;
}

double g_kernel(double rho, double c, double theta, double x) {
  const double v = rho * std::abs(x);
  return rho * std::exp(-theta * c * v * std::log1p(v));
}

}  // namespace

ValidationReport check_convolution_lemma(const JumpMeasure& mu, const ScalingTable& scaling,
                                         const ConvolutionLemmaSpec& spec) {
  ValidationReport rep;
  rep.check = "convolution_lemma";
  rep.tolerance = spec.drift;
  rep.t_nodes = spec.t_nodes;
  auto h_eps = [&](double rho, double x) {
    const double v = rho * std::abs(x);
    return v == 0.0 ? 0.0 : rho * std::pow(v, spec.eps) * spec.h(v);
  };
  double worst_drift = 1.0, max_i = 0.0, max_ii = 0.0;
  auto record = [&](const std::string& name, const std::vector<double>& per_t) {
    const double d = drift_of(per_t);
    worst_drift = std::max(worst_drift, d);
    rep.constants[name + ".drift"] = d;
    for (size_t k = 0; k < per_t.size(); ++k) rep.constants[key(name, spec.t_nodes[k])] = per_t[k];
  };
  for (double frac : spec.s_fractions) {
    for (double theta : spec.thetas) {
      std::vector<double> per_t;
      for (double t : spec.t_nodes) {
        const double s = frac * t;
        const double rt = scaling.rho_at(mu, t), ra = scaling.rho_at(mu, t - s),
                     rb = scaling.rho_at(mu, s);
        double sup = 0.0;
        for (int i = 0; i < spec.points; ++i) {
          const double x = spec.x_max_scaled / rt * i / (spec.points - 1);
          const double conv = line_integral(
              [&](double z) { return g_kernel(ra, spec.c, 1.0, z) * g_kernel(rb, spec.c, 1.0, x - z); },
              {0.0, x, -1.0 / ra, 1.0 / ra, x - 1.0 / rb, x + 1.0 / rb});
          const double lhs = std::pow(t - s, spec.delta) * std::pow(s, spec.delta) * conv;
          const double rhs = std::pow(t, 2.0 * spec.delta) * g_kernel(rt, spec.c, theta, x);
          rep.grid_points += 1;
          sup = std::max(sup, lhs / rhs);
        }
        per_t.push_back(sup);
        max_i = std::max(max_i, sup);
      }
      std::ostringstream name;
      name << "g.theta" << theta << ".s" << frac;
      record(name.str(), per_t);
    }
    std::vector<double> per_t;
    for (double t : spec.t_nodes) {
      const double s = frac * t;
      const double rt = scaling.rho_at(mu, t), ra = scaling.rho_at(mu, t - s),
                   rb = scaling.rho_at(mu, s);
      double sup = 0.0;
      for (int i = 0; i < spec.points; ++i) {
        // The bound degenerates at the origin, where h_{t,eps} vanishes.
        const double x = (1.0 + (spec.x_max_scaled - 1.0) * i / (spec.points - 1)) / rt;
        const double conv = line_integral(
            [&](double z) { return h_eps(ra, z) * h_eps(rb, x - z); },
            {0.0, x, -1.0 / ra, 1.0 / ra, x - 1.0 / rb, x + 1.0 / rb});
        rep.grid_points += 1;
        sup = std::max(sup, conv / h_eps(rt, x));
      }
      per_t.push_back(sup);
      max_ii = std::max(max_ii, sup);
    }
    std::ostringstream name;
    name << "h.s" << frac;
    record(name.str(), per_t);
  }
  rep.constants["C_g"] = max_i;
  rep.constants["C_h"] = max_ii;
  rep.residual = worst_drift;
  if (!std::isfinite(max_i) || !std::isfinite(max_ii)) rep.verdict = Verdict::fail;
  else rep.verdict = worst_drift < spec.drift ? Verdict::pass : Verdict::unstable;
  return rep;
}

ValidationReport check_compound_bound(const std::vector<KernelGrid>& phi_family,
                                      const JumpMeasure& mu, double eta, double eps, double c,
                                      double drift) {
  ValidationReport rep;
  rep.check = "compound_bound";
  rep.tolerance = drift;
  rep.t_nodes = times_of(phi_family);
  std::vector<double> fitted;
  for (const auto& phi : phi_family) {
    if (phi.period <= 0.0) throw std::invalid_argument("compound bound expects periodic kernels");
    const double t = phi.t;
    const double rho = scaling_rho(mu, t);
    // The compound grid has to reach the nearest periodic images.
    CompoundGridSpec grid_spec;
    grid_spec.half_width = std::max(40.0 / rho, 1.5 * phi.period);
    const CompoundSet set = build_compound_measures(mu, t, eps, grid_spec);
    const int n = phi.x.size;
    const double step = phi.x.step;
    std::vector<double> bound(static_cast<size_t>(n));
    auto g = [&](double z) { return g_kernel(rho, c, 1.0, z); };
    for (int d = 0; d < n; ++d) {
      const double z = (d <= n / 2 ? d : d - n) * step;
      double acc = 0.0;
      for (int image = -2; image <= 2; ++image) acc += set.g.smooth(g, z + image * phi.period);
      bound[static_cast<size_t>(d)] = std::pow(t, -1.0 + eta) * acc;
    }
    double sup = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double r = std::abs(phi.values(i, j)) / bound[static_cast<size_t>(((j - i) % n + n) % n)];
        if (r > sup) {
          sup = r;
          rep.witness = std::make_pair(phi.x.at(i), phi.y.at(j));
        }
      }
    rep.grid_points += n * n;
    fitted.push_back(sup);
    rep.constants[key("C", t)] = sup;
  }
  const double d = drift_of(fitted);
  rep.constants["C"] = *std::max_element(fitted.begin(), fitted.end());
  rep.constants["drift"] = d;
  rep.residual = d;
  if (!std::isfinite(rep.constants["C"])) rep.verdict = Verdict::fail;
  else rep.verdict = d < drift ? Verdict::pass : Verdict::unstable;
  return rep;
}

}  // namespace lvp
