#include "lvp/freekernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "lvp/spectral.hpp"

namespace lvp {

std::vector<double> UniformGrid::nodes() const {
  std::vector<double> out(static_cast<size_t>(size));
  for (int i = 0; i < size; ++i) out[static_cast<size_t>(i)] = at(i);
  return out;
}

UniformGrid UniformGrid::centered(double step, int size) {
  return UniformGrid{-0.5 * (size - 1) * step, step, size};
}

std::string provenance_name(Provenance p) {
  switch (p) {
    case Provenance::p0: return "p0";
    case Provenance::phi: return "phi";
    case Provenance::phi_k: return "phi_k";
    case Provenance::psi: return "psi";
    case Provenance::p: return "p";
    case Provenance::p_eps: return "p_eps";
  }
  return "unknown";
}

namespace {

using spectral::cplx;

constexpr double kDecayTarget = 46.0;
constexpr int kImageTerms = 64;

// Order of the spatial derivative, or -1 for the time derivative.
struct Target {
  int order = 0;
  bool time = false;
};

double log_weight(const Target& target, double xi, double q) {
  if (target.time) return std::log(std::max(q, 1.0));
  return target.order * std::log(std::max(xi, 1.0));
}

cplx multiplier(const Target& target, double xi, double q) {
  if (target.time) return cplx(-q, 0.0);
  switch (target.order) {
    case 0: return 1.0;
    case 1: return cplx(0.0, xi);
    case 2: return -xi * xi;
    default: return cplx(0.0, -xi * xi * xi);
  }
}

// k-th derivative by central differences of a function smooth on scale `e`.
double finite_derivative(const std::function<double(double)>& f, double x, int k,
                         double e) {
  switch (k) {
    case 0: return f(x);
    case 1: return (f(x + e) - f(x - e)) / (2.0 * e);
    case 2: return (f(x + e) - 2.0 * f(x) + f(x - e)) / (e * e);
    default:
      return (f(x + 2 * e) - 2.0 * f(x + e) + 2.0 * f(x - e) - f(x - 2 * e)) /
             (2.0 * e * e * e);
  }
}

void require_admissible(const JumpMeasure& mu, const InversionOptions& opts) {
  try {
    mu.validate();
  } catch (const std::invalid_argument& e) {
    throw A1Refused(std::string("measure outside the admissible class: ") + e.what());
  }
  if (opts.assume_A1) return;
  const A1Report rep = check_A1(mu, 1.0, 1e6, 10);
  if (!rep.pass) throw A1Refused("condition A1 not verified; inversion refused");
}

Slice1D invert(const JumpMeasure& mu, double t, const UniformGrid& grid,
               const InversionOptions& opts, Target target) {
  if (!(t > 0.0)) throw std::invalid_argument("inversion needs t > 0");
  if (grid.size <= 0 || !(grid.step > 0.0))
    throw std::invalid_argument("inversion needs a nonempty uniform grid");
  require_admissible(mu, opts);

  // Frequency cutoff: weighted integrand below e^{-46}.
  auto decay = [&](double xi) {
    const double q = mu.q(xi);
    return t * q - log_weight(target, xi, q);
  };
  double hi = 1.0;
  while (decay(hi) < kDecayTarget) {
    hi *= 2.0;
    if (hi > 1e13)
      throw CutoffUnreachable("exponent grows too slowly to reach the cutoff at t = " +
                              std::to_string(t));
  }
  double lo = hi / 2.0;
  for (int it = 0; it < 40 && hi - lo > 1e-3 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (decay(mid) >= kDecayTarget ? hi : lo) = mid;
  }
  const double xi_max = hi;

  const double h = grid.step;
  const bool periodic = opts.period > 0.0;
  const int k = target.time ? 0 : target.order;
  double period = 0.0;
  long M = 0;
  double err = 0.0;
  const double rho = periodic ? 1.0 : scaling_rho(mu, t);

  if (periodic) {
    period = opts.period;
    M = std::lround(period / h);
    if (std::abs(M * h - period) > 1e-9 * period || M < grid.size)
      throw std::invalid_argument("periodic inversion: the step must divide the period");
  } else {
    const double reach = std::max(std::abs(grid.start), std::abs(grid.back()));
    double P = std::max({16.0 * reach, 64.0 / rho, 4.0 * grid.size * h});
    const double scale = std::pow(rho, k + 1);
    while (true) {
      M = spectral::nice_size(static_cast<long>(std::ceil(P / h)));
      P = M * h;
      const double tail_mass = mu.tail(0.5 * P);
      double e1 = 2.0 * t * tail_mass / P;
      for (int j = 0; j < k; ++j) e1 *= 2.0 * (j + 2) / P;
      if (target.time) e1 /= t;
      err = mu.has_density() ? e1 * std::min(1.0, t * tail_mass) : e1;
      const double next_modes = xi_max * 2.0 * P / (2.0 * std::numbers::pi);
      if (err <= opts.tol * scale || next_modes > opts.budget) break;
      P *= 2.0;
    }
    period = P;
  }
  const double modes = xi_max * period / (2.0 * std::numbers::pi);
  if (modes > opts.budget)
    throw CutoffUnreachable("frequency budget exceeded: " + std::to_string(modes) +
                            " modes needed");

  const spectral::Symbol symbol(mu, 1e-3, xi_max * 1.05, 64);
  auto g = [&](double xi) {
    const double q = symbol(xi);
    return multiplier(target, xi, q) * std::exp(-t * q);
  };
  std::vector<double> values = spectral::periodic_series(g, period, M, xi_max, grid.start);

  Slice1D out;
  out.t = t;
  out.x = grid;
  out.value.assign(values.begin(), values.begin() + grid.size);
  out.provenance = periodic ? "periodic" : "line";

  if (!periodic && mu.has_density()) {
    // Remove the first-jump part of the periodic images.
    const double P = period;
    const double amp = target.time ? 1.0 : t;
    auto images = [&](double x) {
      double acc = 0.0;
      for (int m = 1; m <= kImageTerms; ++m)
        acc += mu.density(std::abs(x + m * P)) + mu.density(std::abs(x - m * P));
      if (k == 0) acc += mu.tail((kImageTerms + 0.5) * P) / P;
      return amp * acc;
    };
    for (int i = 0; i < grid.size; ++i)
      out.value[static_cast<size_t>(i)] -= finite_derivative(images, grid.at(i), k, 1e-2 * P);
    out.provenance += "+image-correction";
  }
  // Mirror pairs x, -x get identical magnitudes, with the parity of the order.
  const double centre_real = -2.0 * grid.start / h;
  const long centre = std::lround(centre_real);
  if (std::abs(centre - centre_real) < 1e-6) {
    const bool even = k % 2 == 0;
    for (long i = 0; i < grid.size; ++i) {
      long j = centre - i;
      if (periodic) j = ((j % M) + M) % M;
      if (j < i || j >= grid.size) continue;
      double& a = out.value[static_cast<size_t>(i)];
      double& b = out.value[static_cast<size_t>(j)];
      if (j == i) {
        if (!even) a = 0.0;
        continue;
      }
      const double m = even ? 0.5 * (a + b) : 0.5 * (a - b);
      a = m;
      b = even ? m : -m;
    }
  }
  out.err_est = err + 1e-16 * modes * std::pow(rho, k + 1);
  return out;
}

}  // namespace

Slice1D fourier_invert_p0(const JumpMeasure& mu, double t, const UniformGrid& grid,
                          const InversionOptions& opts) {
  return invert(mu, t, grid, opts, Target{0, false});
}

Slice1D p0_derivative(const JumpMeasure& mu, double t, int k, const UniformGrid& grid,
                      const InversionOptions& opts) {
  if (k < 0 || k > 3) throw std::invalid_argument("derivative order must be 0..3");
  return invert(mu, t, grid, opts, Target{k, false});
}

Slice1D p0_time_derivative(const JumpMeasure& mu, double t, const UniformGrid& grid,
                           const InversionOptions& opts) {
  return invert(mu, t, grid, opts, Target{0, true});
}

FreeKernelTable::FreeKernelTable(const JumpMeasure& mu, double t, double half_width,
                                 double step, double period)
    : mu_(&mu), t_(t), period_(period), reach_(half_width) {
  InversionOptions opts;
  opts.assume_A1 = true;
  opts.period = period;
  if (period > 0.0) {
    const int n = static_cast<int>(std::lround(period / step));
    grid_ = UniformGrid{-0.5 * period, period / n, n};
    reach_ = 0.5 * period;
  } else {
    const int n = 2 * static_cast<int>(std::ceil(half_width / step)) + 1;
    grid_ = UniformGrid::centered(step, n);
    reach_ = -grid_.start;
  }
  p_ = fourier_invert_p0(mu, t, grid_, opts).value;
  p1_ = p0_derivative(mu, t, 1, grid_, opts).value;
  p2_ = p0_derivative(mu, t, 2, grid_, opts).value;
  p3_ = p0_derivative(mu, t, 3, grid_, opts).value;
}

double FreeKernelTable::wrap(double x) const {
  if (period_ <= 0.0) return x;
  double y = std::fmod(x + 0.5 * period_, period_);
  if (y < 0.0) y += period_;
  return y - 0.5 * period_;
}

double FreeKernelTable::hermite(const std::vector<double>& f,
                                const std::vector<double>& df, double x) const {
  const double s = (x - grid_.start) / grid_.step;
  int i = static_cast<int>(std::floor(s));
  const int last = period_ > 0.0 ? grid_.size : grid_.size - 1;
  i = std::clamp(i, 0, last - 1);
  const int j = (i + 1) % grid_.size;
  const double u = s - i, h = grid_.step;
  const double h00 = (1 + 2 * u) * (1 - u) * (1 - u), h10 = u * (1 - u) * (1 - u);
  const double h01 = u * u * (3 - 2 * u), h11 = u * u * (u - 1);
  const auto a = static_cast<size_t>(i), b = static_cast<size_t>(j);
  return h00 * f[a] + h10 * h * df[a] + h01 * f[b] + h11 * h * df[b];
}

double FreeKernelTable::value(double x) const {
  x = wrap(x);
  if (period_ <= 0.0 && std::abs(x) >= reach_)
    return mu_->has_density() ? t_ * mu_->density(std::abs(x)) : 0.0;
  return hermite(p_, p1_, x);
}

double FreeKernelTable::d1(double x) const {
  x = wrap(x);
  if (period_ <= 0.0 && std::abs(x) >= reach_) {
    if (!mu_->has_density()) return 0.0;
    auto f = [&](double y) { return t_ * mu_->density(std::abs(y)); };
    return finite_derivative(f, x, 1, 1e-3 * std::abs(x));
  }
  return hermite(p1_, p2_, x);
}

double FreeKernelTable::d2(double x) const {
  x = wrap(x);
  if (period_ <= 0.0 && std::abs(x) >= reach_) {
    if (!mu_->has_density()) return 0.0;
    auto f = [&](double y) { return t_ * mu_->density(std::abs(y)); };
    return finite_derivative(f, x, 2, 1e-3 * std::abs(x));
  }
  return hermite(p2_, p3_, x);
}

double BoundTemplate::operator()(double x, double rho) const {
  const double ax = std::abs(x);
  return std::visit(
      [&](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Upper>) {
          return k.d1 * std::exp(-k.d2 * ax * std::log1p(ax));
        } else if constexpr (std::is_same_v<K, Lower>) {
          return k.d3 * std::max(0.0, 1.0 - k.d4 * ax);
        } else {
          const double y = rho * ax;
          return rho * std::exp(-k.theta * k.c * y * std::log1p(y));
        }
      },
      kind);
}

void BoundTemplate::validate() const {
  std::visit(
      [](const auto& k) {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, Upper>) {
          if (!(k.d1 > 0 && k.d2 > 0)) throw std::invalid_argument("upper template needs d1, d2 > 0");
        } else if constexpr (std::is_same_v<K, Lower>) {
          if (!(k.d3 > 0 && k.d4 > 0)) throw std::invalid_argument("lower template needs d3, d4 > 0");
        } else {
          if (!(k.c > 0 && k.theta > 0 && k.theta <= 1))
            throw std::invalid_argument("g template needs c > 0 and theta in (0, 1]");
        }
      },
      kind);
}

P0BoundReport verify_p0_bounds(const JumpMeasure& mu, const std::vector<double>& t_nodes,
                               double half_width_scaled, int points) {
  P0BoundReport rep;
  rep.t_nodes = t_nodes;
  if (t_nodes.empty()) throw std::invalid_argument("verify_p0_bounds needs t nodes");
  const std::vector<double> decays{1.0, 0.75, 0.5, 0.3, 0.2, 0.1, 0.05, 0.02};
  const std::vector<double> lower_slopes{1.0, 0.5, 2.0, 0.25, 4.0};
  const int nt = static_cast<int>(t_nodes.size());

  // ratio[k][decay][t] and lower[d4][t]
  std::vector<std::vector<std::vector<double>>> ratio(
      3, std::vector<std::vector<double>>(decays.size(), std::vector<double>(nt, 0.0)));
  std::vector<std::vector<double>> lower(lower_slopes.size(), std::vector<double>(nt, 0.0));

  InversionOptions opts;
  opts.tol = 1e-8;
  for (int it = 0; it < nt; ++it) {
    const double t = t_nodes[static_cast<size_t>(it)];
    const double rho = scaling_rho(mu, t);
    const double step = 2.0 * half_width_scaled / (points - 1) / rho;
    const UniformGrid grid = UniformGrid::centered(step, points);
    std::array<std::vector<double>, 3> deriv;
    for (int k = 0; k < 3; ++k) deriv[static_cast<size_t>(k)] = p0_derivative(mu, t, k, grid, opts).value;
    opts.assume_A1 = true;
    CompoundGridSpec spec;
    spec.step = 1.0 / (8.0 * rho);
    spec.half_width = 4.0 * half_width_scaled / rho;
    const CompoundSet cs = build_compound_measures(mu, t, 0.0, spec);

    for (size_t a = 0; a < decays.size(); ++a) {
      const BoundTemplate up{BoundTemplate::Upper{1.0, decays[a]}};
      auto f = [&](double y) { return up(rho * y); };
      for (int i = 0; i < points; ++i) {
        const double env = cs.poisson.smooth(f, grid.at(i));
        for (int k = 0; k < 3; ++k) {
          const double scale = std::pow(rho, k + 1) * env;
          const double r = std::abs(deriv[static_cast<size_t>(k)][static_cast<size_t>(i)]) / scale;
          auto& slot = ratio[static_cast<size_t>(k)][a][static_cast<size_t>(it)];
          slot = std::max(slot, std::isfinite(r) ? r : 1e300);
        }
      }
    }
    for (size_t d = 0; d < lower_slopes.size(); ++d) {
      double best = 1e300;
      for (int i = 0; i < points; ++i) {
        const double y = std::abs(grid.at(i)) * rho;
        const double shape = 1.0 - lower_slopes[d] * y;
        if (shape <= 0.0) continue;
        best = std::min(best, deriv[0][static_cast<size_t>(i)] / (rho * shape));
      }
      lower[d][static_cast<size_t>(it)] = best;
    }
  }

  auto drift = [](const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return (*lo > 0.0 && *hi < 1e299) ? *hi / *lo : 1e300;
  };

  rep.pass = true;
  for (int k = 0; k < 3; ++k) {
    size_t chosen = decays.size();
    double best_drift = 1e300;
    size_t best = 0;
    for (size_t a = 0; a < decays.size(); ++a) {
      const double d = drift(ratio[static_cast<size_t>(k)][a]);
      if (d <= 2.0 && chosen == decays.size()) chosen = a;
      if (d < best_drift) { best_drift = d; best = a; }
    }
    if (chosen == decays.size()) chosen = best;
    rep.decay[static_cast<size_t>(k)] = decays[chosen];
    rep.amplitude[static_cast<size_t>(k)] = ratio[static_cast<size_t>(k)][chosen];
    rep.amplitude_drift[static_cast<size_t>(k)] = drift(ratio[static_cast<size_t>(k)][chosen]);
    if (rep.amplitude_drift[static_cast<size_t>(k)] > 2.0) {
      rep.pass = false;
      if (rep.failure.empty())
        rep.failure = "upper bound constant for derivative order " + std::to_string(k) +
                      " drifts by " + std::to_string(rep.amplitude_drift[static_cast<size_t>(k)]);
    }
  }

  size_t chosen = lower_slopes.size();
  for (size_t d = 0; d < lower_slopes.size(); ++d) {
    const auto& v = lower[d];
    const bool positive = std::all_of(v.begin(), v.end(), [](double x) { return x > 0.0; });
    if (positive && drift(v) <= 2.0) { chosen = d; break; }
  }
  if (chosen == lower_slopes.size()) {
    chosen = 0;
    rep.pass = false;
    if (rep.failure.empty()) rep.failure = "no lower-bound slope gives a stable positive d3";
  }
  rep.d4 = lower_slopes[chosen];
  rep.d3_per_t = lower[chosen];
  rep.d3 = *std::min_element(lower[chosen].begin(), lower[chosen].end());
  rep.d3_drift = drift(lower[chosen]);
  if (rep.d3 <= 0.0) {
    rep.pass = false;
    rep.witness = std::make_pair(t_nodes.front(), 0.0);
  }
  return rep;
}

}  // namespace lvp
