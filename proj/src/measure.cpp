#include "lvp/measure.hpp"

#include <algorithm>

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lvp/quad.hpp"

namespace lvp {
namespace {

constexpr double kRel = 1e-11;
constexpr double kSumRel = 1e-12;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

double sin2half(double x) {
  double s = std::sin(0.5 * x);
  return 2.0 * s * s;
}

// 2 * sum_k mass_k w(u_k) f(u_k) over the dyadic atoms, where
// 0 <= f(u) <= bound * min(1, (s u)^2) controls the truncation.
template <class F>
double dyadic_sum(const DyadicDiscrete& d, const Weight& wt, F f, double s,
                  double bound) {
  const double th = d.theta, up = d.upsilon;
  const double wsup = wt.w ? wt.sup : 1.0;
  auto u_of = [&](long k) { return std::exp2(-static_cast<double>(k) * up); };
  auto m_of = [&](long k) { return std::exp2(static_cast<double>(k) * th); };
  auto w_of = [&](double u) { return wt.w ? wt.w(u) : 1.0; };
  const long k0 = static_cast<long>(std::floor(std::log2(s) / up));

  double acc = 0.0;
  const double r_down = std::exp2(-th);
  for (long k = k0;; --k) {
    double u = u_of(k), m = m_of(k);
    acc += 2.0 * m * w_of(u) * f(u);
    double next_major = 2.0 * m_of(k - 1) * wsup * bound;
    if (next_major / (1.0 - r_down) <= kSumRel * std::abs(acc) ||
        next_major < 1e-300)
      break;
  }
  const double r_up = std::exp2(th - 2.0 * up);
  for (long k = k0 + 1;; ++k) {
    double u = u_of(k), m = m_of(k);
    acc += 2.0 * m * w_of(u) * f(u);
    double su = s * u_of(k + 1);
    double next_major =
        2.0 * m_of(k + 1) * wsup * bound * std::min(1.0, su * su);
    if (su <= 1.0 && (next_major / (1.0 - r_up) <= kSumRel * std::abs(acc) ||
                      next_major < 1e-300))
      break;
  }
  return acc;
}

}  // namespace

std::string kind_name(const LevyMeasureSpec& spec) {
  return std::visit(overloaded{[](const Stable&) { return std::string("stable"); },
                               [](const Density&) { return std::string("density"); },
                               [](const Atoms&) { return std::string("atoms"); },
                               [](const DyadicDiscrete&) {
                                 return std::string("dyadic");
                               }},
                    spec);
}

Weight cap_power(double eps, double amplitude) {
  Weight w;
  w.w = [eps, amplitude](double u) {
    double a = std::abs(u);
    return amplitude * (a >= 1.0 ? 1.0 : std::pow(a, eps));
  };
  w.sup = amplitude;
  w.label = "cap_power";
  return w;
}

double stable_density_constant(double alpha) {
  return std::tgamma(1.0 + alpha) * std::sin(std::numbers::pi * alpha / 2.0) /
         std::numbers::pi;
}

Density cauchy_density() {
  Density d;
  d.pi = [](double u) { return 1.0 / (std::numbers::pi * u * u); };
  d.cutoff = 1e3;
  d.tail_mass = [](double v) { return 1.0 / (std::numbers::pi * v); };
  d.label = "cauchy";
  return d;
}

JumpMeasure::JumpMeasure(LevyMeasureSpec spec) : spec_(std::move(spec)) {}

JumpMeasure::JumpMeasure(LevyMeasureSpec spec, Weight weight)
    : spec_(std::move(spec)), weight_(std::move(weight)) {}

JumpMeasure JumpMeasure::reweighted(Weight weight) const {
  if (!weighted()) return JumpMeasure(spec_, std::move(weight));
  Weight inner = weight_;
  Weight combined;
  combined.w = [inner, weight](double u) { return inner.w(u) * weight.w(u); };
  combined.sup = inner.sup * weight.sup;
  combined.label = inner.label + "*" + weight.label;
  return JumpMeasure(spec_, combined);
}

bool JumpMeasure::has_density() const {
  return std::holds_alternative<Density>(spec_) ||
         std::holds_alternative<Stable>(spec_);
}

bool JumpMeasure::is_atomic() const { return !has_density(); }

double JumpMeasure::dens_u(double u) const {
  u = std::abs(u);
  if (const auto* s = std::get_if<Stable>(&spec_))
    return s->scale * stable_density_constant(s->alpha) *
           std::pow(u, -1.0 - s->alpha) * weight_at(u);
  if (const auto* d = std::get_if<Density>(&spec_)) return d->pi(u) * weight_at(u);
  throw std::logic_error("density requested for an atomic measure");
}

double JumpMeasure::density(double u) const { return dens_u(u); }

namespace {

// One-sided integrals for density-type measures.
struct DensityOps {
  std::function<double(double)> dens;
  double cutoff;
  std::function<double(double)> tail_closed;  // only for unweighted densities

  // int_v^inf dens
  double upper(double v) const {
    if (v >= cutoff) {
      if (tail_closed) return tail_closed(v);
      return quad::qagiu(dens, v, 0.0, kRel).value;
    }
    double inner = quad::qags_pieces(dens, breaks(v, cutoff), 0.0, kRel).value;
    double outer = tail_closed ? tail_closed(cutoff)
                               : quad::qagiu(dens, cutoff, 0.0, kRel).value;
    return inner + outer;
  }
  // int_0^v g(u) dens(u) du
  double lower(const std::function<double(double)>& g, double v) const {
    auto f = [&](double u) { return g(u) * dens(u); };
    return quad::qags_pieces(f, breaks(0.0, v), 0.0, kRel).value;
  }
  static std::vector<double> kink_breaks(double a, double b) {
    std::vector<double> br{a};
    if (a < 1.0 && b > 1.0) br.push_back(1.0);
    br.push_back(b);
    return br;
  }
  // Decade breakpoints keep steep power-law pieces within reach of the
  // extrapolating rule.
  static std::vector<double> breaks(double a, double b) {
    std::vector<double> br{a};
    double d = std::max(a * 10.0, b * 1e-12);
    if (a < b * 1e-13) br.push_back(b * 1e-12);
    for (; d < b * (1.0 - 1e-12); d *= 10.0) br.push_back(d);
    if (a < 1.0 && b > 1.0) br.push_back(1.0);
    br.push_back(b);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());
    return br;
  }
};

}  // namespace

double JumpMeasure::q(double xi) const {
  xi = std::abs(xi);
  if (xi == 0.0) return 0.0;
  if (const auto* s = std::get_if<Stable>(&spec_); s && !weighted())
    return s->scale * std::pow(xi, s->alpha);
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    double acc = 0.0;
    for (auto [u, m] : a->pairs) acc += 2.0 * m * weight_at(u) * sin2half(xi * u);
    return acc;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_))
    return dyadic_sum(
        *d, weight_, [&](double u) { return sin2half(xi * u); }, xi, 2.0);

  DensityOps ops{[this](double u) { return dens_u(u); }, 0.0, nullptr};
  ops.cutoff = std::get_if<Density>(&spec_) ? std::get<Density>(spec_).cutoff : 1e3;
  if (!weighted())
    if (const auto* d = std::get_if<Density>(&spec_)) ops.tail_closed = d->tail_mass;
  const double a = 1.0 / xi;
  const double upper_lim = std::max(ops.cutoff, 10.0 * a);
  double near = ops.lower([xi](double u) { return sin2half(xi * u); }, a);
  double mid = 0.0;
  if (upper_lim > a) {
    double mass = quad::qags_pieces(ops.dens, DensityOps::breaks(a, upper_lim),
                                    0.0, kRel).value;
    double osc =
        quad::qawo_cos(ops.dens, a, upper_lim, xi, 0.0, kRel).value;
    mid = mass - osc;
  }
  double far_mass = ops.tail_closed ? ops.tail_closed(upper_lim)
                                    : quad::qagiu(ops.dens, upper_lim, 0.0, kRel).value;
  double scale = std::max(std::abs(near + mid), 1e-300);
  double far_osc = quad::qawf_cos(ops.dens, upper_lim, xi, 1e-3 * kRel * scale).value;
  return 2.0 * (near + mid + far_mass - far_osc);
}

double JumpMeasure::qU(double xi) const {
  xi = std::abs(xi);
  if (xi == 0.0) return 0.0;
  if (const auto* s = std::get_if<Stable>(&spec_); s && !weighted()) {
    double c = s->scale * stable_density_constant(s->alpha);
    return 2.0 * c * std::pow(xi, s->alpha) * 2.0 / (s->alpha * (2.0 - s->alpha));
  }
  auto g = [xi](double u) {
    double v = xi * u;
    return std::min(1.0, v * v);
  };
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    double acc = 0.0;
    for (auto [u, m] : a->pairs) acc += 2.0 * m * weight_at(u) * g(u);
    return acc;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_))
    return dyadic_sum(*d, weight_, g, xi, 1.0);
  return qL(xi) + tail(1.0 / xi);
}

double JumpMeasure::qL(double xi) const {
  xi = std::abs(xi);
  if (xi == 0.0) return 0.0;
  if (const auto* s = std::get_if<Stable>(&spec_); s && !weighted()) {
    double c = s->scale * stable_density_constant(s->alpha);
    return 2.0 * c * std::pow(xi, s->alpha) / (2.0 - s->alpha);
  }
  auto g = [xi](double u) {
    double v = xi * u;
    return v <= 1.0 ? v * v : 0.0;
  };
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    double acc = 0.0;
    for (auto [u, m] : a->pairs) acc += 2.0 * m * weight_at(u) * g(u);
    return acc;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_))
    return dyadic_sum(*d, weight_, g, xi, 1.0);
  return xi * xi * second_moment(1.0 / xi);
}

double JumpMeasure::tail(double v) const {
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  if (const auto* s = std::get_if<Stable>(&spec_); s && !weighted()) {
    double c = s->scale * stable_density_constant(s->alpha);
    return 2.0 * c * std::pow(v, -s->alpha) / s->alpha;
  }
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    double acc = 0.0;
    for (auto [u, m] : a->pairs)
      if (u > v) acc += 2.0 * m * weight_at(u);
    return acc;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_))
    return dyadic_sum(
        *d, weight_, [v](double u) { return u > v ? 1.0 : 0.0; }, 1.0 / v, 1.0);
  DensityOps ops{[this](double u) { return dens_u(u); }, 1e3, nullptr};
  if (const auto* d = std::get_if<Density>(&spec_)) {
    ops.cutoff = d->cutoff;
    if (!weighted()) ops.tail_closed = d->tail_mass;
  }
  return 2.0 * ops.upper(v);
}

double JumpMeasure::second_moment(double v) const {
  if (v <= 0.0) return 0.0;
  if (const auto* s = std::get_if<Stable>(&spec_); s && !weighted()) {
    double c = s->scale * stable_density_constant(s->alpha);
    return 2.0 * c * std::pow(v, 2.0 - s->alpha) / (2.0 - s->alpha);
  }
  return abs_moment(2.0, v);
}

double JumpMeasure::abs_moment(double p, double v) const {
  if (v <= 0.0) return 0.0;
  auto g = [p, v](double u) { return u <= v ? std::pow(u, p) : 0.0; };
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    double acc = 0.0;
    for (auto [u, m] : a->pairs) acc += 2.0 * m * weight_at(u) * g(u);
    return acc;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_)) {
    // Terms scale like 2^{k(theta - p upsilon)} for small atoms.
    if (p * d->upsilon <= d->theta) return std::numeric_limits<double>::infinity();
    if (p >= 2.0) return dyadic_sum(*d, weight_, g, 1.0 / v, std::pow(v, p));
    double acc = 0.0;
    const long kmin = static_cast<long>(std::ceil(-std::log2(v) / d->upsilon));
    const double ratio = std::exp2(d->theta - p * d->upsilon);
    for (long k = kmin;; ++k) {
      double u = std::exp2(-k * d->upsilon);
      double term = 2.0 * std::exp2(k * d->theta) * weight_at(u) * std::pow(u, p);
      acc += term;
      if (term * ratio / (1.0 - ratio) <= kSumRel * acc || term < 1e-300) break;
    }
    return acc;
  }
  DensityOps ops{[this](double u) { return dens_u(u); }, 1e3, nullptr};
  try {
    return 2.0 * ops.lower([p](double u) { return std::pow(u, p); }, v);
  } catch (const quad::QuadratureError&) {
    return std::numeric_limits<double>::infinity();
  }
}

double JumpMeasure::integrate(const std::function<double(double)>& f, double lo,
                              double hi) const {
  if (!(hi > lo)) return 0.0;
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    double acc = 0.0;
    for (auto [u, m] : a->pairs)
      if (u > lo && u <= hi) acc += 2.0 * m * weight_at(u) * f(u);
    return acc;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_)) {
    if (lo > 0.0) {
      double acc = 0.0;
      for (auto [u, m] : atoms(lo, hi)) acc += 2.0 * m * f(u);
      return acc;
    }
    // Down to the origin: walk atoms from the top until the terms are
    // negligible against the running sum several times in a row.
    long k = std::isinf(hi) ? static_cast<long>(-996.0 / d->upsilon) : static_cast<long>(std::floor(-std::log2(hi) / d->upsilon)) - 1;
    double acc = 0.0;
    int quiet = 0;
    for (;; ++k) {
      const double u = std::exp2(-k * d->upsilon);
      if (u > hi) continue;
      if (u < 1e-290) break;
      const double term = 2.0 * std::exp2(k * d->theta) * weight_at(u) * f(u);
      acc += term;
      quiet = (std::abs(term) <= 1e-16 * std::abs(acc)) ? quiet + 1 : 0;
      if (quiet >= 8 || (acc == 0.0 && u < 1e-30 * hi)) break;
    }
    return acc;
  }
  auto g = [&](double u) { return f(u) * dens_u(u); };
  double acc = 0.0;
  if (std::isinf(hi)) {
    double mid = std::max(lo, 1.0);
    if (mid > lo) acc += quad::qags(g, lo, mid, 0.0, kRel).value;
    acc += quad::qagiu(g, mid, 0.0, kRel).value;
  } else {
    acc = quad::qags_pieces(g, DensityOps::kink_breaks(lo, hi), 0.0, kRel).value;
  }
  return 2.0 * acc;
}

std::vector<std::pair<double, double>> JumpMeasure::atoms(double lo,
                                                          double hi) const {
  std::vector<std::pair<double, double>> out;
  if (const auto* a = std::get_if<Atoms>(&spec_)) {
    for (auto [u, m] : a->pairs)
      if (u > lo && u <= hi) out.emplace_back(u, m * weight_at(u));
    return out;
  }
  if (const auto* d = std::get_if<DyadicDiscrete>(&spec_)) {
    // u_k in (lo, hi]  <=>  k in [-log2(hi)/ups, -log2(lo)/ups)
    const double kmax_real = lo > 0.0 ? -std::log2(lo) / d->upsilon : 1e9;
    long kmax = static_cast<long>(std::ceil(kmax_real)) + 1;
    long kmin = std::isinf(hi) ? std::numeric_limits<long>::min()
                               : static_cast<long>(std::floor(-std::log2(hi) /
                                                              d->upsilon)) - 1;
    double total = 0.0;
    for (long k = kmax; k >= kmin; --k) {
      double u = std::exp2(-k * d->upsilon);
      if (u <= lo || u > hi) continue;
      double m = std::exp2(k * d->theta) * weight_at(u);
      out.emplace_back(u, m);
      total += m;
      if (std::isinf(hi) && m < 1e-16 * total) break;
    }
    return out;
  }
  return out;
}

void JumpMeasure::validate() const {
  std::visit(
      overloaded{
          [](const Stable& s) {
            if (!(s.alpha > 0.0 && s.alpha < 2.0))
              throw std::invalid_argument("stable alpha must lie in (0, 2)");
            if (!(s.scale > 0.0))
              throw std::invalid_argument("stable scale must be positive");
          },
          [](const Density& d) {
            if (!d.pi) throw std::invalid_argument("density function missing");
            if (!(d.cutoff > 0.0))
              throw std::invalid_argument("density cutoff must be positive");
          },
          [](const Atoms& a) {
            if (a.pairs.empty()) throw std::invalid_argument("no atoms given");
            for (auto [u, m] : a.pairs)
              if (!(u > 0.0 && m > 0.0))
                throw std::invalid_argument("atoms need u > 0 and mass > 0");
          },
          [](const DyadicDiscrete& d) {
            if (!(d.upsilon > 0.0 && d.theta > 0.0 && d.theta < 2.0 * d.upsilon))
              throw std::invalid_argument("dyadic measure needs 0 < theta < 2 upsilon");
          }},
      spec_);
  double mass = qU(1.0);  // int (u^2 ^ 1) mu(du)
  if (!std::isfinite(mass))
    throw std::invalid_argument("measure fails the Levy integrability test");
}

}  // namespace lvp
