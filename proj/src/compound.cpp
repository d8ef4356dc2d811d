#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lvp/freekernel.hpp"
#include "lvp/spectral.hpp"

namespace lvp {

double CompoundMeasure::atom_mass() const {
  double acc = 0.0;
  for (const auto& [at, m] : atoms) acc += m;
  return acc;
}

double CompoundMeasure::density_mass() const {
  double acc = 0.0;
  for (double d : density) acc += d;
  return acc * grid.step;
}

void CompoundMeasure::add_atom(double at, double mass) {
  if (mass == 0.0) return;
  const double tol = 0.5 * grid.step;
  auto it = atoms.lower_bound(at - tol);
  if (it != atoms.end() && it->first <= at + tol) {
    it->second += mass;
    return;
  }
  atoms.emplace(at, mass);
}

void CompoundMeasure::scale(double factor) {
  for (auto& [at, m] : atoms) m *= factor;
  for (double& d : density) d *= factor;
  escaped_mass *= factor;
}

void CompoundMeasure::add(const CompoundMeasure& other, double factor) {
  if (other.grid.size != grid.size || other.grid.step != grid.step)
    throw std::invalid_argument("compound measures live on different grids");
  for (const auto& [at, m] : other.atoms) add_atom(at, factor * m);
  for (size_t i = 0; i < density.size(); ++i) density[i] += factor * other.density[i];
  escaped_mass += factor * other.escaped_mass;
}

CompoundMeasure CompoundMeasure::weighted(const std::function<double(double)>& w) const {
  CompoundMeasure out = *this;
  for (auto& [at, m] : out.atoms) m *= w(at);
  for (int i = 0; i < grid.size; ++i) out.density[static_cast<size_t>(i)] *= w(grid.at(i));
  return out;
}

double CompoundMeasure::smooth(const std::function<double(double)>& f, double x) const {
  double acc = 0.0;
  for (const auto& [at, m] : atoms) acc += m * f(x - at);
  double dens = 0.0;
  for (int i = 0; i < grid.size; ++i) {
    const double d = density[static_cast<size_t>(i)];
    if (d != 0.0) dens += d * f(x - grid.at(i));
  }
  return acc + dens * grid.step;
}

CompoundMeasure CompoundMeasure::empty_like(const UniformGrid& grid) {
  CompoundMeasure out;
  out.grid = grid;
  out.density.assign(static_cast<size_t>(grid.size), 0.0);
  return out;
}

CompoundMeasure convolve(const CompoundMeasure& a, const CompoundMeasure& b) {
  if (a.grid.size != b.grid.size || a.grid.step != b.grid.step)
    throw std::invalid_argument("compound measures live on different grids");
  const UniformGrid& g = a.grid;
  const int n = g.size;
  if (n % 2 == 0) throw std::invalid_argument("compound grid must have an odd size");
  const double edge = g.back() + 0.5 * g.step;
  CompoundMeasure out = CompoundMeasure::empty_like(g);

  for (const auto& [x, mx] : a.atoms)
    for (const auto& [y, my] : b.atoms)
      if (std::abs(x + y) <= edge) out.add_atom(x + y, mx * my);

  // Atom times density: shift with linear interpolation.
  auto shift_into = [&](const CompoundMeasure& atoms_of, const CompoundMeasure& dens_of) {
    for (const auto& [x, m] : atoms_of.atoms) {
      const double s = x / g.step;
      const int whole = static_cast<int>(std::floor(s));
      const double frac = s - whole;
      for (int i = 0; i < n; ++i) {
        const double d = dens_of.density[static_cast<size_t>(i)];
        if (d == 0.0) continue;
        const int j0 = i + whole, j1 = j0 + 1;
        if (j0 >= 0 && j0 < n) out.density[static_cast<size_t>(j0)] += m * d * (1.0 - frac);
        if (j1 >= 0 && j1 < n) out.density[static_cast<size_t>(j1)] += m * d * frac;
      }
    }
  };
  shift_into(a, b);
  shift_into(b, a);

  const bool a_dens = std::any_of(a.density.begin(), a.density.end(), [](double d) { return d != 0.0; });
  const bool b_dens = std::any_of(b.density.begin(), b.density.end(), [](double d) { return d != 0.0; });
  if (a_dens && b_dens) {
    const long L = spectral::nice_size(2L * n);
    std::vector<spectral::cplx> fa(static_cast<size_t>(L)), fb(static_cast<size_t>(L));
    for (int i = 0; i < n; ++i) {
      fa[static_cast<size_t>(i)] = a.density[static_cast<size_t>(i)];
      fb[static_cast<size_t>(i)] = b.density[static_cast<size_t>(i)];
    }
    spectral::dft(fa, -1);
    spectral::dft(fb, -1);
    for (long k = 0; k < L; ++k) fa[static_cast<size_t>(k)] *= fb[static_cast<size_t>(k)];
    spectral::dft(fa, +1);
    const int offset = (n - 1) / 2;
    for (int k = 0; k < 2 * n - 1; ++k) {
      const int m = k - offset;
      if (m < 0 || m >= n) continue;
      out.density[static_cast<size_t>(m)] += fa[static_cast<size_t>(k)].real() / L * g.step;
    }
  }
  out.escaped_mass = a.mass_with_escaped() * b.mass_with_escaped() - out.total_mass();
  return out;
}

CompoundSet build_compound_measures(const JumpMeasure& mu, double t, double eps,
                                    CompoundGridSpec spec) {
  CompoundSet cs;
  cs.t = t;
  cs.eps = eps;
  cs.rho = scaling_rho(mu, t);
  const double rho = cs.rho;
  const double step = spec.step > 0.0 ? spec.step : 1.0 / (8.0 * rho);
  const double half_width = spec.half_width > 0.0 ? spec.half_width : std::max(40.0 / rho, 4.0);
  const int half = static_cast<int>(std::ceil(half_width / step));
  const UniformGrid grid{-half * step, step, 2 * half + 1};
  const double edge = grid.back() + 0.5 * step;
  const double v = 1.0 / rho;

  cs.lambda_total = t * mu.tail(v);
  CompoundMeasure lambda = CompoundMeasure::empty_like(grid);
  if (mu.has_density()) {
    for (int i = half; i < grid.size; ++i) {
      const double lo = std::max(grid.at(i) - 0.5 * step, v);
      const double hi = grid.at(i) + 0.5 * step;
      if (hi <= lo) continue;
      const double mass = t * (mu.tail(lo) - mu.tail(hi)) * 0.5;  // one side
      lambda.density[static_cast<size_t>(i)] += mass / step;
      lambda.density[static_cast<size_t>(2 * half - i)] += mass / step;
    }
  } else {
    for (const auto& [u, m] : mu.atoms(v, edge)) {
      lambda.add_atom(u, t * m);
      lambda.add_atom(-u, t * m);
    }
  }
  lambda.escaped_mass = cs.lambda_total - lambda.total_mass();

  // Poisson exponential with an adaptive number of convolution powers.
  const double L = cs.lambda_total;
  CompoundMeasure poisson = CompoundMeasure::empty_like(grid);
  poisson.add_atom(0.0, 1.0);
  CompoundMeasure power = poisson;
  double weight = 1.0, cumulative = std::exp(-L);
  int k = 0;
  while (1.0 - cumulative >= 1e-10 && k < 200) {
    ++k;
    power = convolve(power, lambda);
    weight /= k;
    poisson.add(power, weight);
    cumulative += std::exp(-L) * std::pow(L, k) * weight;
  }
  poisson.scale(std::exp(-L));
  cs.poisson_terms = k;
  cs.poisson_remainder = std::max(0.0, 1.0 - cumulative);
  poisson.escaped_mass += cs.poisson_remainder;

  CompoundMeasure chi = lambda.weighted([&](double u) {
    return std::pow(rho, eps) * std::min(std::pow(std::abs(u), eps), 1.0);
  });
  chi.escaped_mass = lambda.escaped_mass * std::pow(rho, eps);

  CompoundMeasure g = poisson;
  g.add(convolve(poisson, chi));
  cs.g_normalizer = 1.0 / g.mass_with_escaped();
  g.scale(cs.g_normalizer);

  CompoundMeasure script_p = poisson;
  script_p.add(convolve(poisson, lambda));

  cs.lambda = std::move(lambda);
  cs.poisson = std::move(poisson);
  cs.chi = std::move(chi);
  cs.g = std::move(g);
  cs.script_p = std::move(script_p);
  return cs;
}

}  // namespace lvp
