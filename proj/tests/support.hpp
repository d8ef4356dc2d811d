#pragma once

#include <cmath>
#include <numbers>
#include <string>

#include "lvp/parametrix.hpp"

namespace lvp::fixture {

inline constexpr double pi = std::numbers::pi;

/// Cauchy density on the line.
inline double cauchy_kernel(double t, double x) { return t / (pi * (t * t + x * x)); }

/// Cauchy density wrapped onto a circle of length P, summed in closed form.
inline double cauchy_torus(double t, double x, double P) {
  const double a = 2.0 * pi * t / P, b = 2.0 * pi * x / P;
  return std::sinh(a) / (P * (std::cosh(a) - std::cos(b)));
}

/// The shared example perturbation 0.5 (1 ^ |u|^0.5) (1 + sin^2 x) / 2.
inline PerturbationSpec example_perturbation() {
  PerturbationSpec p;
  p.terms.push_back({[](double x) { return 0.25 * (1.0 + std::sin(x) * std::sin(x)); },
                     cap_power(0.5), "sin2 x cap_power(0.5)"});
  p.envelope_c = 0.5;
  p.envelope_eps = 0.5;
  p.label = "example";
  return p;
}

/// x-independent variant of the example perturbation.
inline PerturbationSpec flat_perturbation(double level = 0.3) {
  PerturbationSpec p;
  p.terms.push_back({[level](double) { return level; }, cap_power(0.5), "flat"});
  p.envelope_c = level;
  p.envelope_eps = 0.5;
  p.label = "flat";
  return p;
}

inline DomainSpec torus(int n) { return DomainSpec{6.0 * pi, n}; }

}  // namespace lvp::fixture
