#pragma once

#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace lvp {

/// Symmetric stable measure with exponent q(xi) = scale * |xi|^alpha.
struct Stable {
  double alpha = 1.0;
  double scale = 1.0;
};

/// Absolutely continuous measure pi(u) du, pi even. Only u > 0 is evaluated.
struct Density {
  std::function<double(double)> pi;
  // Adaptive quadrature runs on (0, cutoff]; beyond it the tail is taken from
  // `tail_mass` when given, otherwise from a semi-infinite rule.
  double cutoff = 1e3;
  std::function<double(double)> tail_mass;  // v -> int_v^inf pi(u) du
  std::string label = "density";
};

/// Finite atomic measure: each (u, m) places mass m at u and at -u.
struct Atoms {
  std::vector<std::pair<double, double>> pairs;
};

/// sum_{k in Z} 2^{k theta} (delta_{2^{-k upsilon}} + delta_{-2^{-k upsilon}}).
struct DyadicDiscrete {
  double theta = 1.0;
  double upsilon = 1.0;
};

using LevyMeasureSpec = std::variant<Stable, Density, Atoms, DyadicDiscrete>;

[[nodiscard]] std::string kind_name(const LevyMeasureSpec& spec);

/// Even weight u -> w(u) >= 0 multiplying a measure; `sup` bounds it.
struct Weight {
  std::function<double(double)> w;
  double sup = 1.0;
  std::string label;
};

/// 1 ^ |u|^eps, the envelope shape of the perturbation kernel.
[[nodiscard]] Weight cap_power(double eps, double amplitude = 1.0);

/// Evaluation interface over a LevyMeasureSpec, optionally reweighted.
/// All integrals are over the whole line; symmetry is used internally.
class JumpMeasure {
 public:
  explicit JumpMeasure(LevyMeasureSpec spec);
  JumpMeasure(LevyMeasureSpec spec, Weight weight);

  [[nodiscard]] const LevyMeasureSpec& spec() const { return spec_; }
  [[nodiscard]] bool weighted() const { return static_cast<bool>(weight_.w); }
  [[nodiscard]] JumpMeasure reweighted(Weight weight) const;

  [[nodiscard]] double q(double xi) const;
  [[nodiscard]] double qU(double xi) const;
  [[nodiscard]] double qL(double xi) const;

  /// mu{|u| > v}
  [[nodiscard]] double tail(double v) const;
  /// int_{|u| <= v} u^2 mu(du)
  [[nodiscard]] double second_moment(double v) const;
  /// int_{|u| <= v} |u|^p mu(du); may be +inf.
  [[nodiscard]] double abs_moment(double p, double v) const;
  /// int_{lo < |u| <= hi} f(|u|) mu(du) for bounded f.
  [[nodiscard]] double integrate(const std::function<double(double)>& f,
                                 double lo, double hi) const;

  [[nodiscard]] bool has_density() const;
  /// Density at u (weighted); only for density-type measures.
  [[nodiscard]] double density(double u) const;
  /// Positive atoms (u, mass) with lo < u <= hi; mass is per side.
  [[nodiscard]] std::vector<std::pair<double, double>> atoms(double lo,
                                                             double hi) const;
  [[nodiscard]] bool is_atomic() const;

  /// Throws std::invalid_argument if int (1 ^ u^2) mu(du) is not finite or
  /// the parameters are out of range.
  void validate() const;

 private:
  [[nodiscard]] double weight_at(double u) const {
    return weight_.w ? weight_.w(u) : 1.0;
  }
  [[nodiscard]] double dens_u(double u) const;  // density on u > 0

  LevyMeasureSpec spec_;
  Weight weight_;
};

/// Stable density constant: pi(u) = scale * C(alpha) |u|^{-1-alpha}.
[[nodiscard]] double stable_density_constant(double alpha);

/// Standard Cauchy jump measure, pi(u) = 1 / (pi u^2), as a density variant.
[[nodiscard]] Density cauchy_density();

}  // namespace lvp
