#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lvp/measure.hpp"

namespace lvp {

/// One separable piece a(x) * k(u) of the perturbation kernel.
struct PerturbationTerm {
  std::function<double(double)> a;  // position factor
  Weight k;                         // even jump factor
  std::string label;
};

/// m(x, u) = sum_l a_l(x) k_l(u) with the declared envelope
/// 0 <= m(x, u) <= envelope_c * (1 ^ |u|^envelope_eps).
struct PerturbationSpec {
  std::vector<PerturbationTerm> terms;
  double envelope_c = 0.0;
  double envelope_eps = 1.0;
  std::string label = "zero";

  [[nodiscard]] double m(double x, double u) const;
  [[nodiscard]] bool is_zero() const { return terms.empty(); }
};

[[nodiscard]] PerturbationSpec zero_perturbation();

/// rho_t with the indices attached.
struct ScalingTable {
  std::vector<double> t_nodes;
  std::vector<double> rho;
  double alpha = 0.0;
  double beta_hat = 0.0;
  double sigma_hat = 0.0;

  /// rho at t, solved on demand for t outside the tabulated nodes.
  [[nodiscard]] double rho_at(const JumpMeasure& mu, double t) const;
};

/// Decreasing tail function for the heavy-tail hypotheses.
struct TailFunctionSpec {
  enum class Kind { survival, density };
  std::function<double(double)> h;
  double eps = 0.5;
  Kind kind = Kind::survival;
  std::string label;
};

class ScalingUndefined : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves q^U(rho) t = 1 on the increasing branch to relative 1e-10.
[[nodiscard]] double scaling_rho(const JumpMeasure& mu, double t);

struct A1Report {
  double beta_hat = 0.0;
  double alpha_hat = 0.0;
  bool pass = false;
  double top_decade_variation = 0.0;
  std::optional<double> witness_xi;  // q^L = 0 < q^U here
  std::vector<double> xi;
  std::vector<double> ratio;
};

/// Probes q^U / q^L on a log grid; default 20 points per decade over [1, 1e6].
[[nodiscard]] A1Report check_A1(const JumpMeasure& mu, double xi_lo = 1.0,
                                double xi_hi = 1e6, int per_decade = 20);

/// Least-squares slope of log rho_t against -log t over the smallest decade of
/// the given nodes, inverted and clamped to [alpha_hat, 2].
[[nodiscard]] double estimate_sigma(const JumpMeasure& mu,
                                    const std::vector<double>& t_nodes,
                                    double alpha_hat);

[[nodiscard]] std::vector<double> default_sigma_nodes();

[[nodiscard]] ScalingTable make_scaling_table(const JumpMeasure& mu,
                                              std::vector<double> t_nodes);

struct SamplePlan {
  std::vector<double> x;
  std::vector<double> u;
  [[nodiscard]] static SamplePlan standard();
};

struct PerturbationReport {
  bool pass = false;
  bool symmetric = true;   // A2
  bool enveloped = true;   // A3
  std::optional<std::pair<double, double>> witness;  // (x, u)
  bool divergent_regime = false;  // int (|u|^eps ^ 1) mu(du) = inf
  double intensity = 0.0;  // that integral when finite
  std::string regime;      // "main" or "bounded"
};

[[nodiscard]] PerturbationReport check_perturbation(const PerturbationSpec& pert,
                                                    const JumpMeasure& mu,
                                                    const SamplePlan& plan);

struct TailReport {
  bool pass = false;
  double fitted_C = 0.0;
  bool dominated = false;
  bool long_tailed = false;
  bool monotone = false;  // x^{2 eps} h(x) decreasing
  bool hyp_a = false;     // h(cx) <= h(x) / c
  bool hyp_b = false;     // h(x) <= c h(2x)
  double hyp_b_constant = 0.0;
  std::string failure;
  std::optional<std::pair<double, double>> witness;
};

[[nodiscard]] TailReport check_tail_hypotheses(const JumpMeasure& mu,
                                               const TailFunctionSpec& tail,
                                               const ScalingTable& scaling);

struct SubexpReport {
  enum class Verdict { pass, fail, inconclusive };
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> x;
  std::vector<double> ratio;
};

[[nodiscard]] SubexpReport check_subexponential(const TailFunctionSpec& tail);

}  // namespace lvp
