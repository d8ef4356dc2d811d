#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lvp/exponent.hpp"
#include "lvp/freekernel.hpp"
#include "lvp/parametrix.hpp"

namespace lvp {

enum class Verdict { pass, fail, inconclusive, unstable };
[[nodiscard]] std::string verdict_name(Verdict v);

struct ValidationReport {
  std::string check;
  Verdict verdict = Verdict::inconclusive;
  std::vector<double> t_nodes;
  int grid_points = 0;
  std::map<std::string, double> constants;
  double residual = 0.0;
  double tolerance = 0.0;
  std::optional<std::pair<double, double>> witness;
  std::string note;

  [[nodiscard]] bool pass() const { return verdict == Verdict::pass; }
};

/// Row masses of every kernel equal 1 within tol. On the line, mass beyond
/// the grid edges is estimated by the first-jump term t mu{|u| > d}; the
/// verdict is inconclusive when that estimate exceeds 1e-4.
[[nodiscard]] ValidationReport check_conservation(const std::vector<KernelGrid>& family,
                                                  double tol = 1e-3,
                                                  const JumpMeasure* mu = nullptr);

[[nodiscard]] ValidationReport check_nonnegativity(const std::vector<KernelGrid>& family,
                                                   double rel_tol = 1e-6);

/// max |int p_s(x, z) p_{t-s}(z, y) dz - p_t(x, y)| / max p_t.
[[nodiscard]] ValidationReport check_chapman_kolmogorov(const KernelGrid& ps,
                                                        const KernelGrid& pts,
                                                        const KernelGrid& pt,
                                                        double tol = 2e-2);

/// p_t(x, x) / rho_t over x and t. Pass iff the lower constant is positive
/// and both constants move by less than `drift` across the nodes.
[[nodiscard]] ValidationReport check_on_diagonal(const std::vector<KernelGrid>& family,
                                                 const std::vector<double>& rho,
                                                 double drift = 2.0);

/// Largest d3 with p_t(x, y) >= rho_t d3 (1 - d4 |x - y| rho_t)_+ for all
/// nodes, maximized over a ladder of d4 values.
[[nodiscard]] ValidationReport check_lower_bound(const std::vector<KernelGrid>& family,
                                                 const std::vector<double>& rho);

enum class ExampleBound { stable, dyadic };

/// Explicit upper bound
///   t^{-1/a} (1 + [(t^{1/a}/d)^e + t^{eps/a} (t^{1/a}/d)^{e - eps}] 1{d >= t^{1/a}})
/// with e = 1 + a for the stable example and e = a for the dyadic one.
[[nodiscard]] double example_rhs(ExampleBound kind, double alpha, double eps, double t,
                                 double distance);

/// Fits C = sup p / rhs per t node; pass iff finite with drift below `drift`.
[[nodiscard]] ValidationReport check_example_bounds(const std::vector<KernelGrid>& family,
                                                    ExampleBound kind, double alpha,
                                                    double eps, double drift = 3.0);

/// T_t f on the row grid by row quadrature.
[[nodiscard]] std::vector<double> apply_semigroup(const KernelGrid& p,
                                                  const std::function<double(double)>& f);

/// L f(x) = int (f(x + u) - f(x)) (1 + m(x, u)) mu(du) on the given nodes.
[[nodiscard]] std::vector<double> generator_action(const ModelSpec& model,
                                                   const SmoothFunction& f,
                                                   const std::vector<double>& x);

/// max_x |T_t f - f - int_0^t T_s L f ds| against tol (1 + sup |L f|); the
/// time integral uses Gauss-Legendre nodes with kernels from `family`.
[[nodiscard]] ValidationReport check_generator_identity(const ModelSpec& model,
                                                        const KernelFamily& family,
                                                        const SmoothFunction& f, double t,
                                                        double tol = 2e-2,
                                                        int time_nodes = 8);

struct ConvolutionLemmaSpec {
  std::vector<double> t_nodes{0.1, 0.25, 0.5};
  std::vector<double> thetas{0.5, 0.9};
  std::vector<double> s_fractions{0.25, 0.5, 0.75};
  double c = 1.0;       // decay constant of g_t
  double delta = 0.25;  // time weight of the rescaled kernel
  std::function<double(double)> h = [](double x) { return x <= 1.0 ? 1.0 : 1.0 / (x * x); };
  double eps = 0.5;
  double x_max_scaled = 20.0;  // |x| rho_t range probed
  int points = 41;
  double drift = 2.0;
};

/// Fits the constants of
///   (i)  (t-s)^d s^d (g_{t-s} * g_s)(x) <= C t^{2d} g_{t,theta}(x)
///   (ii) (h_{t-s,eps} * h_{s,eps})(x)   <= C h_{t,eps}(x),  |x| rho_t >= 1
/// per t node and checks their drift.
[[nodiscard]] ValidationReport check_convolution_lemma(const JumpMeasure& mu,
                                                       const ScalingTable& scaling,
                                                       const ConvolutionLemmaSpec& spec = {});

/// sup |Phi_t(x, y)| / (t^{-1+eta} (g_t * G_t)(y - x)) per t node with G_t
/// from the compound measures; pass iff finite with drift below `drift`.
[[nodiscard]] ValidationReport check_compound_bound(const std::vector<KernelGrid>& phi_family,
                                                    const JumpMeasure& mu, double eta,
                                                    double eps, double c = 1.0,
                                                    double drift = 3.0);

}  // namespace lvp
