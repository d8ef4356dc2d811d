#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lvp/exponent.hpp"
#include "lvp/freekernel.hpp"
#include "lvp/measure.hpp"
#include "lvp/operator.hpp"
#include "lvp/quad.hpp"

namespace lvp {

struct SeriesParams {
  double delta_hint = 0.0;  // 0: eps / (2 sigma_hat)
  double tol = 1e-8;
  int k_max = 8;
};

/// Which point carries the perturbation coefficient in the parametrix kernel:
/// the running point x, or the target point y.
enum class Freeze { x, target };

/// Periodic computational domain: n grid points on a circle of length period.
struct DomainSpec {
  double period = 0.0;
  int n = 0;
};

struct ModelSpec {
  JumpMeasure base;
  PerturbationSpec pert;
  ScalingTable scaling;
  SeriesParams series;
  Freeze freeze = Freeze::x;
  DomainSpec domain;
  A1Report a1;
  PerturbationReport pert_report;

  [[nodiscard]] double delta() const;
  /// Kernel (1 + m(x, u)) mu(du) measure pieces: base first, then one
  /// reweighted measure per perturbation term.
  [[nodiscard]] std::vector<JumpMeasure> term_measures() const;
};

/// Runs A1, A2/A3 and the scaling fit; throws std::invalid_argument when a
/// condition fails.
[[nodiscard]] ModelSpec make_model(JumpMeasure base, PerturbationSpec pert,
                                   DomainSpec domain, SeriesParams series = {},
                                   Freeze freeze = Freeze::x);

struct SeriesDiagnostics {
  double t = 0.0;
  std::vector<double> norms;      // sup_x int |Phi^{*k}_t(x, y)| dy, k = 1..
  std::vector<double> sup_values; // max |Phi^{*k}_t(x, y)|
  std::vector<double> ratios;     // norms[k] / norms[k-1]
  int truncation_index = 0;
  double truncation_bound = 0.0;
  bool converged = false;
};

class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, SeriesDiagnostics diag)
      : std::runtime_error(what), diag_(std::move(diag)) {}
  [[nodiscard]] const SeriesDiagnostics& diagnostics() const { return diag_; }

 private:
  SeriesDiagnostics diag_;
};

struct SolverOptions {
  int time_nodes = 48;        // master table nodes s_m = T (m / M)^2
  int quad_nodes = 16;        // starting Gauss-Jacobi size
  int max_quad_nodes = 256;
  double quad_tol = 1e-7;     // relative change accepted when doubling nodes
  std::vector<double> diag_times;  // extra times with per-term diagnostics
};

/// Parametrix series on the periodic domain. The kernels Phi^{*k} are kept as
/// Fourier blocks on a master time table covering [0, horizon]; Phi itself is
/// evaluated exactly.
class ParametrixSolver {
 public:
  ParametrixSolver(ModelSpec model, double horizon, SolverOptions opts = {});

  [[nodiscard]] const ModelSpec& model() const { return model_; }
  [[nodiscard]] const BlockLayout& layout() const { return layout_; }
  [[nodiscard]] double horizon() const { return T_; }
  [[nodiscard]] UniformGrid grid() const;

  [[nodiscard]] BlockKernel free_block(double t) const;
  [[nodiscard]] BlockKernel phi_block(double s) const;
  [[nodiscard]] BlockKernel psi_block(double s) const;
  /// int_0^t P0_{t-s} Psi_s ds
  [[nodiscard]] BlockKernel correction_block(double t, int nodes = 0) const;
  /// Gauss-Jacobi size the adaptive correction settles on at t.
  [[nodiscard]] int correction_nodes(double t) const;
  [[nodiscard]] BlockKernel p_block(double t) const;
  /// Generator -Q + V of the full operator in block form.
  [[nodiscard]] const BlockKernel& generator() const { return generator_; }

  [[nodiscard]] KernelGrid p0(double t) const;
  [[nodiscard]] KernelGrid phi(double t) const;
  [[nodiscard]] KernelGrid psi(double t) const;
  [[nodiscard]] KernelGrid p(double t) const;
  [[nodiscard]] KernelGrid p_eps(double t, double eps) const;

  [[nodiscard]] const SeriesDiagnostics& diagnostics() const { return horizon_diag_; }
  [[nodiscard]] const SeriesDiagnostics& diagnostics_at(double t) const;
  [[nodiscard]] int terms() const { return terms_; }

  /// e^{-tau q} per FFT index.
  [[nodiscard]] Eigen::VectorXd decay(double tau) const;
  /// Torus kernel p0_t at the lattice differences (j - n/2) step.
  [[nodiscard]] std::vector<double> free_profile(double t) const;

 private:
  [[nodiscard]] const quad::Rule& rule(int n) const;
  [[nodiscard]] BlockKernel next_term(double s, int nodes,
                                      const std::vector<BlockKernel>* table) const;
  [[nodiscard]] BlockKernel divided_difference(const BlockKernel& A, double s) const;
  [[nodiscard]] std::map<int, Eigen::VectorXd> grouped_weights(
      double s, int nodes, bool reversed, const Eigen::VectorXd* factor) const;
  [[nodiscard]] BlockKernel interpolate(const std::vector<BlockKernel>& table,
                                        double s) const;
  void measure_term(SeriesDiagnostics& diag, const BlockKernel& term) const;
  KernelGrid to_grid(const BlockKernel& b, double t, Provenance prov) const;

  ModelSpec model_;
  SolverOptions opts_;
  BlockLayout layout_;
  double T_ = 0.0;
  double delta_ = 0.5;
  Eigen::VectorXd q_;                    // base exponent per FFT index
  std::vector<Eigen::VectorXd> qterm_;   // -q_{nu_l} per FFT index
  std::vector<BlockKernel> amul_;        // multiplication by a_l
  BlockKernel V_;                        // sum_l D_{a_l} C_{nu_l}
  BlockKernel generator_;
  std::vector<double> s_nodes_;
  std::vector<int> node_quad_;
  std::vector<BlockKernel> tail_;        // sum_{k >= 2} Phi^{*k} at s_nodes_
  SeriesDiagnostics horizon_diag_;
  std::map<double, SeriesDiagnostics> time_diag_;
  int terms_ = 1;
  mutable std::map<int, quad::Rule> rules_;
};

/// A function with its second derivative; periodic when period > 0.
struct SmoothFunction {
  std::function<double(double)> f;
  std::function<double(double)> d2;
  double period = 0.0;
};

/// int (g(x + u) - g(x)) nu(du), split at |u| = split into a Taylor-compensated
/// inner part and a plain outer part.
[[nodiscard]] double levy_action(const JumpMeasure& nu, const SmoothFunction& g,
                                 double x, double split);

/// Phi_t(x, y) by pointwise quadrature on a free-kernel table.
[[nodiscard]] double eval_Phi(const ModelSpec& model, const FreeKernelTable& table,
                              double x, double y);

/// Phi_t on the solver grid from the spectral representation.
[[nodiscard]] KernelGrid phi_grid(const ParametrixSolver& solver, double t);

struct BlowupFit {
  std::vector<double> t;
  std::vector<double> norms;
  double exponent = 0.0;  // fitted slope of log norm against log t
  double eta_hat = 0.0;   // 1 + exponent
};
[[nodiscard]] BlowupFit phi_blowup(const ParametrixSolver& solver,
                                   const std::vector<double>& t_nodes);

using KernelFamily = std::function<KernelGrid(double)>;

struct QuadratureSpec {
  int nodes = 16;
  double delta = 0.5;
  double tol = 1e-8;
  int max_nodes = 256;
};

/// (A * B)_t(x, y) = int_0^t int A_{t-s}(x, z) B_s(z, y) dz ds.
[[nodiscard]] KernelGrid convolve_timespace(const KernelFamily& A, const KernelFamily& B,
                                            double t, const QuadratureSpec& quad);

struct PsiResult {
  KernelGrid psi;
  SeriesDiagnostics diag;
};
[[nodiscard]] PsiResult psi_series(const ParametrixSolver& solver, double t);
[[nodiscard]] KernelGrid assemble_p(const ParametrixSolver& solver, double t);
[[nodiscard]] KernelGrid approx_kernel_p_eps(const ParametrixSolver& solver, double t,
                                             double eps);
/// sup_x |int q_{t,eps}(x, y) f(y) dy| with q = (L - d/dt) p_{t,eps}.
[[nodiscard]] double residual_q_eps(const ParametrixSolver& solver, double t, double eps,
                                    const std::function<double(double)>& f);

}  // namespace lvp
