#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lvp/exponent.hpp"
#include "lvp/measure.hpp"

namespace lvp {

/// x_i = start + i * step, i = 0..size-1.
struct UniformGrid {
  double start = 0.0;
  double step = 1.0;
  int size = 0;

  [[nodiscard]] double at(int i) const { return start + i * step; }
  [[nodiscard]] double back() const { return at(size - 1); }
  [[nodiscard]] std::vector<double> nodes() const;
  /// Symmetric grid with `size` nodes and spacing `step` centred on zero.
  [[nodiscard]] static UniformGrid centered(double step, int size);
};

enum class Provenance { p0, phi, phi_k, psi, p, p_eps };
[[nodiscard]] std::string provenance_name(Provenance p);

/// Kernel samples (t; x_i, y_j). On the torus the grids coincide and cover one
/// period; `period` is then positive.
struct KernelGrid {
  double t = 0.0;
  UniformGrid x, y;
  Eigen::MatrixXd values;
  Provenance provenance = Provenance::p0;
  double err_est = 0.0;
  double period = 0.0;
  std::string note;
  int clamped = 0;          // small negatives set to zero
  double min_value = 0.0;   // minimum before clamping
  bool negative_flag = false;

  [[nodiscard]] double half_width() const { return 0.5 * (x.back() - x.start); }
};

/// One-dimensional slice x -> k(t, x) of a translation-invariant kernel.
struct Slice1D {
  double t = 0.0;
  UniformGrid x;
  std::vector<double> value;
  double err_est = 0.0;
  std::string provenance;
};

struct InversionOptions {
  double period = 0.0;       // > 0: periodized kernel on a circle of this length
  double tol = 1e-10;        // target aliasing error relative to rho_t
  double budget = 6.7e7;     // cap on the number of retained frequencies
  bool assume_A1 = false;    // skip the A1 probe when the caller already ran it
};

class CutoffUnreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class A1Refused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p_t(x) on the grid by folded Fourier inversion of e^{-t q}.
[[nodiscard]] Slice1D fourier_invert_p0(const JumpMeasure& mu, double t,
                                        const UniformGrid& grid,
                                        const InversionOptions& opts = {});
/// d^k/dx^k p_t(x), k <= 3.
[[nodiscard]] Slice1D p0_derivative(const JumpMeasure& mu, double t, int k,
                                    const UniformGrid& grid,
                                    const InversionOptions& opts = {});
/// d/dt p_t(x).
[[nodiscard]] Slice1D p0_time_derivative(const JumpMeasure& mu, double t,
                                         const UniformGrid& grid,
                                         const InversionOptions& opts = {});

/// p_t with its first two derivatives on a fine grid, interpolated by cubic
/// Hermite pieces. Off-grid on the line the first-jump asymptote t pi(x) is
/// used for density measures and zero otherwise.
class FreeKernelTable {
 public:
  FreeKernelTable(const JumpMeasure& mu, double t, double half_width, double step,
                  double period = 0.0);

  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double d1(double x) const;
  [[nodiscard]] double d2(double x) const;
  [[nodiscard]] double t() const { return t_; }
  [[nodiscard]] double period() const { return period_; }
  [[nodiscard]] double reach() const { return reach_; }

 private:
  [[nodiscard]] double wrap(double x) const;
  [[nodiscard]] double hermite(const std::vector<double>& f,
                               const std::vector<double>& df, double x) const;

  const JumpMeasure* mu_;
  double t_, period_, reach_;
  UniformGrid grid_;
  std::vector<double> p_, p1_, p2_, p3_;
};

/// Upper f_up(x) = d1 e^{-d2 |x| log(1+|x|)}, lower d3 (1 - d4 |x|)_+, and the
/// scaled kernel g_{t,theta}(x) = rho e^{-theta c rho |x| log(1 + rho |x|)}.
struct BoundTemplate {
  struct Upper { double d1, d2; };
  struct Lower { double d3, d4; };
  struct Gt { double c, theta; };
  std::variant<Upper, Lower, Gt> kind;

  [[nodiscard]] double operator()(double x, double rho = 1.0) const;
  void validate() const;
};

/// Finite measure as merged atoms plus a density on a symmetric uniform grid.
/// Mass pushed beyond the grid by convolutions is kept in `escaped_mass`.
struct CompoundMeasure {
  std::map<double, double> atoms;
  UniformGrid grid;
  std::vector<double> density;
  double escaped_mass = 0.0;

  [[nodiscard]] double atom_mass() const;
  [[nodiscard]] double density_mass() const;
  [[nodiscard]] double total_mass() const { return atom_mass() + density_mass(); }
  [[nodiscard]] double mass_with_escaped() const { return total_mass() + escaped_mass; }

  void add_atom(double at, double mass);
  void scale(double factor);
  void add(const CompoundMeasure& other, double factor = 1.0);
  /// Pointwise multiplication by a bounded function of the location.
  [[nodiscard]] CompoundMeasure weighted(const std::function<double(double)>& w) const;
  /// (f * this)(x) = int f(x - z) this(dz).
  [[nodiscard]] double smooth(const std::function<double(double)>& f, double x) const;
  [[nodiscard]] static CompoundMeasure empty_like(const UniformGrid& grid);
};

/// Convolution of two measures on the same grid; atoms merge within step/2.
[[nodiscard]] CompoundMeasure convolve(const CompoundMeasure& a,
                                       const CompoundMeasure& b);

struct CompoundSet {
  double t = 0.0, rho = 0.0, eps = 0.0;
  CompoundMeasure lambda;    // t mu restricted to |rho u| > 1
  CompoundMeasure poisson;   // e^{-Lambda(R)} sum Lambda^{*k} / k!
  CompoundMeasure chi;       // rho^eps (|u|^eps ^ 1) Lambda
  CompoundMeasure g;         // normalized P + P * chi
  CompoundMeasure script_p;  // P + P * Lambda
  double lambda_total = 0.0; // Lambda(R) including mass off the grid
  int poisson_terms = 0;
  double poisson_remainder = 0.0;
  double g_normalizer = 0.0;
};

struct CompoundGridSpec {
  double step = 0.0;        // 0: 1 / (8 rho_t)
  double half_width = 0.0;  // 0: 40
};

[[nodiscard]] CompoundSet build_compound_measures(const JumpMeasure& mu, double t,
                                                  double eps,
                                                  CompoundGridSpec spec = {});

struct P0BoundReport {
  bool pass = false;
  std::vector<double> t_nodes;
  // Per derivative order k = 0..2: the decay constant shared across t and the
  // fitted amplitude per t node.
  std::array<double, 3> decay{};
  std::array<std::vector<double>, 3> amplitude;
  std::array<double, 3> amplitude_drift{};
  double d3 = 0.0, d4 = 0.0;
  std::vector<double> d3_per_t;
  double d3_drift = 0.0;
  std::string failure;
  std::optional<std::pair<double, double>> witness;  // (t, x)
};

/// Fits |d^k p_t(x)| <= rho^{k+1} A_k (f_up(rho .) * P_t)(x) for k = 0..2 and
/// p_t(x) >= rho d3 (1 - d4 |x| rho)_+; pass iff the constants move by at
/// most a factor 2 across the t nodes.
[[nodiscard]] P0BoundReport verify_p0_bounds(const JumpMeasure& mu,
                                             const std::vector<double>& t_nodes,
                                             double half_width_scaled = 8.0,
                                             int points = 161);

}  // namespace lvp
