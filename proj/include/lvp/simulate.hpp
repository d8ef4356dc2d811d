#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lvp/freekernel.hpp"
#include "lvp/measure.hpp"
#include "lvp/parametrix.hpp"

namespace lvp {

struct ExactScheme {};
/// Base path plus an independent jump stream accepted with probability
/// m(x, u) / (c (1 ^ |u|^eps)). Needs a finite envelope intensity.
struct ThinningScheme {};
/// Frozen-coefficient steps of length dt.
struct EulerChainScheme {
  double dt = 0.0;
};
using Scheme = std::variant<ExactScheme, ThinningScheme, EulerChainScheme>;

struct SimulationPlan {
  long n_paths = 100000;
  double t_end = 0.25;
  double x0 = 0.0;
  Scheme scheme = ExactScheme{};
  double small_jump_cutoff = 0.0;  // 0: 0.01 / rho_{t_end}
  std::uint64_t rng_seed = 1;
  double max_rate = 1e6;           // cap on the expected jump count per path

  void validate() const;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Path i draws from mt19937_64 seeded with seed_seq{seed, i}.
[[nodiscard]] std::mt19937_64 path_stream(std::uint64_t seed, long path);

/// Jumps of a symmetric measure above a cutoff as a compound Poisson stream,
/// with the variance of the smaller jumps for a Gaussian substitute.
class JumpSampler {
 public:
  JumpSampler() = default;
  JumpSampler(const JumpMeasure& nu, double cutoff);

  [[nodiscard]] double rate() const { return rate_; }
  [[nodiscard]] double small_variance() const { return variance_; }
  [[nodiscard]] double cutoff() const { return cutoff_; }
  /// One signed jump from the normalized measure restricted to |u| > cutoff.
  [[nodiscard]] double draw(std::mt19937_64& rng) const;
  /// Sum of the jumps over a period of length dt plus the Gaussian part;
  /// `intensity` scales the measure.
  [[nodiscard]] double increment(std::mt19937_64& rng, double dt,
                                 double intensity = 1.0) const;

 private:
  double cutoff_ = 0.0, rate_ = 0.0, variance_ = 0.0;
  std::vector<double> atom_u_, atom_cdf_;  // atomic measures
  std::vector<double> log_v_, log_tail_;   // density measures: log tail table
  double top_slope_ = -1.0;
};

/// Symmetric stable variate with E exp(i xi X) = exp(-|xi|^alpha).
[[nodiscard]] double stable_variate(double alpha, std::mt19937_64& rng);

[[nodiscard]] std::vector<double> sample_base(const JumpMeasure& mu, const SimulationPlan& plan);

struct ThinningStats {
  long proposals = 0;
  long accepted = 0;
  [[nodiscard]] double acceptance() const {
    return proposals ? static_cast<double>(accepted) / static_cast<double>(proposals) : 0.0;
  }
};

[[nodiscard]] std::vector<double> sample_perturbed(const ModelSpec& model,
                                                   const SimulationPlan& plan,
                                                   ThinningStats* stats = nullptr);

struct DensityComparison {
  double ks_distance = 0.0;
  double l1_distance = 0.0;
  double ks_radius = 0.0;  // 1.36 / sqrt(n)
  long samples = 0;
};

/// Empirical law against row x0 of the kernel. Periodic kernels compare the
/// samples wrapped onto the circle; on the line the mass outside the grid is
/// split evenly between the two sides.
[[nodiscard]] DensityComparison compare_density(const std::vector<double>& samples,
                                                const KernelGrid& p, double x0);

}  // namespace lvp
