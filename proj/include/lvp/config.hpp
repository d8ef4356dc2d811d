#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvp/measure.hpp"
#include "lvp/parametrix.hpp"
#include "lvp/validate.hpp"

namespace lvp {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Pipeline stages in dependency order.
inline const std::vector<std::string>& stage_chain() {
  static const std::vector<std::string> chain{"exponent", "kernel", "parametrix", "validate",
                                              "simulate"};
  return chain;
}

struct Tolerances {
  double mass = 1e-3;
  double composed = 2e-2;
  double series = 1e-8;
  double ks = 0.02;
  double ks_euler = 0.03;
};

/// A complete run description. Measure and perturbation are kept in their
/// kind-tagged structured form so the effective configuration round-trips.
struct RunConfig {
  std::string name = "custom";
  nlohmann::json measure;       // {"kind": "stable" | "dyadic" | "atoms" | ...}
  nlohmann::json perturbation;  // {"terms": [...], "envelope_c", "envelope_eps"}
  DomainSpec domain{18.84955592153876, 960};
  SeriesParams series;
  Freeze freeze = Freeze::x;
  std::vector<double> t{0.25};
  std::vector<std::string> stages = stage_chain();
  std::string out_dir = "lvp-out";
  bool exact = false;
  int kernel_stride = 4;  // every n-th grid point in exported kernel CSV
  std::uint64_t seed = 1;
  long n_paths = 100000;
  std::optional<ExampleBound> example_bound;
  bool oscillatory = false;
  Tolerances tol;
  std::vector<std::string> artifact_choices;

  [[nodiscard]] JumpMeasure build_measure() const;
  [[nodiscard]] PerturbationSpec build_perturbation() const;
  [[nodiscard]] ModelSpec build_model() const;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static RunConfig from_json(const nlohmann::json& j);
  [[nodiscard]] static RunConfig from_file(const std::string& path);

  /// Stages up to and including the latest requested one, in chain order.
  [[nodiscard]] std::vector<std::string> resolved_stages() const;
  [[nodiscard]] bool runs(const std::string& stage) const;
  /// Stable hash of everything that determines the kernels.
  [[nodiscard]] std::string kernel_hash() const;
};

[[nodiscard]] std::vector<std::string> preset_names();
/// exa1, exa2, exa3 or appendixB; throws ConfigError otherwise.
[[nodiscard]] RunConfig preset(const std::string& name);

/// Jump density of the oscillating-index example: |u|^{-1-a(ln(1/|u|))} for
/// |u| <= 1 and u^{-2} beyond, a(v) = center + amplitude sin(frequency sqrt(ln(1+v))).
[[nodiscard]] Density oscillating_index_density(double center = 1.0, double amplitude = 0.4,
                                                double frequency = 4.0);
[[nodiscard]] double oscillating_index(double v, double center = 1.0, double amplitude = 0.4,
                                       double frequency = 4.0);

}  // namespace lvp
