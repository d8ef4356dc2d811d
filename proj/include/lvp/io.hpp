#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lvp/exponent.hpp"
#include "lvp/freekernel.hpp"
#include "lvp/parametrix.hpp"
#include "lvp/simulate.hpp"
#include "lvp/validate.hpp"

namespace lvp::io {

/// Shortest round-trip decimal, or C99 hex when exact.
[[nodiscard]] std::string format_double(double v, bool exact);

[[nodiscard]] nlohmann::json to_json(const ValidationReport& r);
[[nodiscard]] nlohmann::json to_json(const SeriesDiagnostics& d);
[[nodiscard]] nlohmann::json to_json(const A1Report& r);
[[nodiscard]] nlohmann::json to_json(const ScalingTable& s);
[[nodiscard]] nlohmann::json to_json(const PerturbationReport& r);
[[nodiscard]] nlohmann::json to_json(const BlowupFit& f);
[[nodiscard]] nlohmann::json to_json(const DensityComparison& c);
[[nodiscard]] nlohmann::json to_json(const P0BoundReport& r);
/// Grid metadata without the values.
[[nodiscard]] nlohmann::json describe(const KernelGrid& g);

void write_json(const std::string& path, const nlohmann::json& j);
/// Long-format "t,x,y,value,err_est" rows on every stride-th node.
void write_kernel_csv(const std::string& path, const KernelGrid& g, int stride, bool exact);
void write_samples_csv(const std::string& path, const std::vector<double>& samples, bool exact);

/// Full-precision binary kernel with a JSON sidecar carrying `hash`.
void write_kernel_cache(const std::string& stem, const KernelGrid& g, const std::string& hash);
/// Reads a cache written by write_kernel_cache when its hash matches.
[[nodiscard]] std::optional<KernelGrid> read_kernel_cache(const std::string& stem,
                                                          const std::string& hash);

}  // namespace lvp::io
