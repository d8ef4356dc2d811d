#pragma once

#include <iosfwd>

#include <json.hpp>

#include "lvp/config.hpp"

namespace lvp {

enum ExitCode : int { exit_pass = 0, exit_validation = 2, exit_nonconvergence = 3, exit_config = 4 };

struct RunResult {
  int exit_code = exit_pass;
  nlohmann::json summary;
};

/// Runs the requested stages, writing artifacts under cfg.out_dir and a
/// one-line-per-check table to `log`.
[[nodiscard]] RunResult run(const RunConfig& cfg, std::ostream& log);

}  // namespace lvp
