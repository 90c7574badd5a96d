#pragma once

#include <iosfwd>

#include "stvanka/config.hpp"

namespace stvanka {

namespace exit_code {
inline constexpr int success = 0;
inline constexpr int config_error = 2;
inline constexpr int solver_failure = 3;
}  // namespace exit_code

/// Runs the configured mode and writes its CSV files and summary.txt into
/// config.output_dir. Progress and diagnostics go to `log`.
int run(const RunConfig &config, std::ostream &log);

}  // namespace stvanka
