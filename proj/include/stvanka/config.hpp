#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stvanka/benchmark.hpp"

namespace stvanka {

enum class RunMode { benchmark, eoc, robustness };

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct EocSettings {
  StudyKind kind = StudyKind::temporal;
  int refinements = 3;
  int mesh_cells = 2;
  int steps = 4;
  double viscosity = 1.0;
  double final_time = 0.5;
};

struct RunConfig {
  RunMode mode = RunMode::benchmark;
  std::string output_dir = "out";
  BenchmarkConfig benchmark;
  EocSettings eoc;
  std::vector<int> robustness_k{0, 1, 2};
  std::vector<int> robustness_levels;  // empty: the configured level count
  int threads = 1;
};

/// Command line values; set fields take precedence over the file.
struct CliOverrides {
  std::optional<std::string> mode;
  std::optional<int> k;
  std::optional<int> r;
  std::optional<int> levels;
  std::optional<double> re;
  std::optional<double> tmax;
  std::optional<std::string> out;
  std::optional<int> threads;
  bool sequential = false;
};

/// Parses `key = value` lines grouped in [problem], [discretization],
/// [solver] and [output]. '#' starts a comment. Throws ConfigError naming
/// the line for syntax errors and unknown keys, and the parameter for
/// range violations.
RunConfig parse_config(std::istream &in, const CliOverrides &overrides = {});
RunConfig parse_config_file(const std::string &path, const CliOverrides &overrides = {});

std::string to_string(RunMode mode);

}  // namespace stvanka
