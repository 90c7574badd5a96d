#include "stvanka/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace stvanka {

namespace {

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string &v) {
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("expected a number, got '" + v + "'");
  return x;
}

int to_int(const std::string &v) {
  int x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw std::invalid_argument("expected an integer, got '" + v + "'");
  return x;
}

bool to_bool(const std::string &v) {
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

RunMode to_mode(const std::string &v) {
  if (v == "benchmark") return RunMode::benchmark;
  if (v == "eoc") return RunMode::eoc;
  if (v == "robustness") return RunMode::robustness;
  throw std::invalid_argument("unknown mode '" + v + "'");
}

std::vector<int> to_int_list(const std::string &v) {
  std::vector<int> out;
  for (const auto &item : split(v, ',')) out.push_back(to_int(item));
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

/// "t_1:tau_1, t_2:tau_2, ..." with pieces (t_{i-1}, t_i], t_0 = 0.
TimeSchedule to_schedule(const std::string &v) {
  TimeSchedule s;
  double start = 0.0;
  for (const auto &item : split(v, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) throw std::invalid_argument("schedule pieces are written end:tau");
    const double end = to_double(parts[0]);
    s.pieces.push_back({start, end, to_double(parts[1])});
    start = end;
  }
  if (s.pieces.empty()) throw std::invalid_argument("empty schedule");
  return s;
}

struct Parsed {
  RunConfig config;
  std::optional<double> tau;
  std::optional<TimeSchedule> schedule;
  std::optional<double> re;
};

using Setter = std::function<void(Parsed &, const std::string &)>;

const std::map<std::string, std::map<std::string, Setter>> &setters() {
  static const std::map<std::string, std::map<std::string, Setter>> table = {
      {"problem",
       {
           {"mode", [](Parsed &p, const std::string &v) { p.config.mode = to_mode(v); }},
           {"mesh", [](Parsed &p, const std::string &v) { p.config.benchmark.mesh_file = v; }},
           {"channel_length",
            [](Parsed &p, const std::string &v) { p.config.benchmark.geometry.length = to_double(v); }},
           {"channel_height",
            [](Parsed &p, const std::string &v) { p.config.benchmark.geometry.height = to_double(v); }},
           {"cylinder_x",
            [](Parsed &p, const std::string &v) { p.config.benchmark.geometry.center.x = to_double(v); }},
           {"cylinder_y",
            [](Parsed &p, const std::string &v) { p.config.benchmark.geometry.center.y = to_double(v); }},
           {"cylinder_diameter",
            [](Parsed &p, const std::string &v) { p.config.benchmark.geometry.diameter = to_double(v); }},
           {"inflow_peak",
            [](Parsed &p, const std::string &v) { p.config.benchmark.inflow_peak = to_double(v); }},
           {"viscosity",
            [](Parsed &p, const std::string &v) { p.config.benchmark.viscosity = to_double(v); }},
           {"re", [](Parsed &p, const std::string &v) { p.re = to_double(v); }},
           {"final_time",
            [](Parsed &p, const std::string &v) { p.config.benchmark.final_time = to_double(v); }},
           {"tau", [](Parsed &p, const std::string &v) { p.tau = to_double(v); }},
           {"schedule", [](Parsed &p, const std::string &v) { p.schedule = to_schedule(v); }},
           {"convection",
            [](Parsed &p, const std::string &v) { p.config.benchmark.convection = to_bool(v); }},
           {"snap_cylinder",
            [](Parsed &p, const std::string &v) { p.config.benchmark.snap_cylinder = to_bool(v); }},
           {"stats_start",
            [](Parsed &p, const std::string &v) { p.config.benchmark.stats_start = to_double(v); }},
           {"stats_end",
            [](Parsed &p, const std::string &v) { p.config.benchmark.stats_end = to_double(v); }},
           {"eoc_study",
            [](Parsed &p, const std::string &v) {
              if (v == "temporal") p.config.eoc.kind = StudyKind::temporal;
              else if (v == "spatial") p.config.eoc.kind = StudyKind::spatial;
              else throw std::invalid_argument("eoc_study is temporal or spatial");
            }},
           {"eoc_refinements",
            [](Parsed &p, const std::string &v) { p.config.eoc.refinements = to_int(v); }},
           {"eoc_mesh_cells",
            [](Parsed &p, const std::string &v) { p.config.eoc.mesh_cells = to_int(v); }},
           {"eoc_steps", [](Parsed &p, const std::string &v) { p.config.eoc.steps = to_int(v); }},
           {"eoc_viscosity",
            [](Parsed &p, const std::string &v) { p.config.eoc.viscosity = to_double(v); }},
           {"eoc_final_time",
            [](Parsed &p, const std::string &v) { p.config.eoc.final_time = to_double(v); }},
       }},
      {"discretization",
       {
           {"k", [](Parsed &p, const std::string &v) { p.config.benchmark.k = to_int(v); }},
           {"r", [](Parsed &p, const std::string &v) { p.config.benchmark.r = to_int(v); }},
           {"levels", [](Parsed &p, const std::string &v) { p.config.benchmark.levels = to_int(v); }},
           {"coarse_refinements",
            [](Parsed &p, const std::string &v) {
              p.config.benchmark.coarse_refinements = to_int(v);
            }},
           {"gamma1", [](Parsed &p, const std::string &v) { p.config.benchmark.gamma1 = to_double(v); }},
           {"gamma2", [](Parsed &p, const std::string &v) { p.config.benchmark.gamma2 = to_double(v); }},
           {"robustness_k",
            [](Parsed &p, const std::string &v) { p.config.robustness_k = to_int_list(v); }},
           {"robustness_levels",
            [](Parsed &p, const std::string &v) { p.config.robustness_levels = to_int_list(v); }},
       }},
      {"solver",
       {
           {"omega",
            [](Parsed &p, const std::string &v) {
              p.config.benchmark.solver.multigrid.omega = to_double(v);
            }},
           {"smoothing_steps",
            [](Parsed &p, const std::string &v) {
              p.config.benchmark.solver.multigrid.smoothing_steps = to_int(v);
            }},
           {"tol_newton",
            [](Parsed &p, const std::string &v) { p.config.benchmark.solver.tolerance = to_double(v); }},
           {"tol_gmres",
            [](Parsed &p, const std::string &v) {
              p.config.benchmark.solver.gmres.tolerance = to_double(v);
            }},
           {"max_newton",
            [](Parsed &p, const std::string &v) {
              p.config.benchmark.solver.max_iterations = to_int(v);
            }},
           {"max_gmres",
            [](Parsed &p, const std::string &v) {
              p.config.benchmark.solver.gmres.max_iterations = to_int(v);
            }},
           {"gmres_restart",
            [](Parsed &p, const std::string &v) { p.config.benchmark.solver.gmres.restart = to_int(v); }},
           {"preconditioner",
            [](Parsed &p, const std::string &v) {
              auto &pc = p.config.benchmark.solver.preconditioner;
              if (v == "multigrid") pc = PreconditionerKind::multigrid;
              else if (v == "direct") pc = PreconditionerKind::direct;
              else if (v == "none") pc = PreconditionerKind::none;
              else throw std::invalid_argument("preconditioner is multigrid, direct or none");
            }},
           {"threads", [](Parsed &p, const std::string &v) { p.config.threads = to_int(v); }},
       }},
      {"output",
       {
           {"directory", [](Parsed &p, const std::string &v) { p.config.output_dir = v; }},
       }},
  };
  return table;
}

void require(bool ok, const std::string &message) {
  if (!ok) throw ConfigError(message);
}

void check_ranges(const RunConfig &c) {
  const BenchmarkConfig &b = c.benchmark;
  require(b.k >= 0 && b.k <= 4, "k = " + std::to_string(b.k) + " is outside [0, 4]");
  require(b.r >= 2 && b.r <= 4, "r = " + std::to_string(b.r) + " is outside [2, 4]");
  require(b.levels >= 0 && b.levels <= 5,
          "levels = " + std::to_string(b.levels) + " is outside [0, 5]");
  for (int k : c.robustness_k)
    require(k >= 0 && k <= 4, "robustness_k entry " + std::to_string(k) + " is outside [0, 4]");
  for (int l : c.robustness_levels)
    require(l >= 0 && l <= 5, "robustness_levels entry " + std::to_string(l) + " is outside [0, 5]");
  require(b.coarse_refinements >= 0 && b.coarse_refinements <= 3,
          "coarse_refinements = " + std::to_string(b.coarse_refinements) + " is outside [0, 3]");
  require(b.viscosity > 0.0, "viscosity must be positive");
  require(b.inflow_peak > 0.0, "inflow_peak must be positive");
  require(b.gamma1 > 0.0 && b.gamma2 > 0.0, "gamma1 and gamma2 must be positive");
  const auto &s = b.solver;
  require(s.multigrid.omega > 0.0 && s.multigrid.omega <= 1.0, "omega must lie in (0, 1]");
  require(s.multigrid.smoothing_steps >= 1, "smoothing_steps must be at least 1");
  require(s.tolerance > 0.0, "tol_newton must be positive");
  require(s.gmres.tolerance > 0.0, "tol_gmres must be positive");
  require(s.max_iterations >= 1, "max_newton must be at least 1");
  require(s.gmres.max_iterations >= 1, "max_gmres must be at least 1");
  require(s.gmres.restart >= 0, "gmres_restart must be nonnegative");
  require(c.threads >= 1, "threads must be at least 1");
  require(c.eoc.refinements >= 1, "eoc_refinements must be at least 1");
  require(c.eoc.mesh_cells >= 1, "eoc_mesh_cells must be at least 1");
  require(c.eoc.steps >= 1, "eoc_steps must be at least 1");
  require(c.eoc.viscosity > 0.0, "eoc_viscosity must be positive");
  require(c.eoc.final_time > 0.0, "eoc_final_time must be positive");
  require(!c.output_dir.empty(), "output directory must not be empty");
  if (c.mode == RunMode::benchmark || c.mode == RunMode::robustness) {
    try {
      if (b.mesh_file.empty()) b.geometry.validate();
      b.schedule.validate(b.final_time);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(e.what());
    }
  }
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
  case RunMode::benchmark: return "benchmark";
  case RunMode::eoc: return "eoc";
  case RunMode::robustness: return "robustness";
  }
  return "";
}

RunConfig parse_config(std::istream &in, const CliOverrides &o) {
  Parsed p;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!setters().contains(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) throw ConfigError(where + "key '" + key + "' outside a section");
    const auto &keys = setters().at(section);
    const auto it = keys.find(key);
    if (it == keys.end())
      throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
    if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
    try {
      it->second(p, value);
    } catch (const std::invalid_argument &e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }

  RunConfig &c = p.config;
  BenchmarkConfig &b = c.benchmark;
  try {
    if (o.mode) c.mode = to_mode(*o.mode);
  } catch (const std::invalid_argument &e) {
    throw ConfigError(e.what());
  }
  if (o.k) b.k = *o.k;
  if (o.r) b.r = *o.r;
  if (o.levels) b.levels = *o.levels;
  if (o.re) p.re = *o.re;
  if (o.tmax) b.final_time = *o.tmax;
  if (o.out) c.output_dir = *o.out;
  if (o.threads) c.threads = *o.threads;
  if (o.sequential) c.threads = 1;

  if (p.re) {
    require(*p.re > 0.0, "re must be positive");
    b.set_reynolds(*p.re);
  }
  require(b.final_time >= 0.0, "final_time must be nonnegative");
  if (b.final_time == 0.0 && c.mode == RunMode::benchmark)
    throw ConfigError("final_time = 0 gives an empty time schedule");
  if (p.schedule) {
    require(!p.tau, "set either tau or schedule, not both");
    b.schedule = *p.schedule;
  } else {
    b.schedule = TimeSchedule::uniform(b.final_time, p.tau.value_or(0.1));
  }
  b.solver.multigrid.threads = c.threads;
  check_ranges(c);
  return c;
}

RunConfig parse_config_file(const std::string &path, const CliOverrides &overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, overrides);
}

}  // namespace stvanka
