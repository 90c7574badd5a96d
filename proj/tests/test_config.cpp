#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stvanka/app.hpp"
#include "stvanka/config.hpp"

using namespace stvanka;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string &text, const CliOverrides &o = {}) {
  std::istringstream in(text);
  return parse_config(in, o);
}

std::string error_of(const std::string &text, const CliOverrides &o = {}) {
  try {
    parse(text, o);
  } catch (const ConfigError &e) {
    return e.what();
  }
  return "";
}

std::vector<std::string> lines_of(const fs::path &p) {
  std::ifstream in(p);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

fs::path scratch_dir(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / ("stvanka_test_" + name);
  fs::remove_all(dir);
  return dir;
}

// Cheapest cylinder run: coarse mesh only, one slab.
const char *tiny_benchmark = R"(
[problem]
re = 20
final_time = 0.1
tau = 0.1
[discretization]
levels = 0
coarse_refinements = 0
)";

}  // namespace

TEST(Config, EmptyFileGivesDefaults) {
  const RunConfig c = parse("");
  EXPECT_EQ(c.mode, RunMode::benchmark);
  EXPECT_EQ(c.benchmark.k, 1);
  EXPECT_EQ(c.benchmark.r, 2);
  EXPECT_EQ(c.benchmark.levels, 2);
  EXPECT_DOUBLE_EQ(c.benchmark.solver.multigrid.omega, 0.7);
  EXPECT_EQ(c.benchmark.solver.multigrid.smoothing_steps, 4);
  EXPECT_DOUBLE_EQ(c.benchmark.gamma1, 35.0);
  EXPECT_DOUBLE_EQ(c.benchmark.gamma2, 35.0);
  EXPECT_DOUBLE_EQ(c.benchmark.solver.tolerance, 1e-8);
  EXPECT_DOUBLE_EQ(c.benchmark.solver.gmres.tolerance, 1e-9);
  EXPECT_EQ(c.benchmark.solver.max_iterations, 25);
  EXPECT_EQ(c.benchmark.solver.gmres.max_iterations, 200);
  EXPECT_EQ(c.threads, 1);
}

TEST(Config, ParsesSectionsAndComments) {
  const RunConfig c = parse(R"(# full example
[problem]
mode = robustness   # trailing comment
re = 100
final_time = 8.5
schedule = 7:0.1, 8:0.05, 8.5:0.01
[discretization]
k = 2
r = 3
levels = 1
[solver]
omega = 0.5
smoothing_steps = 2
tol_newton = 1e-10
preconditioner = direct
[output]
directory = results
)");
  EXPECT_EQ(c.mode, RunMode::robustness);
  EXPECT_NEAR(c.benchmark.reynolds(), 100, 1e-10);
  EXPECT_EQ(c.benchmark.schedule.n_slabs(), 140);
  EXPECT_EQ(c.benchmark.k, 2);
  EXPECT_EQ(c.benchmark.r, 3);
  EXPECT_DOUBLE_EQ(c.benchmark.solver.multigrid.omega, 0.5);
  EXPECT_EQ(c.benchmark.solver.multigrid.smoothing_steps, 2);
  EXPECT_DOUBLE_EQ(c.benchmark.solver.tolerance, 1e-10);
  EXPECT_EQ(c.benchmark.solver.preconditioner, PreconditionerKind::direct);
  EXPECT_EQ(c.output_dir, "results");
}

TEST(Config, RangeViolationsAreNamed) {
  EXPECT_NE(error_of("[discretization]\nk = 7\n").find("k = 7"), std::string::npos);
  EXPECT_NE(error_of("[discretization]\nr = 1\n").find("r = 1"), std::string::npos);
  EXPECT_NE(error_of("[discretization]\nlevels = 6\n").find("levels"), std::string::npos);
  EXPECT_NE(error_of("[solver]\nomega = 1.5\n").find("omega"), std::string::npos);
  EXPECT_NE(error_of("[solver]\nsmoothing_steps = 0\n").find("smoothing_steps"), std::string::npos);
}

TEST(Config, CommandLineOverridesFile) {
  CliOverrides o;
  o.k = 2;
  o.levels = 1;
  o.re = 50;
  o.tmax = 0.5;
  o.out = "elsewhere";
  o.threads = 4;
  const RunConfig c = parse("[discretization]\nk = 1\nlevels = 3\n", o);
  EXPECT_EQ(c.benchmark.k, 2);
  EXPECT_EQ(c.benchmark.levels, 1);
  EXPECT_NEAR(c.benchmark.reynolds(), 50, 1e-10);
  EXPECT_DOUBLE_EQ(c.benchmark.final_time, 0.5);
  EXPECT_EQ(c.benchmark.schedule.n_slabs(), 5);
  EXPECT_EQ(c.output_dir, "elsewhere");
  EXPECT_EQ(c.threads, 4);
  o.sequential = true;
  EXPECT_EQ(parse("", o).threads, 1);
  o = {};
  o.k = 9;
  EXPECT_NE(error_of("", o).find("k = 9"), std::string::npos);
}

TEST(Config, ParseErrorsReportLine) {
  EXPECT_NE(error_of("[problem]\nre = 100\nbogus = 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("[nowhere]\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("k = 1\n").find("line 1"), std::string::npos);
  EXPECT_NE(error_of("[discretization]\n\nk\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("[discretization]\nk = two\n").find("line 2"), std::string::npos);
}

TEST(Config, EmptyScheduleRejected) {
  EXPECT_FALSE(error_of("[problem]\nfinal_time = 0\n").empty());
  EXPECT_FALSE(error_of("[problem]\ntau = 0.1\nschedule = 1:0.1\n").empty());
  EXPECT_FALSE(error_of("[problem]\nfinal_time = 1\ntau = 0.3\n").empty());
  // a zero final time is irrelevant to the eoc mode
  EXPECT_TRUE(error_of("[problem]\nmode = eoc\nfinal_time = 0\n").empty());
}

TEST(Config, MissingFile) {
  EXPECT_THROW(parse_config_file("/nonexistent/file.cfg"), ConfigError);
}

TEST(Run, EocModeWritesOneRowPerRefinement) {
  RunConfig c = parse(R"([problem]
mode = eoc
eoc_refinements = 3
eoc_steps = 2
eoc_mesh_cells = 2
[discretization]
k = 0
levels = 0
)");
  c.output_dir = scratch_dir("eoc").string();
  std::ostringstream log;
  ASSERT_EQ(run(c, log), exit_code::success) << log.str();
  const auto rows = lines_of(fs::path(c.output_dir) / "eoc.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "refinement,h_or_tau,error_v_L2,error_p_L2,eoc_v,eoc_p");
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "summary.txt"));
}

TEST(Run, BenchmarkModeWritesOutputs) {
  RunConfig c = parse(tiny_benchmark);
  c.output_dir = scratch_dir("bench").string();
  std::ostringstream log;
  ASSERT_EQ(run(c, log), exit_code::success) << log.str();
  const fs::path dir(c.output_dir);
  const auto coeff = lines_of(dir / "coefficients.csv");
  ASSERT_EQ(coeff.size(), 3u);
  EXPECT_EQ(coeff[0], "t,c_D,c_L");
  std::ifstream stats(dir / "stats.csv");
  const SolverStats s = SolverStats::read_csv(stats);
  EXPECT_EQ(s.n_time_steps(), 1);
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
}

TEST(Run, RobustnessModeTable) {
  RunConfig c = parse(std::string(tiny_benchmark) + "[problem]\nmode = robustness\n");
  c.output_dir = scratch_dir("robust").string();
  std::ostringstream log;
  ASSERT_EQ(run(c, log), exit_code::success) << log.str();
  const auto rows = lines_of(fs::path(c.output_dir) / "robustness.csv");
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0], "k,levels,dofs_per_slab,mean_newton,mean_gmres");
  for (int k = 0; k < 3; ++k) EXPECT_EQ(rows[k + 1].substr(0, 4), std::to_string(k) + ",0,");
}

TEST(Run, SolverFailureExitsWithThreeAndKeepsOutputs) {
  RunConfig c = parse(std::string(tiny_benchmark) + "[solver]\nmax_newton = 1\ntol_newton = 1e-30\n");
  c.output_dir = scratch_dir("fail").string();
  std::ostringstream log;
  EXPECT_EQ(run(c, log), exit_code::solver_failure);
  EXPECT_NE(log.str().find("slab 1"), std::string::npos);
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "stats.csv"));
}

TEST(Run, UnwritableOutputIsConfigError) {
  RunConfig c = parse(tiny_benchmark);
  c.output_dir = "/proc/stvanka_cannot_write_here";
  std::ostringstream log;
  EXPECT_EQ(run(c, log), exit_code::config_error);
}

TEST(Run, MissingMeshFileIsConfigError) {
  RunConfig c = parse(std::string(tiny_benchmark) + "[problem]\nmesh = /nonexistent.mesh\n");
  c.output_dir = scratch_dir("mesh").string();
  std::ostringstream log;
  EXPECT_EQ(run(c, log), exit_code::config_error);
}
