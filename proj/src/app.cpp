#include "stvanka/app.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>

namespace stvanka {

namespace {

namespace fs = std::filesystem;

std::ofstream open_output(const fs::path &path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  return out;
}

void write_benchmark_outputs(const RunConfig &config, const MarchResult &result) {
  const fs::path dir(config.output_dir);
  {
    auto out = open_output(dir / "coefficients.csv");
    write_coefficients_csv(out, result.coefficients);
  }
  {
    auto out = open_output(dir / "stats.csv");
    result.stats.write_csv(out);
  }
  const BenchmarkConfig &b = config.benchmark;
  auto out = open_output(dir / "summary.txt");
  out << std::setprecision(5);
  out << "mode benchmark\n"
      << "k " << b.k << "  r " << b.r << "  levels " << b.levels << "\n"
      << "Re " << b.reynolds() << "  viscosity " << b.viscosity << "\n"
      << "dofs per slab " << result.dofs_per_slab << "\n"
      << "completed slabs " << result.completed_slabs << " of " << b.schedule.n_slabs() << "\n"
      << "mean Newton steps per time step " << result.stats.mean_newton(b.stats_start, b.stats_end)
      << "\n"
      << "mean GMRES iterations per Newton step "
      << result.stats.mean_gmres(b.stats_start, b.stats_end) << "\n";
  if (!result.coefficients.empty()) {
    const auto &last = result.coefficients.back();
    out << "final c_D " << last.drag << "  c_L " << last.lift << "  at t " << last.t << "\n";
  }
}

int run_benchmark(const RunConfig &config, std::ostream &log) {
  MarchResult result;
  int status = exit_code::success;
  try {
    run_time_marching(config.benchmark, result);
  } catch (const SolverError &e) {
    log << "solver failure: " << e.what() << "\n";
    status = exit_code::solver_failure;
  }
  write_benchmark_outputs(config, result);
  log << std::setprecision(5) << "benchmark: " << result.completed_slabs << " slabs, mean Newton "
      << result.stats.mean_newton(config.benchmark.stats_start, config.benchmark.stats_end)
      << ", mean GMRES "
      << result.stats.mean_gmres(config.benchmark.stats_start, config.benchmark.stats_end) << "\n";
  return status;
}

int run_eoc(const RunConfig &config, std::ostream &log) {
  ConvergenceStudy study;
  study.kind = config.eoc.kind;
  study.k = config.benchmark.k;
  study.r = config.benchmark.r;
  study.viscosity = config.eoc.viscosity;
  study.convection = config.benchmark.convection;
  study.final_time = config.eoc.final_time;
  study.refinements = config.eoc.refinements;
  study.mesh_cells = config.eoc.mesh_cells;
  study.steps0 = config.eoc.steps;
  study.levels = config.benchmark.levels;
  study.solver = config.benchmark.solver;
  std::vector<EocRow> rows;
  try {
    rows = manufactured_convergence(study);
  } catch (const SolverError &e) {
    log << "solver failure: " << e.what() << "\n";
    return exit_code::solver_failure;
  }
  const fs::path dir(config.output_dir);
  {
    auto out = open_output(dir / "eoc.csv");
    write_eoc_csv(out, rows);
  }
  auto out = open_output(dir / "summary.txt");
  out << std::setprecision(5) << "mode eoc ("
      << (study.kind == StudyKind::temporal ? "temporal" : "spatial") << ")\n"
      << "k " << study.k << "  r " << study.r << "\n";
  for (const auto &r : rows) {
    out << "h_or_tau " << r.h_or_tau << "  error_v " << r.error_v << "  error_p " << r.error_p;
    if (r.refinement > 0) out << "  eoc_v " << r.eoc_v << "  eoc_p " << r.eoc_p;
    out << "\n";
  }
  log << "eoc: " << rows.size() << " runs written\n";
  return exit_code::success;
}

int run_robustness(const RunConfig &config, std::ostream &log) {
  const std::vector<int> levels = config.robustness_levels.empty()
                                      ? std::vector<int>{config.benchmark.levels}
                                      : config.robustness_levels;
  const fs::path dir(config.output_dir);
  auto csv = open_output(dir / "robustness.csv");
  csv << "k,levels,dofs_per_slab,mean_newton,mean_gmres\n" << std::setprecision(17);
  auto summary = open_output(dir / "summary.txt");
  summary << std::setprecision(5) << "mode robustness\n";
  for (int L : levels)
    for (int k : config.robustness_k) {
      BenchmarkConfig b = config.benchmark;
      b.k = k;
      b.levels = L;
      MarchResult result;
      try {
        run_time_marching(b, result);
      } catch (const SolverError &e) {
        log << "solver failure (k " << k << ", levels " << L << "): " << e.what() << "\n";
        return exit_code::solver_failure;
      }
      {
        auto stats = open_output(dir / ("stats_k" + std::to_string(k) + "_L" + std::to_string(L) +
                                        ".csv"));
        result.stats.write_csv(stats);
      }
      const double newton = result.stats.mean_newton(b.stats_start, b.stats_end);
      const double gmres = result.stats.mean_gmres(b.stats_start, b.stats_end);
      csv << k << ',' << L << ',' << result.dofs_per_slab << ',' << newton << ',' << gmres << '\n';
      csv.flush();
      summary << "k " << k << "  levels " << L << "  dofs/slab " << result.dofs_per_slab
              << "  mean Newton " << newton << "  mean GMRES " << gmres << "\n";
      log << std::setprecision(5) << "robustness: k " << k << ", levels " << L << ": Newton "
          << newton << ", GMRES " << gmres << "\n";
    }
  return exit_code::success;
}

}  // namespace

int run(const RunConfig &config, std::ostream &log) {
  try {
    fs::create_directories(config.output_dir);
    switch (config.mode) {
    case RunMode::benchmark: return run_benchmark(config, log);
    case RunMode::eoc: return run_eoc(config, log);
    case RunMode::robustness: return run_robustness(config, log);
    }
  } catch (const ConfigError &e) {
    log << "configuration error: " << e.what() << "\n";
    return exit_code::config_error;
  } catch (const MeshError &e) {
    log << "mesh error: " << e.what() << "\n";
    return exit_code::config_error;
  } catch (const fs::filesystem_error &e) {
    log << "output error: " << e.what() << "\n";
    return exit_code::config_error;
  }
  return exit_code::success;
}

}  // namespace stvanka
