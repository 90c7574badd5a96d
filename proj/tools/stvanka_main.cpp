#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "stvanka/app.hpp"
#include "stvanka/config.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Space-time finite element solver for incompressible flow"};
  std::string config_path;
  stvanka::CliOverrides o;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--mode", o.mode, "benchmark, eoc or robustness")
      ->check(CLI::IsMember({"benchmark", "eoc", "robustness"}));
  app.add_option("--k", o.k, "temporal polynomial degree");
  app.add_option("--r", o.r, "spatial velocity degree");
  app.add_option("--levels", o.levels, "multigrid levels above the coarsest mesh");
  app.add_option("--re", o.re, "Reynolds number; sets the viscosity");
  app.add_option("--tmax", o.tmax, "final time");
  app.add_option("--out", o.out, "output directory");
  app.add_option("--threads", o.threads, "worker threads for assembly and smoothing");
  app.add_flag("--sequential", o.sequential, "force the single-threaded path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : stvanka::exit_code::config_error;
  }

  stvanka::RunConfig config;
  try {
    if (config_path.empty()) {
      std::istringstream empty;
      config = stvanka::parse_config(empty, o);
    } else {
      config = stvanka::parse_config_file(config_path, o);
    }
  } catch (const stvanka::ConfigError &e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return stvanka::exit_code::config_error;
  }
  return stvanka::run(config, std::cerr);
}
