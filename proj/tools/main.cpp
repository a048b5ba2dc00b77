#include "commands.hpp"
#include "config.hpp"

#include "loop3pt/errors.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
  using namespace loop3pt::cli;
  CLI::App app{"Three-point structure constants of critical loop models on the cylinder"};
  app.require_subcommand(1);
  std::string config_path;
  Options opt;
  std::string out = opt.out.string();
  int digits = 0;
  app.add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  app.add_option("--digits", digits, "significant digits (overrides the config)")->check(CLI::Range(15, 95));
  app.add_option("--workers", opt.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--resume", opt.resume, "keep failed cells of an earlier sweep instead of retrying them");
  auto* omega = app.add_subcommand("omega", "evaluate the conjectured structure constant on the grid");
  auto* lattice = app.add_subcommand("lattice", "transfer-matrix runs for every (beta^2, triple, L) cell");
  auto* compare = app.add_subcommand("compare", "extrapolate lattice results and compare with omega");
  auto* oracle = app.add_subcommand("oracle", "check the transfer engine against configuration sums");
  for (auto* sub : {omega, lattice, compare, oracle}) sub->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }
  opt.out = out;
  try {
    RunConfig cfg = RunConfig::load(config_path);
    if (digits > 0) cfg.digits = digits;
    if (omega->parsed()) return cmd_omega(cfg, opt);
    if (lattice->parsed()) return cmd_lattice(cfg, opt);
    if (compare->parsed()) return cmd_compare(cfg, opt);
    return cmd_oracle(cfg, opt);
  } catch (const loop3pt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
}
