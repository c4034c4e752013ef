#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "sphparisi/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Free energy of mixed p-spin spherical spin glasses"};
  app.require_subcommand(1);
  sphparisi::CliOptions opts;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opts.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", opts.out, "output directory")->capture_default_str();
    cmd->add_option("--seed", seed, "master seed (overrides the config)");
    cmd->add_option("--threads", opts.threads, "worker thread cap (results do not depend on it)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_flag("--strict", opts.strict, "sampler-health warnings exit with code 3");
  };
  auto* solve = app.add_subcommand("solve", "minimize the Parisi functional over k-level order parameters");
  auto* finite_m = app.add_subcommand("finite-m", "finite-M functional for a fixed order parameter");
  auto* simulate = app.add_subcommand("simulate", "finite-N Monte Carlo: free-energy, gg-stats, ass-bracket, cavity-check");
  for (auto* cmd : {solve, finite_m, simulate}) add_common(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sphparisi::kExitConfig;
  }
  for (auto* cmd : {solve, finite_m, simulate}) {
    if (cmd->get_option("--seed")->count() > 0) opts.seed = seed;
  }
  if (solve->parsed()) return sphparisi::run_solve(opts, std::cout, std::cerr);
  if (finite_m->parsed()) return sphparisi::run_finite_m(opts, std::cout, std::cerr);
  return sphparisi::run_simulate(opts, std::cout, std::cerr);
}
