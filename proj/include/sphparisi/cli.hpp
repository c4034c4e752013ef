#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace sphparisi {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitResource = 2, kExitHealth = 3 };

struct CliOptions {
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  int threads = 0;                    // 0: OpenMP default
  bool strict = false;                // sampler-health warnings become exit 3
};

// Each writes its result file(s) into opts.out and a short summary to `log`;
// diagnostics go to `err`.
int run_solve(const CliOptions& opts, std::ostream& log, std::ostream& err);       // solve.json
int run_finite_m(const CliOptions& opts, std::ostream& log, std::ostream& err);    // finite_m.json
int run_simulate(const CliOptions& opts, std::ostream& log, std::ostream& err);    // simulate.csv

}  // namespace sphparisi
