#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "sphparisi/mixture.hpp"
#include "sphparisi/rsb.hpp"

namespace sphparisi {

struct OptimizerOptions {
  int restarts = 8;
  double tol = 1e-9;      // early-stop threshold on per-k improvement
  int max_iter = 4000;    // Nelder-Mead iterations per restart
  std::uint64_t seed = 0x5eed;
  double simplex_ftol = 1e-14;
  double simplex_xtol = 1e-10;
};

struct KOptimum {
  FunctionalOrderParameter best;
  double value = 0.0;
  bool converged = true;
};

struct OptimizationResult {
  FunctionalOrderParameter best;
  double value = 0.0;
  std::vector<std::pair<int, double>> per_k_values;
  int restarts_used = 0;
  bool converged = true;
};

// Feasible reparameterization: every real vector of length 2k - 1 decodes to a valid
// triplet. Coordinates are folded into [0, 1] (triangle wave) and used as stick-breaking
// fractions: q_l = q_{l-1} + (1 - q_{l-1}) u_l, likewise m_1..m_{k-1}.
FunctionalOrderParameter decode_order_parameter(int k, const std::vector<double>& coords);
std::vector<double> encode_order_parameter(const FunctionalOrderParameter& f);

// Minimizes P over k-level order parameters. Extra warm starts are tried in addition to the
// seeded low-discrepancy restarts.
KOptimum optimize_at_k(const Mixture& mix, int k, const OptimizerOptions& opts,
                       const std::vector<FunctionalOrderParameter>& warm_starts = {});

// k = 1..k_max, each level warm-started from the best split of the previous optimum.
OptimizationResult optimize(const Mixture& mix, int k_max, const OptimizerOptions& opts);

// Inserts a degenerate level after level `level` (1-based): the step function is unchanged.
FunctionalOrderParameter split_level(const FunctionalOrderParameter& f, int level);

}  // namespace sphparisi
