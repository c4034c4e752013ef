#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "sphparisi/finite_m.hpp"
#include "sphparisi/mixture.hpp"
#include "sphparisi/optimizer.hpp"
#include "sphparisi/rsb.hpp"
#include "sphparisi/simulator.hpp"

namespace sphparisi {

// Schema violation; the message names the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SolveConfig {
  Mixture mixture;
  int k_max = 3;
  OptimizerOptions optimizer;
  std::optional<FunctionalOrderParameter> order_parameter;  // also evaluated when given
  std::uint64_t seed = 0x5eed;
};

struct FiniteMRunConfig {
  Mixture mixture;
  FunctionalOrderParameter order_parameter;
  std::vector<int> M_values;
  FiniteMConfig quadrature;
};

enum class SimulateMode { free_energy, gg_stats, ass_bracket, cavity_check };

struct SimulateConfig {
  SimulateMode mode = SimulateMode::free_energy;
  Mixture mixture;
  int N = 16;
  int M = 0;
  std::uint64_t seed = 1;
  // free-energy
  long n_config = 10000;
  int n_disorder = 20;
  bool annealed = false;
  // gg-stats
  GibbsOptions gibbs;
  PerturbationSpec perturbation;
  int chains = 4;
  double eta = -1.0;  // negative: 3 / sqrt(N)
  std::vector<PhiSpec> phi;
  int resamples = 200;
  bool dump_chains = false;
  // ass-bracket
  AssOptions ass;
  // cavity-check
  int configs = 100;
};

Mixture mixture_from_json(const nlohmann::json& j, const std::string& path = "mixture");
nlohmann::json mixture_to_json(const Mixture& mix);
// Throws ConfigError naming the violated constraint.
FunctionalOrderParameter order_parameter_from_json(const nlohmann::json& j,
                                                   const std::string& path = "order_parameter");
nlohmann::json order_parameter_to_json(const FunctionalOrderParameter& f);

SolveConfig parse_solve_config(const nlohmann::json& j);
FiniteMRunConfig parse_finite_m_config(const nlohmann::json& j);
SimulateConfig parse_simulate_config(const nlohmann::json& j);

std::string mode_name(SimulateMode mode);

// Reads a JSON document; parse errors become ConfigError with line and column.
nlohmann::json load_json_file(const std::string& path);

}  // namespace sphparisi
