#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sphparisi/kernels.hpp"
#include "sphparisi/mixture.hpp"
#include "sphparisi/stats.hpp"

namespace sphparisi {

inline constexpr std::size_t kDefaultTensorGuard = 10'000'000;

// Couplings of a finite-N instance: one dense N^p tensor per mixture term, entry
// (p, flat index) drawn by counter_normal(seed, p, index).
struct Disorder {
  int n = 0;
  Mixture mixture;
  std::uint64_t seed = 0;
  std::vector<CouplingTensor> tensors;
};

// Throws ResourceGuardError when sum_p N^p exceeds `guard` entries.
Disorder sample_disorder(const Mixture& mix, int N, std::uint64_t seed, std::size_t guard = kDefaultTensorGuard);

// sum_p beta_p scaling_total^{-(p-1)/2} sum over all N^p ordered tuples g_{i1..ip} sigma_{i1}..sigma_{ip}.
// scaling_total = N gives H_N, scaling_total = M + N gives H_{M,N}. Throws DomainError when
// sigma has the wrong length or ||sigma||^2 differs from N by more than 1e-8 relative.
double hamiltonian(const Disorder& d, std::span<const double> sigma, int scaling_total);

struct PerturbationSpec {
  std::vector<double> u;  // u_1 .. u_{p_max}, each in [1, 2]
  bool enabled = false;
  std::uint64_t seed = 0;

  static PerturbationSpec uniform(int p_max, double value, std::uint64_t seed);  // enabled
  void validate() const;  // throws DomainError
};

enum class PerturbationVariant { plain, cavity };

// scale * sum_p (u_p / 2^p) H'_p(sigma) with independent couplings H'_p; plain: scale N^{-1/8}
// and N normalization, cavity: scale (M+N)^{-1/8} and (M+N) normalization.
class Perturbation {
 public:
  Perturbation() = default;
  Perturbation(const PerturbationSpec& spec, int N, PerturbationVariant variant = PerturbationVariant::plain,
               int M = 0, std::size_t guard = kDefaultTensorGuard);
  [[nodiscard]] double energy(std::span<const double> sigma) const;
  [[nodiscard]] bool enabled() const { return enabled_; }

 private:
  bool enabled_ = false;
  Disorder couplings_;
  int scaling_total_ = 1;
  double scale_ = 0.0;
};

struct FreeEnergyEstimate {
  double value = 0.0;      // mean over disorder of N^{-1} log Zhat
  double std_error = 0.0;  // bootstrap over disorder draws
  double annealed = 0.0;   // mean over disorder of Zhat
  double annealed_std_error = 0.0;
  double min_effective_samples = 0.0;
  std::vector<double> log_z;  // per-disorder N^{-1} log Zhat
  std::string caveat;
  std::vector<std::string> warnings;
};

// Plain Monte Carlo: Zhat = mean of exp H over n_config uniform points per disorder draw.
FreeEnergyEstimate free_energy_mc(const Mixture& mix, int N, long n_config, int n_disorder, std::uint64_t seed,
                                  int scaling_total = 0);

struct GibbsOptions {
  long steps = 20000;  // measurement steps after burn-in
  long burn_in = 5000;
  long thin = 10;
  double initial_step = 0.5;
  int scaling_total = 0;  // 0 means N
  long window = 100;
};

struct GibbsChain {
  int n = 0;
  std::vector<double> samples;  // row-major, count x n
  std::vector<double> energies;
  double acceptance_rate = 0.0;            // measurement phase
  std::vector<double> window_acceptance;   // every window, burn-in and measurement
  std::vector<double> step_trace;          // step size per window
  double step_size = 0.0;                  // frozen value
  std::uint64_t seed = 0;
  std::string warning;

  [[nodiscard]] std::size_t count() const { return energies.size(); }
  [[nodiscard]] std::span<const double> sample(std::size_t i) const {
    return std::span<const double>(samples).subspan(i * static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  }
};

// Metropolis random walk on S_N targeting exp(H + H_pert) d lambda_N. Proposal
// sigma' = sqrt(N)(sigma + step eta)/||sigma + step eta|| is symmetric, so the acceptance is
// min(1, exp(dE)). The step is retuned after each burn-in window toward acceptance 0.3..0.5
// and then frozen.
GibbsChain gibbs_mcmc(const Disorder& d, const Perturbation& pert, const GibbsOptions& opts, std::uint64_t seed);

// Several independent chains on the same disorder, chain c seeded by derive_seed(seed, {c}).
std::vector<GibbsChain> gibbs_chains(const Disorder& d, const Perturbation& pert, const GibbsOptions& opts,
                                     int count, std::uint64_t seed);

double overlap(std::span<const double> a, std::span<const double> b);

// f = prod of R_{first,second}^power over replicas numbered from 1.
struct OverlapFactor {
  int first = 1;
  int second = 2;
  int power = 1;
};

struct PhiSpec {
  int p = 1;
  int n = 2;
  std::vector<OverlapFactor> monomial;  // empty means f = 1
};

struct PhiEstimate {
  PhiSpec spec;
  double signed_value = 0.0;  // E f R_{1,n+1}^p - (1/n) E f E R_{1,2}^p - (1/n) sum_{l=2}^n E f R_{1,l}^p
  double value = 0.0;         // |signed_value|
  double std_error = 0.0;
};

struct StatReport {
  std::vector<PhiEstimate> phi;
  Estimate overlap_mean;
  Estimate overlap_second_moment;
  Estimate ultrametric_violation;  // rate of R_12 < min(R_13, R_23) - eta
  std::size_t tuples = 0;
};

struct OverlapOptions {
  double eta = 0.0;
  int resamples = 200;
  std::size_t block = 0;  // 0: about sqrt(tuples)
  std::uint64_t seed = 0;
};

// Replica l of tuple t is sample t of chain (s + l - 1) mod C for every rotation s, so the
// replicas inside a tuple always come from distinct chains. Errors by block bootstrap over t.
// Throws InsufficientReplicasError with fewer than max(3, n + 1) chains.
StatReport overlap_statistics(std::span<const GibbsChain> chains, std::span<const PhiSpec> specs,
                              const OverlapOptions& opts);

struct CavityTerms {
  double h_mn = 0.0;         // monomials with no cavity index
  std::vector<double> z;     // z[i]: coefficient of eps_i among monomials with one cavity index
  double gamma = 0.0;        // monomials with two or more cavity indices
  double full = 0.0;         // hamiltonian(d_full, rho, M + N)
};

// Splits H_{M+N}(rho), rho = (sigma, eps) with eps the last M coordinates, by the number of
// cavity indices in each monomial. Throws ResourceGuardError for degree p >= 5.
CavityTerms cavity_decompose(const Disorder& d_full, int M, std::span<const double> rho);

struct AssOptions {
  int n_disorder = 8;
  int n_gauss = 64;
  int n_rep = 200;  // Gibbs samples per disorder draw
  GibbsOptions gibbs;
  PerturbationSpec perturbation;  // cavity variant when enabled
  double delta = 0.1;
};

struct AssBracket {
  double term_z = 0.0;  // E log < exp Lambda_M(||z(sigma)||) >
  double term_y = 0.0;  // E log < exp sqrt(M) y(sigma) >
  double term_z_std_error = 0.0;
  double term_y_std_error = 0.0;
  double std_error = 0.0;  // of (term_z - term_y) / M, over disorder draws
  double correction = 0.0;  // ass_correction at opts.delta
  double bound = 0.0;       // (term_z - term_y) / M + correction
  std::vector<std::string> warnings;
};

// Gibbs samples of H_{M,N} (+ cavity perturbation) give the overlap matrix R; z has M i.i.d.
// coordinate fields with covariance xi'(R) and y has covariance theta(R), both drawn through a
// Cholesky factor with 1e-10 diagonal jitter. Throws ConvergenceError with the condition number
// when the factorization fails.
AssBracket ass_bracket_estimate(const Mixture& mix, int M, int N, const AssOptions& opts, std::uint64_t seed);

}  // namespace sphparisi
