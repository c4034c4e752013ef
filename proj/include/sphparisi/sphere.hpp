#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sphparisi/mixture.hpp"
#include "sphparisi/stats.hpp"

namespace sphparisi {

// Shell A_delta = {eps in R^M : M <= ||eps||^2 <= M(1 + delta)}.
struct ShellSpec {
  int M = 1;
  double delta = 0.1;

  void validate() const;  // throws DomainError
};

// Rescale x onto the sphere of radius sqrt(x.size()).
void project_to_sphere(std::span<double> x);

// `count` uniform points on the radius-sqrt(N) sphere, row-major. Row i is drawn from its own
// stream derive_seed(seed, {i}), so output does not depend on the thread count.
std::vector<double> sample_sphere(int N, int count, std::uint64_t seed);

// log b_{M,N}: product over j = 1..M of |S_{K-1}| / (|S_K| sqrt(K)), K = M + N + 1 - j,
// with |S_K| the area of the unit sphere in R^K.
double log_coordinate_normalizer(int M, int N);

struct CoordinateDensity {
  double density = 0.0;
  std::vector<double> scale;  // a_1 .. a_{M+1}; a_1 = 1
};

// Joint density of the last M coordinates of a uniform point on S_{M+N} taken in sequence,
//   F(eps) = b_{M,N} prod_j (1 - eps_j^2 / K_j)^{(K_j - 3)/2},  K_j = M + N + 1 - j,
// and the factors a_l = prod_{j<l} sqrt(1 + (1 - eps_j^2)/(M + N - j)) that put the
// remaining coordinates back on their spheres. Throws DomainError outside the box.
CoordinateDensity coordinate_density(int M, int N, std::span<const double> eps);

struct DecompositionCheck {
  double lhs = 0.0;  // mean of f over uniform S_{M+N}
  double rhs = 0.0;  // mean of F-weighted f(sigma a_{M+1}, eps_1 a_1, ..., eps_M a_M)
  double std_error = 0.0;  // combined
};

// Both sides of the coordinate decomposition by independent Monte Carlo. The rhs draws each
// eps_j from its own normalized marginal (a scaled symmetric Beta) and weights by F over the
// product of marginals, so F's normalization enters the estimate.
DecompositionCheck decomposition_check(int M, int N, const std::function<double(std::span<const double>)>& f,
                                       long samples, std::uint64_t seed);

// nu_M(A_delta) = P(M <= chi^2_M <= M(1 + delta)).
double shell_measure(const ShellSpec& s);

// -delta xi'(1) + log(nu_M(A_delta)) / M
double ass_correction(const ShellSpec& s, const Mixture& mix);

// Monte Carlo of int_{A_delta} exp(eps . z) d nu_M by rejection from N(0, I_M).
Estimate shell_integral_mc(const ShellSpec& s, std::span<const double> z, long samples, std::uint64_t seed);

}  // namespace sphparisi
