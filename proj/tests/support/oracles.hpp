#pragma once

// Independent reference computations used only by the tests. Nothing here calls the
// quadrature or recursion code it is compared against.

#include <cstdint>
#include <functional>
#include <span>

#include "sphparisi/mixture.hpp"
#include "sphparisi/rsb.hpp"
#include "sphparisi/simulator.hpp"
#include "sphparisi/stats.hpp"

namespace oracle {

// log of the sphere average of exp(eps . s), ||s|| = r, through the modified Bessel function:
// Gamma(M/2) (2/c)^{M/2-1} I_{M/2-1}(c), c = r sqrt(M).
double logmgf_bessel(int M, double r);

// 1/2 (b - 1 - log(b - xi'(1)) - xi'(1) + xi(1)): b-objective at k = 1, q_1 = 0, beta_1 = 0.
double rs_zero_objective(const sphparisi::Mixture& mix, double b);

// Pure 2-spin optimum above the transition (sqrt(2) beta >= 1).
double pure2_value(double beta);
double pure2_overlap(double beta);

// Minimum of the b-objective over a dense log grid above d_1 followed by golden-section polish.
double dense_scan_infimum(const std::function<double(double)>& objective, double d1);

// Midpoint Riemann sum of |x1 - x2| on [0, 1].
double riemann_l1(const sphparisi::FunctionalOrderParameter& a, const sphparisi::FunctionalOrderParameter& b,
                  int points);

// Plain Monte Carlo of the finite-M functional for a one-level order parameter with
// m_1 = 1 (the RS parameter): X_0 = E_{z0} log E_{z1} exp Lambda(||z0 + z1||) with the
// inner expectation also sampled. Lambda is evaluated through logmgf_bessel. With more than
// one outer sample the O(1/inner) bias of each inner log-mean is removed to second order.
sphparisi::Estimate finite_m_mc_rs(const sphparisi::Mixture& mix, double q1, int M, long outer, long inner,
                                   std::uint64_t seed);

// Nested Monte Carlo for a two-level order parameter with m_2 = 1. The top level is collapsed
// in closed form, E_{z2} exp(eps . (s + z2)) = exp(eps . s + M delta_2 / 2); the middle
// level (1/m_1) log E_{z1} exp(m_1 X_2) is sampled with `inner` draws per outer z_0, with the
// same second-order bias correction.
sphparisi::Estimate finite_m_mc_two_level(const sphparisi::Mixture& mix, const sphparisi::FunctionalOrderParameter& f,
                                          int M, long outer, long inner, std::uint64_t seed);
// Integral of the one-coordinate density (1 - e^2/K)^{(K-3)/2} over [-sqrt(K), sqrt(K)],
// by Gauss-Legendre in the angle e = sqrt(K) sin(t).
double coordinate_marginal_mass(int K, int nodes);

// 2 (Phi(sqrt(1 + delta)) - Phi(1)): chi-square with one degree of freedom through the normal CDF.
double shell_measure_m1(double delta);

// Self-normalized importance estimate of the Gibbs mean energy from uniform sphere samples,
// with a delta-method standard error.
sphparisi::Estimate gibbs_mean_energy_reweighted(const sphparisi::Disorder& d, long samples, std::uint64_t seed);

}  // namespace oracle
