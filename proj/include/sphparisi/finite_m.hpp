#pragma once

#include <string>
#include <vector>

#include "sphparisi/mixture.hpp"
#include "sphparisi/rsb.hpp"

namespace sphparisi {

struct FiniteMConfig {
  int M = 16;
  int r_grid_size = 512;
  double r_max_sigmas = 6.0;
  int radial_nodes = 64;  // Gauss-Legendre nodes per radial integral
  int scan_points = 64;   // peak-locating scan per radial integral
  int max_k = 3;          // cost guard

  void validate() const;  // throws std::invalid_argument
};

struct LevelSummary {
  int level = 0;
  double delta = 0.0;
  double m = 0.0;
  double r_max = 0.0;
  double g_at_zero = 0.0;  // G_level(0) / M
};

struct FiniteMResult {
  double x0 = 0.0;      // X_0^M / M
  double x0_raw = 0.0;  // X_0^M
  double pm = 0.0;      // x0 - 1/2 sum m_p (theta(q_{p+1}) - theta(q_p))
  double error_estimate = 0.0;
  std::vector<LevelSummary> per_level_grids;
  std::string warning;  // non-empty when the refinement disagreement is large
};

// Lambda_M(r) = log of the average of exp(eps . s) over the radius-sqrt(M) sphere, ||s|| = r.
// Evaluated through the single-coordinate density (1 - t^2/M)^{(M-3)/2} with t = sqrt(M) cos(phi),
// by Gauss-Legendre in phi on a window around the peak of the integrand, in log space.
double spherical_logmgf(int M, double r);

// Finite-M Parisi functional by the radial recursion: because the z_p have i.i.d.
// coordinates, X_{p+1} depends on z_0..z_p only through r = ||z_0 + ... + z_p||, so each
// level is a one-dimensional integral against the noncentral chi density of the new radius,
// evaluated on an r-grid.
// error_estimate is the change against a run with half the grid and half the nodes.
// Throws ResourceGuardError when f.k > cfg.max_k.
FiniteMResult pm_value(const Mixture& mix, const FunctionalOrderParameter& f, const FiniteMConfig& cfg);

struct LipschitzGap {
  double lhs = 0.0;  // |P_M(f1) - P_M(f2)|
  double rhs = 0.0;  // xi'(1)/2 * d(f1, f2)
  double error_estimate = 0.0;  // sum of both error estimates
};

LipschitzGap lipschitz_gap(const Mixture& mix, const FunctionalOrderParameter& f1,
                           const FunctionalOrderParameter& f2, const FiniteMConfig& cfg);

}  // namespace sphparisi
