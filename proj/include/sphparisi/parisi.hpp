#pragma once

#include <utility>
#include <vector>

#include "sphparisi/mixture.hpp"
#include "sphparisi/rsb.hpp"

namespace sphparisi {

struct ParisiEvaluation {
  double value = 0.0;   // P(x) = inf over b > d_1 of the b-objective
  double b_star = 0.0;  // minimizer
  std::vector<double> d;  // d_1 .. d_k
  std::pair<double, double> bracket{0.0, 0.0};
  int iterations = 0;
  double derivative_at_b_star = 0.0;
};

// d_l = sum_{l <= p <= k} m_p (xi'(q_{p+1}) - xi'(q_p)), l = 1..k.
std::vector<double> cascade_depths(const Mixture& mix, const FunctionalOrderParameter& f);

// The bracketed expression whose infimum over b > d_1 defines P(x).
double objective_at_b(const Mixture& mix, const FunctionalOrderParameter& f, double b);

// Analytic d/db of objective_at_b.
double objective_derivative_at_b(const Mixture& mix, const FunctionalOrderParameter& f, double b);

// Minimizes the b-objective: derivative-sign bracketing from just above d_1 with geometric
// expansion, Brent refinement, and a 64-point log-spaced scan that catches additional
// local minima. Throws ConvergenceError when no bracket exists below d_1 + 1e12.
ParisiEvaluation infimum_over_b(const Mixture& mix, const FunctionalOrderParameter& f);

// Shorthand for infimum_over_b(...).value.
double parisi_value(const Mixture& mix, const FunctionalOrderParameter& f);

}  // namespace sphparisi
