#pragma once

#include <optional>
#include <string>
#include <vector>

namespace sphparisi {

// The triplet (k, m, q): 0 = m_0 <= m_1 <= ... <= m_k = 1 and
// 0 = q_0 <= q_1 <= ... <= q_k <= q_{k+1} = 1. It encodes the step
// distribution function x(t) = m_l on [q_l, q_{l+1}), x(1) = 1.
struct FunctionalOrderParameter {
  int k = 1;
  std::vector<double> m;  // size k + 1
  std::vector<double> q;  // size k + 2

  // One-step (replica symmetric) parameter: k = 1, m = (0, 1), q = (0, q1, 1).
  static FunctionalOrderParameter replica_symmetric(double q1);

  friend bool operator==(const FunctionalOrderParameter&, const FunctionalOrderParameter&) = default;
};

struct Violation {
  std::string field;  // "k", "m" or "q"
  int index = 0;
  std::string constraint;

  [[nodiscard]] std::string describe() const;
};

// First violated invariant, or nullopt when the triplet is valid.
std::optional<Violation> validate(const FunctionalOrderParameter& f);

// Throws std::invalid_argument carrying the violation text.
void require_valid(const FunctionalOrderParameter& f);

double evaluate_cdf(const FunctionalOrderParameter& f, double t);

// Exact integral of |x1 - x2| over [0, 1] by a sweep over the merged breakpoints.
double l1_distance(const FunctionalOrderParameter& a, const FunctionalOrderParameter& b);

// H_k(q) = j/k on [j/(k+1), (j+1)/(k+1)), H_k(1) = 1.
double hk_map(int k, double q);

// Push-forward of x under H_k; levels that collide are merged keeping the larger m.
FunctionalOrderParameter discretize_hk(const FunctionalOrderParameter& f, int k);

}  // namespace sphparisi
