#pragma once

#include <vector>

namespace sphparisi {

struct MixtureTerm {
  int p = 2;
  double beta = 0.0;
};

// xi(x) = sum_p beta_p^2 x^p with finitely many terms. The inverse temperature is
// folded into the beta_p. Immutable after construction.
class Mixture {
 public:
  Mixture() = default;
  // Terms may come in any order; throws std::invalid_argument on p < 1, repeated p,
  // or a negative / non-finite beta.
  explicit Mixture(std::vector<MixtureTerm> terms);

  [[nodiscard]] const std::vector<MixtureTerm>& terms() const { return terms_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] int max_degree() const { return terms_.empty() ? 0 : terms_.back().p; }
  // beta_p, zero when the term is absent
  [[nodiscard]] double beta(int p) const;

  // order 0, 1, 2 -> xi, xi', xi''. |x| may exceed 1 by at most 1e-12 (clamped).
  [[nodiscard]] double xi_derivative(double x, int order) const;
  [[nodiscard]] double xi(double x) const { return xi_derivative(x, 0); }
  [[nodiscard]] double xi_prime(double x) const { return xi_derivative(x, 1); }
  [[nodiscard]] double xi_second(double x) const { return xi_derivative(x, 2); }
  // theta(x) = x xi'(x) - xi(x) = sum (p - 1) beta_p^2 x^p
  [[nodiscard]] double theta(double x) const;

 private:
  std::vector<MixtureTerm> terms_;
};

// Convenience: pure p-spin with coefficient beta.
Mixture pure_mixture(int p, double beta);

}  // namespace sphparisi
