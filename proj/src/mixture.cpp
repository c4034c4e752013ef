#include "sphparisi/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "sphparisi/error.hpp"
#include "sphparisi/numerics.hpp"

namespace sphparisi {

namespace {

constexpr double kClampSlack = 1e-12;

double checked_overlap(double x) {
  if (!std::isfinite(x) || std::abs(x) > 1.0 + kClampSlack) {
    throw DomainError("overlap argument outside [-1, 1]: " + std::to_string(x));
  }
  return std::clamp(x, -1.0, 1.0);
}

double int_pow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

}  // namespace

Mixture::Mixture(std::vector<MixtureTerm> terms) : terms_(std::move(terms)) {
  std::sort(terms_.begin(), terms_.end(), [](const auto& a, const auto& b) { return a.p < b.p; });
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const auto& t = terms_[i];
    if (t.p < 1) throw std::invalid_argument("mixture: p must be >= 1");
    if (!std::isfinite(t.beta) || t.beta < 0.0) {
      throw std::invalid_argument("mixture: beta_" + std::to_string(t.p) + " must be finite and >= 0");
    }
    if (i > 0 && terms_[i - 1].p == t.p) {
      throw std::invalid_argument("mixture: duplicate p = " + std::to_string(t.p));
    }
    if (!std::isfinite(std::ldexp(t.beta * t.beta, t.p))) {
      throw std::invalid_argument("mixture: 2^p beta_p^2 overflows");
    }
  }
}

double Mixture::beta(int p) const {
  for (const auto& t : terms_) {
    if (t.p == p) return t.beta;
  }
  return 0.0;
}

double Mixture::xi_derivative(double x, int order) const {
  if (order < 0 || order > 2) throw DomainError("xi_derivative: order must be 0, 1 or 2");
  x = checked_overlap(x);
  CompensatedSum s;
  for (const auto& t : terms_) {
    const double b2 = t.beta * t.beta;
    switch (order) {
      case 0:
        s.add(b2 * int_pow(x, t.p));
        break;
      case 1:
        s.add(b2 * t.p * int_pow(x, t.p - 1));
        break;
      default:
        if (t.p >= 2) s.add(b2 * t.p * (t.p - 1) * int_pow(x, t.p - 2));
        break;
    }
  }
  return s.value();
}

double Mixture::theta(double x) const {
  x = checked_overlap(x);
  CompensatedSum s;
  for (const auto& t : terms_) s.add((t.p - 1) * t.beta * t.beta * int_pow(x, t.p));
  return s.value();
}

Mixture pure_mixture(int p, double beta) { return Mixture({{p, beta}}); }

}  // namespace sphparisi
