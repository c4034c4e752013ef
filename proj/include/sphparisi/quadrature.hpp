#pragma once

#include <vector>

namespace sphparisi {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre on [-1, 1]; weights sum to 2.
QuadratureRule gauss_legendre(int n);

// Probabilists' Gauss-Hermite: sum_i w_i f(x_i) ~ E f(Z), Z ~ N(0, 1).
QuadratureRule gauss_hermite(int n);

}  // namespace sphparisi
