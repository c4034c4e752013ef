#include "sphparisi/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace sphparisi {

namespace {

// Golub-Welsch: nodes are eigenvalues of the Jacobi matrix, weights mu0 * v_0^2.
QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw std::runtime_error("golub_welsch: eigensolver failed");
  const auto n = diag.size();
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    rule.weights[static_cast<std::size_t>(i)] = mu0 * v0 * v0;
  }
  return rule;
}

void require_nodes(int n) {
  if (n < 1) throw std::invalid_argument("quadrature rule needs at least one node");
}

}  // namespace

QuadratureRule gauss_legendre(int n) {
  require_nodes(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) off(i - 1) = i / std::sqrt(4.0 * i * i - 1.0);
  return golub_welsch(diag, off, 2.0);
}

QuadratureRule gauss_hermite(int n) {
  require_nodes(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(static_cast<double>(i));
  auto rule = golub_welsch(diag, off, 1.0);
  // symmetrize to kill eigensolver round-off in the odd moments
  const std::size_t m = rule.nodes.size();
  for (std::size_t i = 0; i < m / 2; ++i) {
    const double x = 0.5 * (rule.nodes[m - 1 - i] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[m - 1 - i] + rule.weights[i]);
    rule.nodes[i] = -x;
    rule.nodes[m - 1 - i] = x;
    rule.weights[i] = rule.weights[m - 1 - i] = w;
  }
  if (m % 2 == 1) rule.nodes[m / 2] = 0.0;
  return rule;
}

}  // namespace sphparisi
