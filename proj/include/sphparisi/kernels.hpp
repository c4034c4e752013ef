#pragma once

// Data-parallel inner loops. Each kernel has a serial reference in kernels::serial and an
// OpenMP version in kernels::omp; both produce bitwise-identical output for any thread
// count (every output element is computed by one thread in a fixed order).

#include <cstddef>
#include <span>
#include <vector>

#include "sphparisi/numerics.hpp"

namespace sphparisi {

// Dense coupling tensor of one p-spin term, row-major with the last index fastest.
struct CouplingTensor {
  int p = 2;
  double beta = 0.0;
  std::vector<double> g;  // N^p entries
};

namespace kernels {

// Lambda_M(x) - sqrt(M) x, tabulated on [0, x_max] and evaluated directly beyond.
class LogMgfExcess {
 public:
  LogMgfExcess(int M, double x_max, int size);
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] int dimension() const { return M_; }

 private:
  int M_ = 1;
  double x_max_ = 0.0;
  MonotoneCubic table_;
};

// One descending step of the radial finite-M recursion:
//   G_p(r) = (1/m) log E exp(m G_{p+1}(||r e_1 + z||)),  z ~ N(0, delta I_M),
// m = 0 meaning a plain expectation. rho = ||r e_1 + z|| has the noncentral chi density
//   f(rho) = C rho^{M-1} exp(-(rho - r)^2 / (2 delta)) exp(E(rho r / (delta sqrt(M))))
// with E the log-mgf excess above, so each point is a 1-D integral over rho: a scan locates
// the peak of m G + log f and Gauss-Legendre integrates the window where it is within e^-40.
struct LevelStep {
  int M = 1;
  double delta = 0.0;
  double m = 0.0;
  double log_norm = 0.0;            // log C
  const LogMgfExcess* excess = nullptr;
  std::vector<double> nodes;        // Gauss-Legendre on [-1, 1]
  std::vector<double> log_weights;
  int scan_points = 64;
};

double level_point(const LevelStep& step, const MonotoneCubic& next, double r, std::vector<double>& scratch);

// sum_tuples g_{i1..ip} x_{i1}...x_{ip}, no normalization and no norm check
double contract(const CouplingTensor& t, int n, std::span<const double> x, std::vector<double>& scratch);

// sum_p beta_p scaling^{-(p-1)/2} contract(...) for `count` row-major configurations
namespace serial {
void level_sweep(const LevelStep& step, const MonotoneCubic& next, std::span<const double> radii,
                 std::span<double> out);
void batch_energy(std::span<const CouplingTensor> tensors, int n, double scaling,
                  std::span<const double> configs, std::span<double> out);
}  // namespace serial

namespace omp {
void level_sweep(const LevelStep& step, const MonotoneCubic& next, std::span<const double> radii,
                 std::span<double> out);
void batch_energy(std::span<const CouplingTensor> tensors, int n, double scaling,
                  std::span<const double> configs, std::span<double> out);
}  // namespace omp

}  // namespace kernels
}  // namespace sphparisi
