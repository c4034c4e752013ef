#include <omp.h>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "sphparisi/finite_m.hpp"
#include "sphparisi/kernels.hpp"
#include "sphparisi/quadrature.hpp"
#include "sphparisi/rng.hpp"
#include "sphparisi/simulator.hpp"
#include "sphparisi/sphere.hpp"

using namespace sphparisi;

namespace {
kernels::LevelStep step_for(int M, double delta, double m, const kernels::LogMgfExcess& excess) {
  kernels::LevelStep s;
  s.M = M;
  s.delta = delta;
  s.m = m;
  s.log_norm = std::log(2.0) - 0.5 * M * std::log(2.0 * delta) - std::lgamma(0.5 * M);
  s.excess = &excess;
  const auto gl = gauss_legendre(48);
  s.nodes = gl.nodes;
  for (double w : gl.weights) s.log_weights.push_back(std::log(w));
  return s;
}
}  // namespace

TEST_CASE("log-mgf excess table agrees with direct evaluation") {
  for (int M : {2, 16, 64}) {
    const kernels::LogMgfExcess excess(M, 50.0, 2048);
    for (double x : {0.0, 0.01, 0.7, 5.0, 49.0, 80.0}) {
      const double direct = spherical_logmgf(M, x) - std::sqrt(static_cast<double>(M)) * x;
      CHECK(std::abs(excess(x) - direct) < 1e-9 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST_CASE("level step integrates a constant and a quadratic") {
  const int M = 8;
  const double delta = 0.7;
  const kernels::LogMgfExcess excess(M, 200.0, 2048);
  std::vector<double> x, c, q;
  for (int i = 0; i <= 400; ++i) {
    x.push_back(0.05 * i);
    c.push_back(3.0);
    q.push_back(0.05 * i * 0.05 * i);
  }
  const MonotoneCubic constant(x, c), square(x, q);
  std::vector<double> scratch;
  for (double m : {0.0, 0.5, 1.0}) {
    const auto s = step_for(M, delta, m, excess);
    CHECK(kernels::level_point(s, constant, 1.3, scratch) == doctest::Approx(3.0).epsilon(1e-10));
  }
  // E ||r e1 + z||^2 = r^2 + M delta
  const auto s0 = step_for(M, delta, 0.0, excess);
  CHECK(kernels::level_point(s0, square, 1.3, scratch) == doctest::Approx(1.69 + M * delta).epsilon(1e-6));
}

TEST_CASE("OpenMP kernels match the serial reference bitwise") {
  const int M = 16;
  const kernels::LogMgfExcess excess(M, 400.0, 2048);
  std::vector<double> x, y;
  for (int i = 0; i <= 300; ++i) {
    x.push_back(0.1 * i);
    y.push_back(spherical_logmgf(M, 0.1 * i));
  }
  const MonotoneCubic next(x, y);
  std::vector<double> radii;
  for (int i = 0; i < 257; ++i) radii.push_back(0.1 * i);
  const auto s = step_for(M, 0.4, 0.6, excess);
  std::vector<double> ref(radii.size()), par(radii.size());
  kernels::serial::level_sweep(s, next, radii, ref);
  for (int threads : {1, 2, 3}) {
    omp_set_num_threads(threads);
    kernels::omp::level_sweep(s, next, radii, par);
    CHECK(ref == par);
  }

  const auto d = sample_disorder(Mixture({{1, 0.3}, {2, 1.0}, {3, 0.5}}), 9, 42);
  const auto configs = sample_sphere(9, 301, 5);
  std::vector<double> e_ref(301), e_par(301);
  kernels::serial::batch_energy(d.tensors, 9, 9.0, configs, e_ref);
  for (int threads : {1, 2, 4}) {
    omp_set_num_threads(threads);
    kernels::omp::batch_energy(d.tensors, 9, 9.0, configs, e_par);
    CHECK(e_ref == e_par);
  }
  omp_set_num_threads(1);
  for (std::size_t i = 0; i < 301; ++i)
    CHECK(e_ref[i] == hamiltonian(d, std::span<const double>(configs).subspan(i * 9, 9), 9));
}
