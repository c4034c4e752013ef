// Serial vs OpenMP timings for the two data-parallel kernels. Also asserts that both
// paths agree bitwise, so the quick mode doubles as a smoke test.

#include <omp.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <vector>

#include "sphparisi/finite_m.hpp"
#include "sphparisi/kernels.hpp"
#include "sphparisi/quadrature.hpp"
#include "sphparisi/simulator.hpp"
#include "sphparisi/sphere.hpp"

using namespace sphparisi;

namespace {

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double serial, double parallel, int threads, bool same) {
  std::printf("%-14s serial %9.4fs  omp(%d) %9.4fs  speedup %5.2fx  %s\n", name, serial, threads, parallel,
              serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  const int reps = quick ? 1 : 5;
  const int threads = omp_get_max_threads();
  bool all_same = true;

  {
    const int M = 32, points = quick ? 128 : 1024;
    const kernels::LogMgfExcess excess(M, 2000.0, 2048);
    std::vector<double> x, y;
    for (int i = 0; i <= 600; ++i) {
      x.push_back(0.05 * i);
      y.push_back(spherical_logmgf(M, 0.05 * i));
    }
    const MonotoneCubic next(x, y);
    kernels::LevelStep step;
    step.M = M;
    step.delta = 0.3;
    step.m = 0.6;
    step.log_norm = std::log(2.0) - 0.5 * M * std::log(2.0 * step.delta) - std::lgamma(0.5 * M);
    step.excess = &excess;
    const auto gl = gauss_legendre(64);
    step.nodes = gl.nodes;
    for (double w : gl.weights) step.log_weights.push_back(std::log(w));
    std::vector<double> radii(static_cast<std::size_t>(points)), a(radii.size()), b(radii.size());
    for (int i = 0; i < points; ++i) radii[static_cast<std::size_t>(i)] = 30.0 * i / points;
    const double ts = best_of(reps, [&] { kernels::serial::level_sweep(step, next, radii, a); });
    const double tp = best_of(reps, [&] { kernels::omp::level_sweep(step, next, radii, b); });
    report("level_sweep", ts, tp, threads, a == b);
    all_same = all_same && a == b;
  }

  {
    const int N = quick ? 12 : 24, count = quick ? 2000 : 20000;
    const auto d = sample_disorder(Mixture({{2, 1.0}, {3, 0.5}, {4, 0.3}}), N, 1);
    const auto configs = sample_sphere(N, count, 2);
    std::vector<double> a(static_cast<std::size_t>(count)), b(a.size());
    const double ts = best_of(reps, [&] { kernels::serial::batch_energy(d.tensors, N, N, configs, a); });
    const double tp = best_of(reps, [&] { kernels::omp::batch_energy(d.tensors, N, N, configs, b); });
    report("batch_energy", ts, tp, threads, a == b);
    all_same = all_same && a == b;
  }
  return all_same ? 0 : 1;
}
