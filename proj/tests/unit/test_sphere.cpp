#include <omp.h>

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sphparisi/error.hpp"
#include "sphparisi/finite_m.hpp"
#include "sphparisi/rng.hpp"
#include "sphparisi/simulator.hpp"
#include "sphparisi/sphere.hpp"
#include "sphparisi/stats.hpp"

using namespace sphparisi;

TEST_CASE("uniform sphere sampling") {
  const auto one = sample_sphere(1, 10000, 3);
  long plus = 0;
  for (double v : one) {
    CHECK(std::abs(v) == 1.0);
    plus += v > 0;
  }
  CHECK(plus >= 4500);
  CHECK(plus <= 5500);

  const int N = 50, pairs = 10000;
  const auto pts = sample_sphere(N, 2 * pairs, 11);
  RunningMoments r2;
  for (int i = 0; i < pairs; ++i) {
    const std::span<const double> all(pts);
    const double r = overlap(all.subspan(2 * i * N, N), all.subspan((2 * i + 1) * N, N));
    r2.add(r * r);
  }
  const auto est = r2.mean_estimate();
  CHECK(std::abs(est.value - 1.0 / N) < 3.0 * est.std_error);
  for (int i = 0; i < 2 * pairs; i += 97) {
    double s = 0.0;
    for (int c = 0; c < N; ++c) s += pts[static_cast<std::size_t>(i * N + c)] * pts[static_cast<std::size_t>(i * N + c)];
    CHECK(std::abs(s - N) < 1e-10 * N);
  }

  omp_set_num_threads(3);
  const auto again = sample_sphere(N, 2 * pairs, 11);
  omp_set_num_threads(1);
  CHECK(again == pts);
}

TEST_CASE("coordinate density examples") {
  const std::vector<double> e{1.0, 0.4, -0.2};
  const auto cd = coordinate_density(3, 5, e);
  CHECK(cd.scale[0] == 1.0);
  CHECK(cd.scale[1] == 1.0);
  CHECK(cd.scale.size() == 4);
  CHECK(cd.density > 0.0);
  CHECK_THROWS_AS(coordinate_density(1, 4, std::vector<double>{2.5}), DomainError);

  // one coordinate: the density is the marginal itself
  const double k = 5.0;
  const double mass = oracle::coordinate_marginal_mass(5, 64);
  const auto at = coordinate_density(1, 4, std::vector<double>{0.7});
  CHECK(at.density == doctest::Approx(std::pow(1.0 - 0.49 / k, 1.0) / mass).epsilon(1e-10));

  const std::vector<double> g{0.5, -0.3};
  const double gauss = std::exp(-0.5 * (0.25 + 0.09)) / (2.0 * std::numbers::pi);
  CHECK(std::abs(coordinate_density(2, 10000, g).density / gauss - 1.0) < 1e-3);
}

TEST_CASE("normalization for all small M + N") {
  for (int total = 3; total <= 12; ++total) {
    for (int M = 1; M < total; ++M) {
      const int N = total - M;
      double log_mass = 0.0;
      for (int j = 1; j <= M; ++j) log_mass += std::log(oracle::coordinate_marginal_mass(M + N + 1 - j, 64));
      CHECK(std::abs(log_coordinate_normalizer(M, N) + log_mass) < 1e-8);
    }
  }
}

TEST_CASE("decomposition identity") {
  const auto one = decomposition_check(2, 3, [](std::span<const double>) { return 1.0; }, 20000, 1);
  CHECK(one.lhs == 1.0);
  CHECK(std::abs(one.rhs - 1.0) < 1e-10);

  const auto ex = decomposition_check(2, 3, [](std::span<const double> r) { return std::exp(0.5 * r[0]); }, 200000, 2);
  CHECK(std::abs(ex.lhs - ex.rhs) < 3.0 * ex.std_error);

  const auto sq = decomposition_check(1, 2, [](std::span<const double> r) { return r[2] * r[2]; }, 200000, 3);
  CHECK(std::abs(sq.rhs - 1.0) < 3.0 * sq.std_error);
  CHECK(std::abs(sq.lhs - 1.0) < 3.0 * sq.std_error);
}

TEST_CASE("shell measure") {
  CHECK(shell_measure({2, 0.1}) == doctest::Approx(std::exp(-1.0) - std::exp(-1.1)).epsilon(1e-12));
  CHECK(std::abs(shell_measure({2, 0.1}) - 0.0350083575) < 1e-9);
  CHECK(shell_measure({2, 1e-8}) < 1e-6);
  CHECK(shell_measure({2, 1e-8}) == doctest::Approx(std::exp(-1.0) * 1e-8).epsilon(1e-6));
  CHECK(shell_measure({2, 1e6}) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(shell_measure({1, 0.1}) == doctest::Approx(oracle::shell_measure_m1(0.1)).epsilon(1e-12));
  CHECK(shell_measure({7, 0.01 - 1e-12}) == doctest::Approx(shell_measure({7, 0.01})).epsilon(1e-9));
  CHECK_THROWS_AS(shell_measure({2, 0.0}), DomainError);
  CHECK_THROWS_AS(shell_measure({0, 0.1}), DomainError);
  double prev = 0.0;
  for (double d : {1e-3, 5e-3, 9.99e-3, 1e-2, 0.1, 1.0}) {
    const double v = shell_measure({5, d});
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("correction term") {
  CHECK(ass_correction({2, 0.1}, Mixture()) == doctest::Approx(0.5 * std::log(0.0350083575)).epsilon(1e-9));
  CHECK(ass_correction({2, 0.1}, Mixture()) == doctest::Approx(-1.676082).epsilon(1e-6));
  CHECK(ass_correction({1, 0.1}, Mixture()) == doctest::Approx(std::log(oracle::shell_measure_m1(0.1))).epsilon(1e-12));
  const auto mix = pure_mixture(2, 1.0);
  const double c10 = ass_correction({10, 0.1}, mix), c100 = ass_correction({100, 0.1}, mix),
               c1000 = ass_correction({1000, 0.1}, mix);
  CHECK(c10 < c100);
  CHECK(c100 < c1000);
  CHECK(c1000 < -0.2);
}

TEST_CASE("shell inequality against the full log-mgf") {
  Rng rng(77);
  int idx = 0;
  for (int M : {2, 5, 10}) {
    for (int t = 0; t < 7; ++t, ++idx) {
      std::vector<double> z(static_cast<std::size_t>(M));
      for (double& v : z) v = 0.4 * rng.normal();
      double r = 0.0;
      for (double v : z) r += v * v;
      const ShellSpec s{M, 0.1};
      const auto mc = shell_integral_mc(s, z, 100000, derive_seed(5, {static_cast<std::uint64_t>(idx)}));
      CHECK(mc.value >= shell_measure(s) * std::exp(spherical_logmgf(M, std::sqrt(r))) - 3.0 * mc.std_error);
    }
  }
}
