#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "sphparisi/error.hpp"
#include "sphparisi/optimizer.hpp"
#include "sphparisi/rng.hpp"
#include "sphparisi/rsb.hpp"

using namespace sphparisi;

namespace {
FunctionalOrderParameter random_fop(Rng& rng, int k) {
  FunctionalOrderParameter f;
  f.k = k;
  f.m.push_back(0.0);
  for (int i = 1; i < k; ++i) f.m.push_back(rng.uniform());
  f.m.push_back(1.0);
  f.q.push_back(0.0);
  for (int i = 1; i <= k; ++i) f.q.push_back(rng.uniform());
  f.q.push_back(1.0);
  std::sort(f.m.begin(), f.m.end());
  std::sort(f.q.begin(), f.q.end());
  return f;
}
}  // namespace

TEST_CASE("validate reports the first violated constraint") {
  CHECK_FALSE(validate({1, {0, 1}, {0, 0.3, 1}}).has_value());
  const auto v1 = validate({1, {0, 0.5}, {0, 0.3, 1}});
  REQUIRE(v1.has_value());
  CHECK(v1->field == "m");
  CHECK(v1->index == 1);
  const auto v2 = validate({2, {0, 0.6, 1}, {0, 0.5, 0.2, 1}});
  REQUIRE(v2.has_value());
  CHECK(v2->field == "q");
  CHECK(v2->index == 2);
  CHECK(v2->describe().find("nondecreasing") != std::string::npos);
}

TEST_CASE("step function evaluation") {
  const auto f = FunctionalOrderParameter::replica_symmetric(0.4);
  CHECK(evaluate_cdf(f, 0.2) == 0.0);
  CHECK(evaluate_cdf(f, 0.4) == 1.0);
  CHECK(evaluate_cdf(f, 1.0) == 1.0);
  CHECK_THROWS_AS(evaluate_cdf(f, 1.5), DomainError);
}

TEST_CASE("l1 distance: exact values, Riemann oracle, pseudometric") {
  const auto a = FunctionalOrderParameter::replica_symmetric(0.4);
  const auto b = FunctionalOrderParameter::replica_symmetric(0.6);
  CHECK(l1_distance(a, a) == 0.0);
  CHECK(l1_distance(a, b) == doctest::Approx(0.2).epsilon(1e-15));
  Rng rng(9);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_fop(rng, 1 + t % 3), g = random_fop(rng, 1 + (t + 1) % 3), h = random_fop(rng, 2);
    CHECK(std::abs(l1_distance(f, g) - oracle::riemann_l1(f, g, 1000000)) < 1e-5);
    CHECK(l1_distance(f, g) == l1_distance(g, f));
    CHECK(l1_distance(f, h) <= l1_distance(f, g) + l1_distance(g, h) + 1e-12);
  }
}

TEST_CASE("H_k map and discretization") {
  for (int k : {1, 2, 5, 10}) {
    CHECK(hk_map(k, 1.0) == 1.0);
    double sup = 0.0;
    for (int i = 0; i <= 10000; ++i) sup = std::max(sup, std::abs(hk_map(k, i / 10000.0) - i / 10000.0));
    CHECK(sup <= 1.0 / k + 1e-15);
  }
  CHECK(hk_map(2, 0.5) == 0.5);
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto f = random_fop(rng, 1 + t % 3);
    for (int k : {1, 2, 5, 10}) {
      const auto g = discretize_hk(f, k);
      CHECK_FALSE(validate(g).has_value());
      CHECK(l1_distance(f, g) <= 1.0 / k + 1e-12);
    }
  }
}

TEST_CASE("degenerate levels leave the step function unchanged") {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const auto f = random_fop(rng, 2);
    for (int level = 1; level <= f.k; ++level) {
      const auto g = split_level(f, level);
      CHECK(g.k == f.k + 1);
      for (int i = 0; i <= 200; ++i) CHECK(evaluate_cdf(f, i / 200.0) == evaluate_cdf(g, i / 200.0));
    }
  }
}
