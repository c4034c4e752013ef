#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "sphparisi/error.hpp"
#include "sphparisi/mixture.hpp"
#include "sphparisi/rng.hpp"

using namespace sphparisi;

TEST_CASE("mixture values and derivatives") {
  const Mixture zero;
  CHECK(zero.xi(0.7) == 0.0);
  const Mixture two({{2, 1.0}});
  CHECK(two.xi(0.5) == 0.25);
  CHECK(two.xi_prime(0.5) == 1.0);
  CHECK(two.xi_second(0.5) == 2.0);
  const Mixture mixed({{3, 0.5}, {2, 1.0}});
  CHECK(mixed.xi_prime(1.0) == doctest::Approx(2.75).epsilon(1e-15));
  CHECK(mixed.terms().front().p == 2);
}

TEST_CASE("theta") {
  CHECK(Mixture({{2, 1.0}}).theta(0.5) == doctest::Approx(0.25));
  CHECK(Mixture({{3, 1.0}}).theta(1.0) == doctest::Approx(2.0));
  CHECK(Mixture({{1, 0.7}, {4, 0.3}}).theta(0.0) == 0.0);
}

TEST_CASE("construction and domain errors") {
  CHECK_THROWS_AS(Mixture({{0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Mixture({{2, -1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(Mixture({{2, 1.0}, {2, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(Mixture({{2, NAN}}), std::invalid_argument);
  const Mixture m({{2, 1.0}});
  CHECK_THROWS_AS(static_cast<void>(m.xi(1.1)), DomainError);
  CHECK_THROWS_AS(static_cast<void>(m.xi_derivative(0.5, 3)), DomainError);
  CHECK(m.xi(1.0 + 5e-13) == doctest::Approx(1.0));  // round-off overshoot is clamped
}

namespace {
Mixture random_mixture(Rng& rng) {
  std::vector<MixtureTerm> t;
  for (int p = 1; p <= 6; ++p) {
    if (rng.uniform() < 0.6) t.push_back({p, rng.uniform() * 1.5});
  }
  return Mixture(t);
}
}  // namespace

TEST_CASE("properties on random mixtures: monotone, theta identity, finite differences") {
  Rng rng(42);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_mixture(rng);
    double prev[4] = {-1, -1, -1, -1};
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      const double v[4] = {m.xi(x), m.xi_prime(x), m.xi_second(x), m.theta(x)};
      for (int j = 0; j < 4; ++j) {
        CHECK(v[j] >= prev[j] - 1e-15);
        prev[j] = v[j];
      }
      CHECK(std::abs(x * m.xi_prime(x) - m.xi(x) - m.theta(x)) <= 1e-14 * std::max(1.0, m.xi_prime(1.0)));
    }
    const double h = 1e-5;
    for (int i = 1; i < 20; ++i) {
      const double x = i / 20.0;
      const double fd = (m.xi(x + h) - m.xi(x - h)) / (2 * h);
      CHECK(std::abs(fd - m.xi_prime(x)) <= 1e-8 * std::max(1.0, m.xi_prime(1.0)));
    }
    CHECK(m.theta(0.0) == 0.0);
    CHECK(m.xi_prime(0.0) == doctest::Approx(m.beta(1) * m.beta(1)));
  }
}
