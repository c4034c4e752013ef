#include "oracles.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "sphparisi/quadrature.hpp"
#include "sphparisi/rng.hpp"
#include "sphparisi/sphere.hpp"

namespace oracle {

double logmgf_bessel(int M, double r) {
  if (r == 0.0) return 0.0;
  if (M == 1) return std::log(std::cosh(r));
  const double c = r * std::sqrt(static_cast<double>(M)), nu = 0.5 * M - 1.0;
  // scale out e^c so that large arguments do not overflow
  const double scaled = boost::math::cyl_bessel_i(nu, c) * std::exp(-c);
  return std::lgamma(nu + 1.0) + nu * std::log(2.0 / c) + std::log(scaled) + c;
}

double rs_zero_objective(const sphparisi::Mixture& mix, double b) {
  const double xp = mix.xi_prime(1.0);
  return 0.5 * (b - 1.0 - std::log(b - xp) - xp + mix.xi(1.0));
}

double pure2_value(double beta) {
  const double s = std::sqrt(2.0) * beta;
  return s - 0.75 - 0.5 * std::log(s);
}

double pure2_overlap(double beta) { return 1.0 - 1.0 / (std::sqrt(2.0) * beta); }

double dense_scan_infimum(const std::function<double(double)>& objective, double d1) {
  const int n = 20000;
  double best_t = 0.0, best = objective(d1 + 1e-9);
  for (int i = 0; i <= n; ++i) {
    const double t = -9.0 + 15.0 * i / n;  // offsets 1e-9 .. 1e6 above d1
    const double v = objective(d1 + std::pow(10.0, t));
    if (v < best) {
      best = v;
      best_t = t;
    }
  }
  double lo = best_t - 15.0 / n, hi = best_t + 15.0 / n;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
    if (objective(d1 + std::pow(10.0, a)) < objective(d1 + std::pow(10.0, b))) {
      hi = b;
    } else {
      lo = a;
    }
  }
  return std::min(best, objective(d1 + std::pow(10.0, 0.5 * (lo + hi))));
}

double riemann_l1(const sphparisi::FunctionalOrderParameter& a, const sphparisi::FunctionalOrderParameter& b,
                  int points) {
  auto step = [](const sphparisi::FunctionalOrderParameter& f, double t) {
    double v = f.m[0];
    for (int l = 0; l <= f.k; ++l) {
      if (f.q[static_cast<std::size_t>(l)] <= t) v = f.m[static_cast<std::size_t>(l)];
    }
    return v;
  };
  double s = 0.0;
  for (int i = 0; i < points; ++i) {
    const double t = (i + 0.5) / points;
    s += std::abs(step(a, t) - step(b, t));
  }
  return s / points;
}

sphparisi::Estimate finite_m_mc_rs(const sphparisi::Mixture& mix, double q1, int M, long outer, long inner,
                                   std::uint64_t seed) {
  const double sd0 = std::sqrt(mix.xi_prime(q1)), sd1 = std::sqrt(mix.xi_prime(1.0) - mix.xi_prime(q1));
  const auto m = static_cast<std::size_t>(M);
  sphparisi::RunningMoments outer_values;
  std::vector<double> z0(m), lam(static_cast<std::size_t>(inner));
  sphparisi::Rng rng(seed);
  // with one outer sample the delta-method error of the inner log-mean is the error
  double inner_var_term = 0.0;
  for (long o = 0; o < outer; ++o) {
    for (double& v : z0) v = sd0 * rng.normal();
    for (long i = 0; i < inner; ++i) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        const double v = z0[c] + sd1 * rng.normal();
        r2 += v * v;
      }
      lam[static_cast<std::size_t>(i)] = logmgf_bessel(M, std::sqrt(r2));
    }
    const double mx = *std::max_element(lam.begin(), lam.end());
    sphparisi::RunningMoments w;
    for (double l : lam) w.add(std::exp(l - mx));
    // second-order correction of the log-of-mean bias
    const double rel_var = w.variance() / (static_cast<double>(inner) * w.mean() * w.mean());
    outer_values.add(mx + std::log(w.mean()) + (outer == 1 ? 0.0 : 0.5 * rel_var));
    inner_var_term += w.variance() / (static_cast<double>(inner) * w.mean() * w.mean());
  }
  const double theta_term = 0.5 * (mix.theta(1.0) - mix.theta(q1));
  const auto est = outer_values.mean_estimate();
  double var = est.std_error * est.std_error;
  if (outer == 1) var = inner_var_term;
  return {est.value / M - theta_term, std::sqrt(var) / M};
}

sphparisi::Estimate finite_m_mc_two_level(const sphparisi::Mixture& mix, const sphparisi::FunctionalOrderParameter& f,
                                          int M, long outer, long inner, std::uint64_t seed) {
  const double m1 = f.m[1];
  const double d0 = mix.xi_prime(f.q[1]), d1 = mix.xi_prime(f.q[2]) - d0, d2 = mix.xi_prime(1.0) - mix.xi_prime(f.q[2]);
  const auto dim = static_cast<std::size_t>(M);
  std::vector<double> z0(dim), vals(static_cast<std::size_t>(inner));
  sphparisi::Rng rng(seed);
  sphparisi::RunningMoments outer_values;
  for (long o = 0; o < outer; ++o) {
    for (double& v : z0) v = std::sqrt(d0) * rng.normal();
    for (long i = 0; i < inner; ++i) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double v = z0[c] + std::sqrt(d1) * rng.normal();
        r2 += v * v;
      }
      vals[static_cast<std::size_t>(i)] = m1 * (logmgf_bessel(M, std::sqrt(r2)) + 0.5 * M * d2);
    }
    const double mx = *std::max_element(vals.begin(), vals.end());
    sphparisi::RunningMoments w;
    for (double v : vals) w.add(std::exp(v - mx));
    const double rel_var = w.variance() / (static_cast<double>(inner) * w.mean() * w.mean());
    outer_values.add((mx + std::log(w.mean()) + 0.5 * rel_var) / m1);
  }
  double theta = 0.0;
  for (int l = 1; l <= f.k; ++l) {
    const auto u = static_cast<std::size_t>(l);
    theta += f.m[u] * (mix.theta(f.q[u + 1]) - mix.theta(f.q[u]));
  }
  const auto est = outer_values.mean_estimate();
  return {est.value / M - 0.5 * theta, est.std_error / M};
}

double coordinate_marginal_mass(int K, int nodes) {
  const auto rule = sphparisi::gauss_legendre(nodes);
  const double half = 0.5 * std::numbers::pi;
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = half * rule.nodes[i];
    s += rule.weights[i] * half * std::sqrt(static_cast<double>(K)) * std::pow(std::cos(t), K - 2);
  }
  return s;
}

double shell_measure_m1(double delta) {
  const boost::math::normal_distribution<double> n;
  return 2.0 * (boost::math::cdf(n, std::sqrt(1.0 + delta)) - boost::math::cdf(n, 1.0));
}

sphparisi::Estimate gibbs_mean_energy_reweighted(const sphparisi::Disorder& d, long samples, std::uint64_t seed) {
  sphparisi::Rng rng(seed);
  std::vector<double> x(static_cast<std::size_t>(d.n)), e(static_cast<std::size_t>(samples));
  for (long i = 0; i < samples; ++i) {
    for (double& v : x) v = rng.normal();
    sphparisi::project_to_sphere(x);
    e[static_cast<std::size_t>(i)] = sphparisi::hamiltonian(d, x, d.n);
  }
  const double mx = *std::max_element(e.begin(), e.end());
  double sw = 0.0, swe = 0.0;
  for (double v : e) {
    const double w = std::exp(v - mx);
    sw += w;
    swe += w * v;
  }
  const double mean = swe / sw;
  double var = 0.0;
  for (double v : e) {
    const double w = std::exp(v - mx) / sw;
    var += w * w * (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(var)};
}

}  // namespace oracle
