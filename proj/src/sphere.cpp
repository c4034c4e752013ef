#include "sphparisi/sphere.hpp"

#include <boost/math/distributions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "sphparisi/error.hpp"
#include "sphparisi/numerics.hpp"
#include "sphparisi/quadrature.hpp"
#include "sphparisi/rng.hpp"

namespace sphparisi {

namespace {

constexpr long kChunk = 8192;

double log_sphere_area(int K) {
  return std::numbers::ln2 + 0.5 * K * std::log(std::numbers::pi) - std::lgamma(0.5 * K);
}

// Runs body(chunk_index, begin, end, moments) over fixed-size chunks; merging in chunk order
// keeps the result independent of the thread count.
template <class Body>
RunningMoments chunked(long samples, Body body) {
  const long chunks = (samples + kChunk - 1) / kChunk;
  std::vector<RunningMoments> parts(static_cast<std::size_t>(chunks));
#pragma omp parallel for schedule(dynamic)
  for (long c = 0; c < chunks; ++c) {
    const long begin = c * kChunk;
    body(static_cast<std::uint64_t>(c), begin, std::min(samples, begin + kChunk), parts[static_cast<std::size_t>(c)]);
  }
  RunningMoments total;
  for (const auto& p : parts) total.merge(p);
  return total;
}

void fill_sphere_point(Rng& rng, std::span<double> x) {
  for (double& v : x) v = rng.normal();
  project_to_sphere(x);
}

}  // namespace

void ShellSpec::validate() const {
  if (M < 1) throw DomainError("ShellSpec: M must be >= 1");
  if (!(delta > 0.0) || !std::isfinite(delta)) throw DomainError("ShellSpec: delta must be a positive finite number");
}

void project_to_sphere(std::span<double> x) {
  CompensatedSum s;
  for (double v : x) s.add(v * v);
  const double norm = std::sqrt(s.value());
  if (!(norm > 0.0)) throw DomainError("project_to_sphere: zero vector");
  if (x.size() == 1) {
    x[0] = std::copysign(1.0, x[0]);
    return;
  }
  const double scale = std::sqrt(static_cast<double>(x.size())) / norm;
  for (double& v : x) v *= scale;
}

std::vector<double> sample_sphere(int N, int count, std::uint64_t seed) {
  if (N < 1 || count < 1) throw std::invalid_argument("sample_sphere: N and count must be >= 1");
  const auto n = static_cast<std::size_t>(N);
  std::vector<double> out(n * static_cast<std::size_t>(count));
#pragma omp parallel for schedule(static)
  for (int i = 0; i < count; ++i) {
    Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(i)}));
    fill_sphere_point(rng, std::span<double>(out).subspan(static_cast<std::size_t>(i) * n, n));
  }
  return out;
}

double log_coordinate_normalizer(int M, int N) {
  if (M < 1 || N < 1) throw DomainError("coordinate normalizer: M and N must be >= 1");
  double s = 0.0;
  for (int j = 1; j <= M; ++j) {
    const int K = M + N + 1 - j;
    s += log_sphere_area(K - 1) - log_sphere_area(K) - 0.5 * std::log(static_cast<double>(K));
  }
  return s;
}

CoordinateDensity coordinate_density(int M, int N, std::span<const double> eps) {
  if (M < 1 || N < 1) throw DomainError("coordinate_density: M and N must be >= 1");
  if (eps.size() != static_cast<std::size_t>(M)) throw DomainError("coordinate_density: eps must have M entries");
  CoordinateDensity out;
  out.scale.assign(static_cast<std::size_t>(M) + 1, 1.0);
  double log_f = log_coordinate_normalizer(M, N);
  for (int j = 1; j <= M; ++j) {
    const double K = M + N + 1 - j;
    const double e = eps[static_cast<std::size_t>(j) - 1];
    if (!(e * e <= K)) {
      throw DomainError("coordinate_density: |eps_" + std::to_string(j) + "| exceeds sqrt(" +
                        std::to_string(static_cast<int>(K)) + ")");
    }
    log_f += 0.5 * (K - 3.0) * std::log1p(-e * e / K);
    out.scale[static_cast<std::size_t>(j)] =
        out.scale[static_cast<std::size_t>(j) - 1] * std::sqrt((K - e * e) / (K - 1.0));
  }
  out.density = std::exp(log_f);
  return out;
}

DecompositionCheck decomposition_check(int M, int N, const std::function<double(std::span<const double>)>& f,
                                       long samples, std::uint64_t seed) {
  if (M < 1 || N < 1 || M + N < 3) throw DomainError("decomposition_check: need M, N >= 1 and M + N >= 3");
  if (samples < 2) throw std::invalid_argument("decomposition_check: need at least two samples");
  const auto total = static_cast<std::size_t>(M + N), n = static_cast<std::size_t>(N);

  const auto lhs = chunked(samples, [&](std::uint64_t c, long begin, long end, RunningMoments& acc) {
    Rng rng(derive_seed(seed, {0, c}));
    std::vector<double> rho(total);
    for (long i = begin; i < end; ++i) {
      fill_sphere_point(rng, rho);
      acc.add(f(rho));
    }
  });

  const auto rhs = chunked(samples, [&](std::uint64_t c, long begin, long end, RunningMoments& acc) {
    Rng rng(derive_seed(seed, {1, c}));
    std::vector<double> eps(static_cast<std::size_t>(M)), sigma(n), rho(total);
    for (long i = begin; i < end; ++i) {
      double log_marginal = 0.0;
      for (int j = 1; j <= M; ++j) {
        const double K = M + N + 1 - j, shape = 0.5 * (K - 1.0);
        double b = 0.0;
        do {
          const double x = rng.gamma(shape), y = rng.gamma(shape);
          b = x / (x + y);
        } while (!(b > 0.0 && b < 1.0));
        eps[static_cast<std::size_t>(j) - 1] = std::sqrt(K) * (2.0 * b - 1.0);
        const boost::math::beta_distribution<double> beta(shape, shape);
        log_marginal += std::log(boost::math::pdf(beta, b)) - std::log(2.0 * std::sqrt(K));
      }
      const auto cd = coordinate_density(M, N, eps);
      fill_sphere_point(rng, sigma);
      const double a_last = cd.scale.back();
      for (std::size_t t = 0; t < n; ++t) rho[t] = sigma[t] * a_last;
      for (std::size_t j = 0; j < eps.size(); ++j) rho[n + j] = eps[j] * cd.scale[j];
      acc.add(cd.density * std::exp(-log_marginal) * f(rho));
    }
  });

  const auto l = lhs.mean_estimate(), r = rhs.mean_estimate();
  return {l.value, r.value, std::hypot(l.std_error, r.std_error)};
}

double shell_measure(const ShellSpec& s) {
  s.validate();
  const double a = 0.5 * s.M, lo = a, hi = a * (1.0 + s.delta);
  if (s.delta < 1e-2) {
    // thin shell: integrate the Gamma(a) density directly instead of differencing two CDFs
    static const QuadratureRule rule = gauss_legendre(32);
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    CompensatedSum sum;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      sum.add(rule.weights[i] * half * boost::math::gamma_p_derivative(a, mid + half * rule.nodes[i]));
    }
    return sum.value();
  }
  return boost::math::gamma_q(a, lo) - boost::math::gamma_q(a, hi);
}

double ass_correction(const ShellSpec& s, const Mixture& mix) {
  return -s.delta * mix.xi_prime(1.0) + std::log(shell_measure(s)) / s.M;
}

Estimate shell_integral_mc(const ShellSpec& s, std::span<const double> z, long samples, std::uint64_t seed) {
  s.validate();
  if (z.size() != static_cast<std::size_t>(s.M)) throw DomainError("shell_integral_mc: z must have M entries");
  if (samples < 2) throw std::invalid_argument("shell_integral_mc: need at least two samples");
  const double lo = s.M, hi = s.M * (1.0 + s.delta);
  const auto acc = chunked(samples, [&](std::uint64_t c, long begin, long end, RunningMoments& m) {
    Rng rng(derive_seed(seed, {c}));
    for (long i = begin; i < end; ++i) {
      double norm_sq = 0.0, dot = 0.0;
      for (double zi : z) {
        const double e = rng.normal();
        norm_sq += e * e;
        dot += e * zi;
      }
      m.add(norm_sq >= lo && norm_sq <= hi ? std::exp(dot) : 0.0);
    }
  });
  return acc.mean_estimate();
}

}  // namespace sphparisi
