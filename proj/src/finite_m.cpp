#include "sphparisi/finite_m.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sphparisi/error.hpp"
#include "sphparisi/kernels.hpp"
#include "sphparisi/numerics.hpp"
#include "sphparisi/quadrature.hpp"

namespace sphparisi {

namespace {

constexpr int kLogMgfNodes = 128;
constexpr double kWindowSigmas = 16.0;
constexpr double kGridStretch = 2.5;

const QuadratureRule& logmgf_rule() {
  static const QuadratureRule rule = gauss_legendre(kLogMgfNodes);
  return rule;
}

// radii clustered near zero: r_max * expm1(kappa t) / expm1(kappa)
std::vector<double> radial_grid(double r_max, int size) {
  std::vector<double> r(static_cast<std::size_t>(size));
  const double denom = std::expm1(kGridStretch);
  for (int i = 0; i < size; ++i) {
    r[static_cast<std::size_t>(i)] = r_max * std::expm1(kGridStretch * i / (size - 1)) / denom;
  }
  r.front() = 0.0;
  return r;
}

kernels::LevelStep make_step(int M, double delta, double m, const QuadratureRule& gl, const kernels::LogMgfExcess& excess,
                             int scan_points) {
  kernels::LevelStep s;
  s.M = M;
  s.delta = delta;
  s.m = m;
  // chi density with scale sqrt(delta): rho^{M-1} e^{-rho^2/2delta} / (2^{M/2-1} delta^{M/2} Gamma(M/2))
  s.log_norm = std::numbers::ln2 - 0.5 * M * std::log(2.0 * delta) - std::lgamma(0.5 * M);
  s.excess = &excess;
  s.nodes = gl.nodes;
  for (double w : gl.weights) s.log_weights.push_back(std::log(w));
  s.scan_points = scan_points;
  return s;
}

struct RecursionOutput {
  double x0_raw = 0.0;
  std::vector<LevelSummary> levels;
};

RecursionOutput run_recursion(const Mixture& mix, const FunctionalOrderParameter& f, int M, int grid_size,
                              double r_max_sigmas, int radial_nodes, int scan_points) {
  const auto k = static_cast<std::size_t>(f.k);
  std::vector<double> delta(k + 1);
  for (std::size_t p = 0; p <= k; ++p) delta[p] = mix.xi_prime(f.q[p + 1]) - mix.xi_prime(f.q[p]);

  RecursionOutput out;
  const double total = mix.xi_prime(1.0);
  if (total <= 0.0) {
    // every z_p vanishes and Lambda_M(0) = 0
    for (std::size_t p = 0; p <= k; ++p) out.levels.push_back({static_cast<int>(p), delta[p], f.m[p], 0.0, 0.0});
    return out;
  }

  const double r_max = r_max_sigmas * std::sqrt(M * total);
  const auto gl = gauss_legendre(radial_nodes);
  // largest argument rho r / (delta sqrt(M)) met on the grid is tabulated per level
  auto excess_for = [&](double delta) {
    const double rho_max = r_max + 12.0 * std::sqrt(delta) + std::sqrt(M * delta) + delta * std::sqrt(double(M));
    return kernels::LogMgfExcess(M, std::min(1e5, rho_max * r_max / (delta * std::sqrt(double(M)))), 2048);
  };

  // top level: Lambda_M tabulated on a finer, wider grid
  const auto top_r = radial_grid(1.5 * r_max, 4 * grid_size);
  std::vector<double> top_v(top_r.size());
  for (std::size_t i = 0; i < top_r.size(); ++i) top_v[i] = spherical_logmgf(M, top_r[i]);
  MonotoneCubic next(top_r, top_v);

  const auto grid = radial_grid(r_max, grid_size);
  std::vector<double> values(grid.size());
  std::vector<double> scratch;
  for (std::size_t p = k; p >= 1; --p) {
    LevelSummary summary{static_cast<int>(p), delta[p], f.m[p], r_max, 0.0};
    if (delta[p] > 0.0) {
      const auto excess = excess_for(delta[p]);
      const auto step = make_step(M, delta[p], f.m[p], gl, excess, scan_points);
      kernels::omp::level_sweep(step, next, grid, values);
      next = MonotoneCubic(grid, values);
    }
    summary.g_at_zero = next(0.0) / M;
    out.levels.push_back(summary);
  }
  // level 0 (m_0 = 0) is only needed at r = 0
  double x0 = next(0.0);
  if (delta[0] > 0.0) {
    const kernels::LogMgfExcess excess(M, 1.0, 16);  // r = 0 never consults it
    const auto step = make_step(M, delta[0], 0.0, gl, excess, scan_points);
    x0 = kernels::level_point(step, next, 0.0, scratch);
  }
  out.levels.push_back({0, delta[0], 0.0, r_max, x0 / M});
  std::reverse(out.levels.begin(), out.levels.end());
  out.x0_raw = x0;
  return out;
}

double theta_correction(const Mixture& mix, const FunctionalOrderParameter& f) {
  CompensatedSum s;
  for (int p = 1; p <= f.k; ++p) {
    s.add(f.m[static_cast<std::size_t>(p)] *
          (mix.theta(f.q[static_cast<std::size_t>(p) + 1]) - mix.theta(f.q[static_cast<std::size_t>(p)])));
  }
  return 0.5 * s.value();
}

}  // namespace

void FiniteMConfig::validate() const {
  if (M < 1) throw std::invalid_argument("FiniteMConfig: M must be >= 1");
  if (r_grid_size < 8 || radial_nodes < 8 || scan_points < 8) {
    throw std::invalid_argument("FiniteMConfig: grid and node counts must be >= 8");
  }
  if (!(r_max_sigmas >= 3.0)) throw std::invalid_argument("FiniteMConfig: r_max_sigmas must be >= 3");
  if (max_k < 1) throw std::invalid_argument("FiniteMConfig: max_k must be >= 1");
}

double spherical_logmgf(int M, double r) {
  if (M < 1) throw DomainError("spherical_logmgf: M must be >= 1");
  if (!(r >= 0.0)) throw DomainError("spherical_logmgf: r must be >= 0");
  if (r == 0.0) return 0.0;
  if (M == 1) return r + std::log1p(std::exp(-2.0 * r)) - std::numbers::ln2;  // log cosh

  // integrand in phi: exp(c cos(phi)) sin(phi)^a on [0, pi]
  const double c = r * std::sqrt(static_cast<double>(M));
  const double a = M - 2.0;
  double peak = 0.0;
  if (a > 0.0) {
    // c sin^2 = a cos at the peak; 1 - cos(peak) in a cancellation-free form
    const double one_minus_u = 2.0 * a / (2.0 * c + a + std::hypot(a, 2.0 * c));
    peak = 2.0 * std::asin(std::sqrt(0.5 * one_minus_u));
  }
  const double sin_peak = std::sin(peak);
  double curvature = c * std::cos(peak);
  if (a > 0.0) curvature += a / (sin_peak * sin_peak);
  const double width = kWindowSigmas / std::sqrt(curvature);
  const double lo = std::max(0.0, peak - width);
  const double hi = std::min(std::numbers::pi, peak + width);

  const auto& rule = logmgf_rule();
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  std::vector<double> terms(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double phi = mid + half * rule.nodes[i];
    double t = std::log(rule.weights[i] * half) + c * std::cos(phi);
    if (a > 0.0) t += a * std::log(std::sin(phi));
    terms[i] = t;
  }
  // normalizer: int_0^pi sin^a = B(1/2, (a+1)/2)
  const double log_norm = std::lgamma(0.5) + std::lgamma(0.5 * (a + 1.0)) - std::lgamma(0.5 * a + 1.0);
  return std::max(0.0, log_sum_exp(terms) - log_norm);
}

FiniteMResult pm_value(const Mixture& mix, const FunctionalOrderParameter& f, const FiniteMConfig& cfg) {
  cfg.validate();
  require_valid(f);
  if (f.k > cfg.max_k) {
    throw ResourceGuardError("finite-M cost guard: k = " + std::to_string(f.k) + " exceeds " +
                             std::to_string(cfg.max_k));
  }
  const auto fine = run_recursion(mix, f, cfg.M, cfg.r_grid_size, cfg.r_max_sigmas, cfg.radial_nodes, cfg.scan_points);
  const auto coarse = run_recursion(mix, f, cfg.M, std::max(8, cfg.r_grid_size / 2), cfg.r_max_sigmas,
                                    std::max(8, cfg.radial_nodes / 2), cfg.scan_points);
  FiniteMResult res;
  res.x0_raw = fine.x0_raw;
  res.x0 = fine.x0_raw / cfg.M;
  res.pm = res.x0 - theta_correction(mix, f);
  res.per_level_grids = fine.levels;
  const double coarse_x0 = coarse.x0_raw / cfg.M;
  res.error_estimate = std::abs(res.x0 - coarse_x0) + 1e-12 * std::max(1.0, std::abs(res.pm));
  if (res.error_estimate > 1e-3) res.warning = "finite-M quadrature refinement disagreement exceeds 1e-3";
  return res;
}

LipschitzGap lipschitz_gap(const Mixture& mix, const FunctionalOrderParameter& f1,
                           const FunctionalOrderParameter& f2, const FiniteMConfig& cfg) {
  const auto a = pm_value(mix, f1, cfg);
  const auto b = pm_value(mix, f2, cfg);
  return {std::abs(a.pm - b.pm), 0.5 * mix.xi_prime(1.0) * l1_distance(f1, f2), a.error_estimate + b.error_estimate};
}

}  // namespace sphparisi
