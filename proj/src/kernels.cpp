#include "sphparisi/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphparisi/finite_m.hpp"

namespace sphparisi::kernels {

namespace {

constexpr double kWindowDrop = 40.0;

std::vector<double> stretched_grid(double x_max, int size) {
  std::vector<double> x(static_cast<std::size_t>(size));
  const double kappa = 4.0, denom = std::expm1(kappa);
  for (int i = 0; i < size; ++i) x[static_cast<std::size_t>(i)] = x_max * std::expm1(kappa * i / (size - 1)) / denom;
  x.front() = 0.0;
  return x;
}

std::vector<double> excess_values(int M, const std::vector<double>& xs) {
  std::vector<double> v(xs.size());
  const double root_m = std::sqrt(static_cast<double>(M));
  for (std::size_t i = 0; i < xs.size(); ++i) v[i] = spherical_logmgf(M, xs[i]) - root_m * xs[i];
  return v;
}

}  // namespace

LogMgfExcess::LogMgfExcess(int M, double x_max, int size)
    : M_(M), x_max_(x_max), table_(stretched_grid(x_max, size), excess_values(M, stretched_grid(x_max, size))) {}

double LogMgfExcess::operator()(double x) const {
  if (x <= x_max_) return table_(x);
  return spherical_logmgf(M_, x) - std::sqrt(static_cast<double>(M_)) * x;
}

double level_point(const LevelStep& step, const MonotoneCubic& next, double r, std::vector<double>& scratch) {
  const double delta = step.delta, m = step.m;
  const double inv_scale = r / (delta * std::sqrt(static_cast<double>(step.M)));
  auto log_density = [&](double rho) {
    double v = step.log_norm - (rho - r) * (rho - r) / (2.0 * delta) + (*step.excess)(rho * inv_scale);
    if (step.M > 1) v += (step.M - 1) * std::log(rho);
    return v;
  };
  auto tilted = [&](double rho) { return log_density(rho) + (m > 0.0 ? m * next(rho) : 0.0); };

  // scan for the peak of the tilted integrand; the slope of any G_p is at most sqrt(M)
  const double sd = std::sqrt(delta);
  const double center = std::sqrt(r * r + step.M * delta);
  const double lo = std::max(0.0, center - 12.0 * sd);
  const double hi = center + 12.0 * sd + m * delta * std::sqrt(static_cast<double>(step.M));
  const int ns = step.scan_points;
  const double h = (hi - lo) / ns;
  scratch.resize(static_cast<std::size_t>(ns));
  int best = 0;
  for (int j = 0; j < ns; ++j) {
    scratch[static_cast<std::size_t>(j)] = tilted(lo + (j + 0.5) * h);
    if (scratch[static_cast<std::size_t>(j)] > scratch[static_cast<std::size_t>(best)]) best = j;
  }
  const double top = scratch[static_cast<std::size_t>(best)];
  int left = best, right = best;
  while (left > 0 && scratch[static_cast<std::size_t>(left)] > top - kWindowDrop) --left;
  while (right < ns - 1 && scratch[static_cast<std::size_t>(right)] > top - kWindowDrop) ++right;
  const double a = left == 0 ? lo : lo + (left + 0.5) * h;
  const double b = right == ns - 1 ? hi : lo + (right + 0.5) * h;

  const std::size_t nq = step.nodes.size();
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  std::vector<double> logw(nq), vals(nq);
  for (std::size_t i = 0; i < nq; ++i) {
    const double rho = mid + half * step.nodes[i];
    logw[i] = step.log_weights[i] + std::log(half) + log_density(rho);
    vals[i] = next(rho);
  }
  const double lw_max = *std::max_element(logw.begin(), logw.end());
  CompensatedSum mass, first;
  for (std::size_t i = 0; i < nq; ++i) {
    const double w = std::exp(logw[i] - lw_max);
    mass.add(w);
    first.add(w * vals[i]);
  }
  const double mu = first.value() / mass.value();
  if (m == 0.0) return mu;

  double spread = 0.0;
  for (double v : vals) spread = std::max(spread, std::abs(v - mu));
  if (m * spread < 0.5) {
    // cumulant form keeps full precision as m -> 0
    CompensatedSum s;
    for (std::size_t i = 0; i < nq; ++i) s.add(std::exp(logw[i] - lw_max) * std::expm1(m * (vals[i] - mu)));
    return mu + std::log1p(s.value() / mass.value()) / m;
  }
  // the window follows the tilted peak, so it need not hold the untilted mass: integrate absolutely
  for (std::size_t i = 0; i < nq; ++i) vals[i] = m * (vals[i] - mu);
  return mu + log_sum_exp(logw, vals) / m;
}

double contract(const CouplingTensor& t, int n, std::span<const double> x, std::vector<double>& scratch) {
  const auto N = static_cast<std::size_t>(n);
  if (t.p == 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += t.g[i] * x[i];
    return s;
  }
  if (t.p == 2) {
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double* row = t.g.data() + i * N;
      double r = 0.0;
      for (std::size_t j = 0; j < N; ++j) r += row[j] * x[j];
      s += x[i] * r;
    }
    return s;
  }
  // contract the last index repeatedly: N^p -> N^{p-1} -> ... -> 1
  std::size_t len = t.g.size() / N;
  scratch.resize(len);
  for (std::size_t a = 0; a < len; ++a) {
    const double* row = t.g.data() + a * N;
    double r = 0.0;
    for (std::size_t j = 0; j < N; ++j) r += row[j] * x[j];
    scratch[a] = r;
  }
  while (len > 1) {
    len /= N;
    for (std::size_t a = 0; a < len; ++a) {
      double r = 0.0;
      for (std::size_t j = 0; j < N; ++j) r += scratch[a * N + j] * x[j];
      scratch[a] = r;
    }
  }
  return scratch[0];
}

namespace {

double energy_one(std::span<const CouplingTensor> tensors, int n, double scaling, std::span<const double> x,
                  std::vector<double>& scratch) {
  double e = 0.0;
  for (const auto& t : tensors) {
    if (t.beta == 0.0) continue;
    e += t.beta * std::pow(scaling, -0.5 * (t.p - 1)) * contract(t, n, x, scratch);
  }
  return e;
}

void check_batch(int n, std::span<const double> configs, std::span<double> out) {
  if (n < 1 || configs.size() != out.size() * static_cast<std::size_t>(n)) {
    throw std::invalid_argument("batch_energy: configuration buffer does not match output size");
  }
}

}  // namespace

namespace serial {

void level_sweep(const LevelStep& step, const MonotoneCubic& next, std::span<const double> radii,
                 std::span<double> out) {
  std::vector<double> scratch;
  for (std::size_t i = 0; i < radii.size(); ++i) out[i] = level_point(step, next, radii[i], scratch);
}

void batch_energy(std::span<const CouplingTensor> tensors, int n, double scaling,
                  std::span<const double> configs, std::span<double> out) {
  check_batch(n, configs, out);
  std::vector<double> scratch;
  const auto N = static_cast<std::size_t>(n);
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c] = energy_one(tensors, n, scaling, configs.subspan(c * N, N), scratch);
  }
}

}  // namespace serial

namespace omp {

void level_sweep(const LevelStep& step, const MonotoneCubic& next, std::span<const double> radii,
                 std::span<double> out) {
  const auto count = static_cast<std::ptrdiff_t>(radii.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
      out[static_cast<std::size_t>(i)] = level_point(step, next, radii[static_cast<std::size_t>(i)], scratch);
    }
  }
}

void batch_energy(std::span<const CouplingTensor> tensors, int n, double scaling,
                  std::span<const double> configs, std::span<double> out) {
  check_batch(n, configs, out);
  const auto N = static_cast<std::size_t>(n);
  const auto count = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel
  {
    std::vector<double> scratch;
#pragma omp for schedule(static)
    for (std::ptrdiff_t c = 0; c < count; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      out[cu] = energy_one(tensors, n, scaling, configs.subspan(cu * N, N), scratch);
    }
  }
}

}  // namespace omp

}  // namespace sphparisi::kernels
