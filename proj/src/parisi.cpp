#include "sphparisi/parisi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sphparisi/error.hpp"
#include "sphparisi/numerics.hpp"

namespace sphparisi {

namespace {

constexpr double kSmallM = 1e-10;
constexpr double kDomainGuard = 1e-14;
constexpr double kMaxGap = 1e12;
constexpr int kScanPoints = 64;

// Precomputed per-level quantities shared by the objective and its derivative.
struct Levels {
  std::vector<double> delta;  // xi'(q_{l+1}) - xi'(q_l), l = 1..k (index l - 1)
  std::vector<double> d;      // d_1..d_k
  std::vector<double> m;      // m_1..m_k
  double xi_prime_q1 = 0.0;
  double theta_term = 0.0;    // sum m_l (theta(q_{l+1}) - theta(q_l))
};

Levels make_levels(const Mixture& mix, const FunctionalOrderParameter& f) {
  require_valid(f);
  const auto k = static_cast<std::size_t>(f.k);
  Levels lv;
  lv.delta.resize(k);
  lv.d.resize(k);
  lv.m.assign(f.m.begin() + 1, f.m.end());
  std::vector<double> xp(k + 2), th(k + 2);
  for (std::size_t i = 0; i < k + 2; ++i) {
    xp[i] = mix.xi_prime(f.q[i]);
    th[i] = mix.theta(f.q[i]);
  }
  CompensatedSum theta_sum;
  for (std::size_t l = 1; l <= k; ++l) {
    lv.delta[l - 1] = xp[l + 1] - xp[l];
    theta_sum.add(f.m[l] * (th[l + 1] - th[l]));
  }
  double acc = 0.0;
  for (std::size_t l = k; l >= 1; --l) {
    acc += lv.m[l - 1] * lv.delta[l - 1];
    lv.d[l - 1] = acc;
  }
  lv.xi_prime_q1 = xp[1];
  lv.theta_term = theta_sum.value();
  return lv;
}

double objective(const Levels& lv, double b) {
  const double d1 = lv.d.front();
  if (!(b - d1 > kDomainGuard)) {
    throw DomainError("objective_at_b: b = " + std::to_string(b) + " not above d_1 = " + std::to_string(d1));
  }
  const std::size_t k = lv.d.size();
  CompensatedSum s;
  s.add(b - 1.0 - std::log(b));
  s.add(lv.xi_prime_q1 / (b - d1));
  for (std::size_t l = 0; l < k; ++l) {
    const double D = b - lv.d[l];
    const double ratio = lv.delta[l] / D;
    // (1/m) log(D_{l+1}/D_l) with D_{l+1} - D_l = m * delta
    s.add(lv.m[l] < kSmallM ? ratio : std::log1p(lv.m[l] * ratio) / lv.m[l]);
  }
  s.add(-lv.theta_term);
  return 0.5 * s.value();
}

double derivative(const Levels& lv, double b) {
  const double d1 = lv.d.front();
  const std::size_t k = lv.d.size();
  const double D1 = b - d1;
  CompensatedSum s;
  s.add(1.0 - 1.0 / b);
  s.add(-lv.xi_prime_q1 / (D1 * D1));
  for (std::size_t l = 0; l < k; ++l) {
    const double D = b - lv.d[l];
    const double D_next = (l + 1 < k) ? b - lv.d[l + 1] : b;
    // (1/m)(1/D_{l+1} - 1/D_l) = -delta / (D_l D_{l+1}), valid for every m
    s.add(-lv.delta[l] / (D * D_next));
  }
  return 0.5 * s.value();
}

}  // namespace

std::vector<double> cascade_depths(const Mixture& mix, const FunctionalOrderParameter& f) {
  return make_levels(mix, f).d;
}

double objective_at_b(const Mixture& mix, const FunctionalOrderParameter& f, double b) {
  return objective(make_levels(mix, f), b);
}

double objective_derivative_at_b(const Mixture& mix, const FunctionalOrderParameter& f, double b) {
  const auto lv = make_levels(mix, f);
  if (!(b - lv.d.front() > kDomainGuard)) throw DomainError("objective_derivative_at_b: b not above d_1");
  return derivative(lv, b);
}

ParisiEvaluation infimum_over_b(const Mixture& mix, const FunctionalOrderParameter& f) {
  const Levels lv = make_levels(mix, f);
  const double d1 = lv.d.front();
  auto deriv = [&](double b) { return derivative(lv, b); };

  ParisiEvaluation ev;
  ev.d = lv.d;

  // lower end: derivative must be negative just above d_1
  double gap_lo = std::max(1e-8, 1e-8 * d1);
  double g_lo = deriv(d1 + gap_lo);
  while (g_lo >= 0.0 && gap_lo > 1e-300 && d1 + gap_lo * 0.1 - d1 > kDomainGuard) {
    gap_lo *= 0.1;
    g_lo = deriv(d1 + gap_lo);
  }
  if (g_lo >= 0.0) throw ConvergenceError("infimum_over_b: objective not decreasing above d_1");

  // upper end: geometric expansion until the derivative turns positive
  double gap_hi = std::max(1.0, d1);
  double g_hi = deriv(d1 + gap_hi);
  while (g_hi <= 0.0) {
    gap_hi *= 2.0;
    if (gap_hi > kMaxGap) {
      throw ConvergenceError("infimum_over_b: no sign change of the derivative below d_1 + 1e12");
    }
    g_hi = deriv(d1 + gap_hi);
  }
  ev.bracket = {d1 + gap_lo, d1 + gap_hi};

  const double xtol = 4.0 * std::numeric_limits<double>::epsilon();
  auto refine = [&](double a, double b, double fa, double fb) {
    const RootResult r = brent_root(deriv, a, b, fa, fb, xtol * std::max(1.0, std::abs(b)));
    ev.iterations += r.iterations;
    return r.root;
  };

  double best_b = refine(ev.bracket.first, ev.bracket.second, g_lo, g_hi);
  double best_v = objective(lv, best_b);

  // scan for further sign changes (- to +) in case the objective is not unimodal
  const double log_lo = std::log(gap_lo), log_hi = std::log(gap_hi * 4.0);
  double prev_b = d1 + gap_lo, prev_g = g_lo;
  for (int i = 1; i < kScanPoints; ++i) {
    const double b = d1 + std::exp(log_lo + (log_hi - log_lo) * i / (kScanPoints - 1));
    const double g = deriv(b);
    if (prev_g < 0.0 && g > 0.0) {
      const double root = refine(prev_b, b, prev_g, g);
      const double v = objective(lv, root);
      if (v < best_v) {
        best_v = v;
        best_b = root;
      }
    }
    prev_b = b;
    prev_g = g;
  }

  ev.b_star = best_b;
  ev.value = best_v;
  ev.derivative_at_b_star = deriv(best_b);
  if (!std::isfinite(ev.value)) throw ConvergenceError("infimum_over_b: non-finite value");
  return ev;
}

double parisi_value(const Mixture& mix, const FunctionalOrderParameter& f) {
  return infimum_over_b(mix, f).value;
}

}  // namespace sphparisi
