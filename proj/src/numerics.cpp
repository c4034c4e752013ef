#include "sphparisi/numerics.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace sphparisi {

double log_sum_exp(std::span<const double> values) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : values) hi = std::max(hi, v);
  if (!std::isfinite(hi)) return hi;
  CompensatedSum s;
  for (double v : values) s.add(std::exp(v - hi));
  return hi + std::log(s.value());
}

double log_sum_exp(std::span<const double> log_weights, std::span<const double> values) {
  if (log_weights.size() != values.size()) {
    throw std::invalid_argument("log_sum_exp: weight/value size mismatch");
  }
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) hi = std::max(hi, log_weights[i] + values[i]);
  if (!std::isfinite(hi)) return hi;
  CompensatedSum s;
  for (std::size_t i = 0; i < values.size(); ++i) s.add(std::exp(log_weights[i] + values[i] - hi));
  return hi + std::log(s.value());
}

void StreamingLogSumExp::add(double v) {
  ++count_;
  if (v == -std::numeric_limits<double>::infinity()) return;
  if (v > max_) {
    const double scale = std::exp(max_ - v);
    sum_ *= scale;
    sum_sq_ *= scale * scale;
    max_ = v;
  }
  const double w = std::exp(v - max_);
  sum_ += w;
  sum_sq_ += w * w;
}

double StreamingLogSumExp::value() const {
  if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
  return max_ + std::log(sum_);
}

double StreamingLogSumExp::effective_sample_size() const {
  if (sum_sq_ == 0.0) return 0.0;
  return sum_ * sum_ / sum_sq_;
}

RootResult brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                      double fb, double xtol, int max_iter) {
  RootResult out;
  if (fa == 0.0) return {a, 0, true};
  if (fb == 0.0) return {b, 0, true};
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("brent_root: root not bracketed");

  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    if ((fb > 0) == (fc > 0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * xtol;
    const double mid = 0.5 * (c - b);
    if (std::abs(mid) <= tol || fb == 0.0) {
      out.root = b;
      out.converged = true;
      return out;
    }
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      // inverse quadratic interpolation, or secant when only two points are distinct
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * mid * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * mid * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * mid * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = mid;
        e = d;
      }
    } else {
      d = mid;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol) ? d : (mid > 0 ? tol : -tol);
    fb = f(b);
  }
  out.root = b;
  return out;
}

namespace {

double pchip_end_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if ((d > 0) != (m0 > 0) || d == 0.0) return 0.0;
  if ((m0 > 0) != (m1 > 0) && std::abs(d) > std::abs(3.0 * m0)) return 3.0 * m0;
  return d;
}

}  // namespace

MonotoneCubic::MonotoneCubic(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  const std::size_t n = x_.size();
  if (n < 2 || y_.size() != n) throw std::invalid_argument("MonotoneCubic: need >= 2 matching nodes");
  for (std::size_t i = 1; i < n; ++i) {
    if (!(x_[i] > x_[i - 1])) throw std::invalid_argument("MonotoneCubic: nodes must increase");
  }
  std::vector<double> h(n - 1), delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x_[i + 1] - x_[i];
    delta[i] = (y_[i + 1] - y_[i]) / h[i];
  }
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = delta[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) continue;
    const double w1 = 2.0 * h[i] + h[i - 1];
    const double w2 = h[i] + 2.0 * h[i - 1];
    slope_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  slope_[0] = pchip_end_slope(h[0], h[1], delta[0], delta[1]);
  slope_[n - 1] = pchip_end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
}

double MonotoneCubic::operator()(double t) const {
  if (t <= x_.front()) return y_.front() + slope_.front() * (t - x_.front());
  if (t >= x_.back()) return y_.back() + slope_.back() * (t - x_.back());
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * y_[i] + h10 * h * slope_[i] + h01 * y_[i + 1] + h11 * h * slope_[i + 1];
}

}  // namespace sphparisi
