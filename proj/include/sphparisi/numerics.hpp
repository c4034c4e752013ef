#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace sphparisi {

// Neumaier variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  [[nodiscard]] double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// log(sum_i exp(v_i)); -inf for an empty range.
double log_sum_exp(std::span<const double> values);

// log(sum_i w_i exp(v_i)) given log weights.
double log_sum_exp(std::span<const double> log_weights, std::span<const double> values);

// Running log-sum-exp for streams that do not fit in memory.
class StreamingLogSumExp {
 public:
  void add(double v);
  [[nodiscard]] double value() const;
  [[nodiscard]] std::size_t count() const { return count_; }
  // (sum w)^2 / sum w^2 with w = exp(v - max).
  [[nodiscard]] double effective_sample_size() const;

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::size_t count_ = 0;
};

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Brent-Dekker root finding on [a, b]; f(a) and f(b) must have opposite signs.
RootResult brent_root(const std::function<double(double)>& f, double a, double b, double fa,
                      double fb, double xtol, int max_iter = 200);

// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Butland slopes).
// Outside the node range it extends linearly with the end-point slope.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(std::vector<double> x, std::vector<double> y);

  [[nodiscard]] double operator()(double t) const;
  [[nodiscard]] std::span<const double> nodes() const { return x_; }
  [[nodiscard]] std::span<const double> values() const { return y_; }

 private:
  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> slope_;
};

}  // namespace sphparisi
