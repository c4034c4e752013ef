#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace sphparisi {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Welford accumulator; merge() combines partial results from independent chunks.
class RunningMoments {
 public:
  void add(double x);
  void merge(const RunningMoments& other);
  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }
  [[nodiscard]] double variance() const;  // unbiased; 0 below two samples
  [[nodiscard]] Estimate mean_estimate() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

Estimate mean_estimate(std::span<const double> values);

// Bootstrap standard error of stat() over resampled blocks of `block` consecutive rows.
// Rows have `width` columns (row-major); block = 1 is the plain bootstrap.
double block_bootstrap_error(std::span<const double> rows, std::size_t width, std::size_t block, int resamples,
                             std::uint64_t seed, const std::function<double(std::span<const double>)>& stat);

}  // namespace sphparisi
