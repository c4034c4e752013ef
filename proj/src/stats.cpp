#include "sphparisi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sphparisi/rng.hpp"

namespace sphparisi {

void RunningMoments::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void RunningMoments::merge(const RunningMoments& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_), nb = static_cast<double>(other.n_);
  const double d = other.mean_ - mean_;
  mean_ += d * nb / (na + nb);
  m2_ += other.m2_ + d * d * na * nb / (na + nb);
  n_ += other.n_;
}

double RunningMoments::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

Estimate RunningMoments::mean_estimate() const {
  return {mean_, n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_))};
}

Estimate mean_estimate(std::span<const double> values) {
  RunningMoments m;
  for (double v : values) m.add(v);
  return m.mean_estimate();
}

double block_bootstrap_error(std::span<const double> rows, std::size_t width, std::size_t block, int resamples,
                             std::uint64_t seed, const std::function<double(std::span<const double>)>& stat) {
  if (width == 0 || rows.size() % width != 0) throw std::invalid_argument("block_bootstrap_error: ragged rows");
  const std::size_t n = rows.size() / width;
  if (n < 2 || resamples < 2) return 0.0;
  block = std::clamp<std::size_t>(block, 1, n);
  const std::size_t blocks = (n + block - 1) / block;
  Rng rng(seed);
  std::vector<double> sample;
  sample.reserve(blocks * block * width);
  RunningMoments m;
  for (int b = 0; b < resamples; ++b) {
    sample.clear();
    for (std::size_t j = 0; j < blocks; ++j) {
      const std::size_t start = rng.below(n - block + 1);
      sample.insert(sample.end(), rows.begin() + static_cast<std::ptrdiff_t>(start * width),
                    rows.begin() + static_cast<std::ptrdiff_t>((start + block) * width));
    }
    m.add(stat(sample));
  }
  return std::sqrt(m.variance());
}

}  // namespace sphparisi
