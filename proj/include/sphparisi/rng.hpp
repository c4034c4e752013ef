#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace sphparisi {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Hash a master seed and a path of stream indices into a child seed.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v + 0x632be59bd9b4e019ULL));
  return h;
}

// Uniform in (0, 1) from the top 53 bits; never returns 0.
inline double bits_to_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Counter-based standard normal keyed by (seed, stream, index): Box-Muller on a hashed pair.
inline double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const std::uint64_t key = derive_seed(seed, {stream, index >> 1});
  const double u1 = bits_to_unit(splitmix64(key));
  const double u2 = bits_to_unit(splitmix64(key ^ 0xd1b54a32d192ed03ULL));
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return (index & 1U) ? radius * std::sin(angle) : radius * std::cos(angle);
}

// Sequential stream; one per independent task, seeded through derive_seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double uniform() { return bits_to_unit(engine_()); }
  double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }
  std::uint64_t bits() { return engine_(); }
  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace sphparisi
