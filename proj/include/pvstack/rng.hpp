#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pvstack {

/// SplitMix64 step; used to derive independent stream seeds from (seed, stream id).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// mt19937_64 with hand-rolled value mappings so streams do not depend on the
/// standard library's distribution implementations.
class Rng {
public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : eng_(mix_seed(seed, stream)) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Uniform integer in [lo, hi], inclusive; rejection sampling for exactness.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = std::uint64_t(hi - lo) + 1;
    if (span == 0) return std::int64_t(next_u64());  // full 64-bit range
    const std::uint64_t limit = std::uint64_t(-span) % span;  // 2^64 mod span
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r < limit);
    return lo + std::int64_t(r % span);
  }

  /// Box-Muller standard normal.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

} // namespace pvstack
