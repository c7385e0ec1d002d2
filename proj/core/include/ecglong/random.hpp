#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace ecglong {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// Deterministic random source. The generator (mt19937_64) and every
// derived draw are fixed by this class, so identical seeds reproduce
// identical streams on any platform. A source is single-consumer: never
// share one instance across concurrent tasks, fork() children instead.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  static const char* algorithm_id() { return "mt19937_64/box-muller-cos"; }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller, cosine branch only. Two uniforms per
  // draw; no cached second value, so the stream position is predictable.
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  // Uniform integer in [0, n), unbiased via rejection.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = next_u64();
    while (v >= limit) v = next_u64();
    return v % n;
  }

  // Child stream derived from the parent seed and a child index; does not
  // consume parent state, so fork(i) is stable regardless of draw order.
  RandomSource fork(std::uint64_t child) const {
    return RandomSource(detail::splitmix64(seed_ ^ detail::splitmix64(child + 1)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace ecglong
