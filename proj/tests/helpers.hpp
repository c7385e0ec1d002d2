#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "ecglong/beat_synth.hpp"
#include "ecglong/delineate.hpp"
#include "ecglong/random.hpp"
#include "ecglong/signal.hpp"

namespace testutil {

struct Bump {
  int offset;    // samples relative to R
  double amp;    // mV
  double sigma;  // samples
};

// Canonical PQRST layout used by the exact-delineation tests; every wave sits
// on a grid point well inside its search window at 128 Hz.
inline std::vector<Bump> canonical_bumps() {
  return {{-23, 0.12, 4.0}, {-5, -0.12, 1.5}, {0, 1.0, 1.5}, {5, -0.20, 1.5}, {31, 0.28, 6.0}};
}

inline std::vector<double> bump_beat(const ecglong::BeatWindow& window, const std::vector<Bump>& bumps) {
  std::vector<double> beat(static_cast<std::size_t>(window.length()), 0.0);
  for (std::size_t t = 0; t < beat.size(); ++t) {
    const double dt = static_cast<double>(static_cast<int>(t) - window.pre_r);
    for (const auto& b : bumps) beat[t] += b.amp * std::exp(-0.5 * std::pow((dt - b.offset) / b.sigma, 2));
  }
  return beat;
}

// Zero signal with template copies added at the given R positions.
inline ecglong::Signal place_beats(const std::vector<double>& beat, const ecglong::BeatWindow& window,
                                   const std::vector<std::int64_t>& r_positions, std::int64_t length, int fs = 128) {
  ecglong::Signal s;
  s.fs = fs;
  s.samples.assign(static_cast<std::size_t>(length), 0.0);
  for (const std::int64_t r : r_positions)
    for (std::size_t t = 0; t < beat.size(); ++t) {
      const std::int64_t at = r - window.pre_r + static_cast<std::int64_t>(t);
      if (at >= 0 && at < length) s.samples[static_cast<std::size_t>(at)] += beat[t];
    }
  return s;
}

// Population of jittered copies of a base beat (per-beat gain, no warp).
inline std::vector<std::vector<double>> jittered_population(const std::vector<double>& base, std::size_t count,
                                                            double gain_spread, std::uint64_t seed) {
  ecglong::RandomSource rng(seed);
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double gain = 1.0 + gain_spread * (2.0 * rng.uniform() - 1.0);
    std::vector<double> b(base);
    for (double& v : b) v *= gain;
    out.push_back(std::move(b));
  }
  return out;
}

inline std::vector<double> random_vector(ecglong::RandomSource& rng, std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (double& v : out) v = lo + rng.uniform() * (hi - lo);
  return out;
}

}  // namespace testutil
