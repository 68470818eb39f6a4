#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace d2dnet {

// SplitMix64 finalizer; used both as a hash and as the generator step.
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

struct SplitMix64 {
  uint64_t state = 0;

  uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

// Counter-based stream construction: the stream for trial t is a pure function
// of (master_seed, t), so trials can be evaluated in any order on any thread
// layout and still reproduce bit-identical results.
inline SplitMix64 trial_stream(uint64_t master_seed, uint64_t trial) {
  return SplitMix64{mix64(master_seed ^ mix64(trial))};
}

// Uniform on (0, 1]; never returns 0, so logarithms stay finite.
inline double u01(SplitMix64& g) {
  return (static_cast<double>(g.next() >> 11) + 1.0) * 0x1.0p-53;
}

// Unit-mean exponential.
inline double exp1(SplitMix64& g) { return -std::log(u01(g)); }

// Poisson count by exponential inter-arrival summation (exact, O(mean) draws,
// no platform-dependent library distributions).
inline uint64_t poisson(SplitMix64& g, double mean) {
  if (!(mean >= 0)) throw std::domain_error("poisson requires mean >= 0");
  uint64_t count = 0;
  double acc = exp1(g);
  while (acc <= mean) {
    ++count;
    acc += exp1(g);
  }
  return count;
}

struct Vec2 {
  double x = 0;
  double y = 0;
};

inline Vec2 polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

inline Vec2 uniform_disc(SplitMix64& g, double radius) {
  const double r = radius * std::sqrt(u01(g));
  return polar(r, 2.0 * M_PI * u01(g));
}

inline Vec2 uniform_annulus(SplitMix64& g, double r_inner, double r_outer) {
  const double r2 = r_inner * r_inner + u01(g) * (r_outer * r_outer - r_inner * r_inner);
  return polar(std::sqrt(r2), 2.0 * M_PI * u01(g));
}

}  // namespace d2dnet
