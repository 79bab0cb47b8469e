#include "susd/rng.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace susd {

uint64_t splitmix64_next(uint64_t &state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

uint64_t mix_u64(uint64_t seed, uint64_t index) {
  uint64_t state = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  uint64_t h = splitmix64_next(state);
  h ^= splitmix64_next(state);
  return h;
}

Rng::Rng(uint64_t seed) {
  uint64_t state = seed;
  for (auto &word : s_) {
    word = splitmix64_next(state);
  }
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) {
    s_[0] = 1;
  }
}

Rng Rng::derive(uint64_t seed, uint64_t index) {
  return Rng(mix_u64(seed, index));
}

static inline uint64_t rotl64(uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

uint64_t Rng::next_u64() {
  uint64_t result = rotl64(s_[0] + s_[3], 23) + s_[0];
  uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl64(s_[3], 45);
  return result;
}

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

uint64_t Rng::uniform_index(uint64_t n) {
  if (n == 0) {
    throw std::domain_error("uniform_index: n must be positive");
  }
  // Rejection below the threshold keeps the modulus unbiased.
  uint64_t threshold = (0 - n) % n;
  for (;;) {
    uint64_t r = next_u64();
    if (r >= threshold) {
      return r % n;
    }
  }
}

double Rng::normal() {
  double u1 = uniform01();
  double u2 = uniform01();
  // 1 - u1 lies in (0, 1], so the log is finite.
  return std::sqrt(-2.0 * std::log(1.0 - u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("poisson: mean must be finite and non-negative");
  }
  if (mean == 0.0) {
    return 0;
  }
  if (mean <= 64.0) {
    // Product-of-uniforms method; exact for small means.
    double limit = std::exp(-mean);
    uint64_t k = 0;
    double prod = 1.0;
    do {
      ++k;
      prod *= uniform01();
    } while (prod > limit);
    return k - 1;
  }
  // For large means the rounded normal approximation is accurate to far
  // below the counting noise this model feeds.
  double draw = mean + std::sqrt(mean) * normal();
  if (draw < 0.5) {
    return 0;
  }
  return static_cast<uint64_t>(std::llround(draw));
}

}  // namespace susd
