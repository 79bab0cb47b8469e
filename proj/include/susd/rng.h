#pragma once

#include <array>
#include <cstdint>

namespace susd {

// One step of the splitmix64 sequence; used for seed expansion and stream
// derivation only, never as the main generator.
uint64_t splitmix64_next(uint64_t &state);

// Hash two words into a fresh seed. mix_u64(seed, i) != mix_u64(seed, j)
// for i != j with overwhelming probability, so sub-streams derived from a
// common seed are statistically independent.
uint64_t mix_u64(uint64_t seed, uint64_t index);

// xoshiro256++ with splitmix64 seeding. Hand-rolled so that the byte stream
// is identical across compilers and standard libraries; reproducibility of
// emitted files depends on it.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  // Independent sub-stream for a work item. Sharded loops derive one stream
  // per index, which makes results independent of how work is distributed.
  static Rng derive(uint64_t seed, uint64_t index);

  uint64_t next_u64();
  double uniform01();                      // [0, 1), 53-bit resolution
  double uniform(double lo, double hi);    // [lo, hi)
  uint64_t uniform_index(uint64_t n);      // unbiased draw from [0, n), n >= 1
  double normal();                         // standard normal, Box-Muller
  uint64_t poisson(double mean);           // product method; normal approx for large mean

 private:
  std::array<uint64_t, 4> s_;
};

}  // namespace susd
