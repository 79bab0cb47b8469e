#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "susd/protocol.h"
#include "susd/rng.h"

namespace susd {

// Photon pair source and detection chain. Defaults follow the bench values:
// 2600 coincident pairs per second, 15 accidental coincidences per second
// spread over the nine detector paths, 60% heralding efficiency, 15 second
// acquisition windows repeated 45 times.
struct SourceConfig {
  double pair_rate_hz = 2600.0;
  double accidental_rate_hz = 15.0;
  double efficiency = 0.60;
  double window_s = 15.0;
  int runs = 45;
};

// Detectors are indexed 0..8 as (mu - 2) * 3 + outcome index.
int detector_flat_index(const Detector &d);
Detector detector_from_flat_index(int idx);

struct CountData {
  // counts[run][detector]
  std::vector<std::array<uint64_t, 9>> counts;
};

// Draws Poisson counts for each run and detector. The mean of detector d is
//   pair_rate * window * efficiency * probs[d] + accidental_rate * window / 9.
// probs must hold nine non-negative entries summing to one within 1e-9.
// Run r uses the sub-stream Rng::derive(seed, r), so the data is independent
// of how callers batch the runs.
CountData simulate_counts(const std::array<double, 9> &probs, const SourceConfig &src,
                          uint64_t seed);

struct ProbEstimate {
  std::array<double, 9> p;      // per-detector relative frequency
  std::array<double, 9> p_std;  // sample standard deviation over runs
};

// Per-run normalized frequencies averaged over runs, with the run-to-run
// sample standard deviation (divisor runs - 1). Needs at least two runs and
// at least one count in every run. Accidentals bias these estimates toward
// uniform; use estimate_probs_subtracted when the source rates are known.
ProbEstimate estimate_probs(const CountData &data);

// Same, after subtracting the expected accidental floor from every detector
// in every run (clamping at zero) and renormalizing per run.
ProbEstimate estimate_probs_subtracted(const CountData &data, const SourceConfig &src);

}  // namespace susd
