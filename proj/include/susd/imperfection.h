#pragma once

#include <span>
#include <vector>

#include "susd/optics.h"

namespace susd {

// Bounds of the imperfection model. Plate angles jitter uniformly within
// ±hwp_jitter_max_deg, each splitter polarization loses up to pbs_loss_max
// of its intensity, and up to mode_mismatch_max of each interferometer
// output leaks incoherently into the opposite port.
struct ImperfectionConfig {
  double hwp_jitter_max_deg = 1.0;
  double pbs_loss_max = 0.03;
  double mode_mismatch_max = 0.03;
  uint64_t samples = 10000;

  // uniform: every parameter drawn uniformly over its range.
  // extreme: every parameter drawn from the endpoints of its range.
  enum class Sampling { uniform, extreme } sampling = Sampling::uniform;

  // minmax: envelope bounds are the sample extrema (with the ideal value
  // folded in, since zero perturbation lies in the closure of the model).
  // percentile: bounds are the 2.5th and 97.5th sample percentiles.
  enum class EnvelopeKind { minmax, percentile } envelope = EnvelopeKind::minmax;
};

// One concrete realization of the imperfect apparatus. The preparation plate
// sits before the network input and is listed separately.
struct PerturbedSetup {
  double alice_hwp_offset = 0.0;
  NetworkParams network{};
  std::array<double, 4> mode_mismatch{};  // I1..I4
};

// Draw order is fixed: preparation plate offset, network plate offsets in
// slot order, splitter losses in slot order (h before v), mode mismatch
// I1..I4. Changing the order would silently change every derived result.
PerturbedSetup sample_imperfection(const ImperfectionConfig &cfg, Rng &rng);

struct PerturbedProbs {
  ProbTable table;    // renormalized over the nine detectors
  double throughput;  // fraction of input intensity that reaches any detector
};

// Detector distribution of the imperfect apparatus. Amplitudes propagate
// coherently between mixing points; mode mismatch adds incoherent mixture
// components, so the result is a true probability even though the leak has
// no amplitude-level description. Throws std::runtime_error when losses eat
// the entire input.
PerturbedProbs perturbed_detector_probs(double s, Sign alice, const PerturbedSetup &setup,
                                        const PortMapping &mapping = PortMapping::canonical());

struct Envelope {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double stddev = 0.0;
};

struct EnvelopeResult {
  std::vector<double> s_grid;
  Sign alice = Sign::minus;
  std::vector<std::array<std::array<Envelope, 3>, 3>> cells;  // per grid point
  std::vector<Envelope> p_succ;
};

// Envelope of detector probabilities and of the doubly-conclusive success
// cell over cfg.samples apparatus realizations per grid point. Sample i of
// grid point g uses the sub-stream (mix(seed, g), i); the reduction runs in
// sample order, so results are byte-identical for any n_threads.
EnvelopeResult mc_envelope(std::span<const double> s_grid, Sign alice,
                           const ImperfectionConfig &cfg, uint64_t seed,
                           int n_threads = 1);

}  // namespace susd
