#pragma once

#include <cstdint>

#include "susd/usd.h"

namespace susd {

enum class AlicePolicy { fixed_plus, fixed_minus, uniform_random };

// Physical detector address: interferometer index mu in {2, 3, 4} and
// detector label k within it, named by the second-stage outcome it reads out.
struct Detector {
  int mu;
  Outcome k;
  bool operator==(const Detector &) const = default;
};

// 3x3 probability grid over (mu, k).
struct ProbTable {
  std::array<std::array<double, 3>, 3> cell{};

  double &at(int mu, Outcome k) { return cell[mu - 2][outcome_index(k)]; }
  const double &at(int mu, Outcome k) const { return cell[mu - 2][outcome_index(k)]; }
  double sum() const;
};

// Assignment of first-stage outcomes to interferometers and, per
// interferometer, of second-stage outcomes to detector labels. The canonical
// assignment routes Bob's inconclusive result to mu=2, conclusive '+' to
// mu=3, conclusive '-' to mu=4, and labels detectors by the outcome they
// read out. Non-canonical assignments model deliberate relabeling that hides
// outcome identity from the record.
struct PortMapping {
  std::array<int, 3> mu_for_bob{};                       // by outcome_index
  std::array<std::array<Outcome, 3>, 3> k_for_charlie{}; // [mu-2][outcome_index]

  static PortMapping canonical();
  bool is_bijective() const;
  Detector detector_for(Outcome bob, Outcome charlie) const;
};

// Uniformly random bijective relabeling: a random permutation of outcomes to
// interferometers and an independent random detector permutation inside each
// interferometer.
PortMapping randomize_port_mapping(Rng &rng);

struct SessionConfig {
  double s = 0.25;
  uint64_t trials = 100000;
  AlicePolicy alice_policy = AlicePolicy::uniform_random;
  PortMapping mapping = PortMapping::canonical();
  uint64_t seed = 0;
  bool randomize_mapping_per_trial = false;
};

struct TrialRecord {
  Sign alice_sign;
  Outcome bob_outcome;
  Outcome charlie_outcome;
  Detector detector;
};

// Aggregate over a session. The harness knows Alice's sign in every trial,
// so sign-conditioned tables and exact success and error counters are
// available even though the parties themselves never learn them.
struct SessionStats {
  uint64_t trials = 0;
  std::array<std::array<uint64_t, 3>, 3> counts{};  // [mu-2][outcome_index]
  std::array<std::array<std::array<uint64_t, 3>, 3>, 2> counts_by_sign{};
  std::array<uint64_t, 2> sign_totals{};
  uint64_t success_count = 0;           // both stages conclusive and correct
  uint64_t wrong_conclusive_count = 0;  // any conclusive outcome contradicting Alice

  double p(int mu, Outcome k) const;
  double p_conditional(Sign sign, int mu, Outcome k) const;
  double p_succ() const;
  bool operator==(const SessionStats &) const = default;
};

// State forwarded to the second observer: a conclusive first-stage outcome is
// re-prepared as the matching prepare_phi(s, ±); the inconclusive outcome
// passes its post-measurement state through unchanged (it already is one of
// the pair, up to a global sign).
PolarizationState reprepare(Outcome bob_outcome, const PolarizationState &bob_post,
                            double s);

// One full trial: preparation, first-stage measurement, re-preparation,
// second-stage measurement, detector assignment. Deterministic given the rng
// stream.
TrialRecord run_trial(const SessionConfig &cfg, Rng &rng);

// Closed-form detector probabilities conditioned on Alice's sign. Exactly
// four cells are nonzero: (1-sqrt(s))^2 for doubly conclusive,
// (1-sqrt(s))sqrt(s) and sqrt(s)(1-sqrt(s)) for the mixed cells, and s for
// doubly inconclusive.
ProbTable analytic_detector_probs(double s, Sign alice, const PortMapping &mapping);

// Probability that both observers identify the state: (1 - sqrt(s))^2.
double joint_success_probability(double s);

// Runs cfg.trials independent trials. Each trial derives its own sub-stream
// from (cfg.seed, trial index), so the aggregate is byte-identical for any
// n_threads.
SessionStats run_session(const SessionConfig &cfg, int n_threads = 1);

}  // namespace susd
