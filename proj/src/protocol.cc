#include "susd/protocol.h"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

namespace susd {

double ProbTable::sum() const {
  double acc = 0.0;
  for (const auto &row : cell) {
    for (double p : row) acc += p;
  }
  return acc;
}

PortMapping PortMapping::canonical() {
  PortMapping pm;
  pm.mu_for_bob = {3, 4, 2};
  for (auto &row : pm.k_for_charlie) {
    row = outcome_order;
  }
  return pm;
}

bool PortMapping::is_bijective() const {
  std::array<bool, 3> seen{};
  for (int mu : mu_for_bob) {
    if (mu < 2 || mu > 4 || seen[mu - 2]) return false;
    seen[mu - 2] = true;
  }
  for (const auto &row : k_for_charlie) {
    std::array<bool, 3> used{};
    for (Outcome k : row) {
      int i = outcome_index(k);
      if (used[i]) return false;
      used[i] = true;
    }
  }
  return true;
}

Detector PortMapping::detector_for(Outcome bob, Outcome charlie) const {
  int mu = mu_for_bob[outcome_index(bob)];
  return {mu, k_for_charlie[mu - 2][outcome_index(charlie)]};
}

PortMapping randomize_port_mapping(Rng &rng) {
  PortMapping pm = PortMapping::canonical();
  auto shuffle3 = [&rng](auto &arr) {
    for (int i = 2; i > 0; --i) {
      int j = static_cast<int>(rng.uniform_index(static_cast<uint64_t>(i) + 1));
      std::swap(arr[i], arr[j]);
    }
  };
  shuffle3(pm.mu_for_bob);
  for (auto &row : pm.k_for_charlie) {
    shuffle3(row);
  }
  return pm;
}

double SessionStats::p(int mu, Outcome k) const {
  if (trials == 0) return 0.0;
  return static_cast<double>(counts[mu - 2][outcome_index(k)]) /
         static_cast<double>(trials);
}

double SessionStats::p_conditional(Sign sign, int mu, Outcome k) const {
  uint64_t total = sign_totals[sign_index(sign)];
  if (total == 0) return 0.0;
  return static_cast<double>(counts_by_sign[sign_index(sign)][mu - 2][outcome_index(k)]) /
         static_cast<double>(total);
}

double SessionStats::p_succ() const {
  if (trials == 0) return 0.0;
  return static_cast<double>(success_count) / static_cast<double>(trials);
}

PolarizationState reprepare(Outcome bob_outcome, const PolarizationState &bob_post,
                            double s) {
  switch (bob_outcome) {
    case Outcome::conclusive_plus:
      return prepare_phi(s, Sign::plus);
    case Outcome::conclusive_minus:
      return prepare_phi(s, Sign::minus);
    default:
      return bob_post;
  }
}

namespace {

struct TrialContext {
  double s;
  KrausSet bob;
  KrausSet charlie;
  std::array<PolarizationState, 2> psi;  // by sign_index
};

TrialContext make_context(double s) {
  return {s, bob_usd(s), charlie_usd(s),
          {prepare_alice(s, Sign::plus), prepare_alice(s, Sign::minus)}};
}

// Fixed draw order: Alice's sign bit (uniform policy only), the per-trial
// relabeling (when enabled), then one draw per measurement stage.
TrialRecord run_one(const TrialContext &ctx, const SessionConfig &cfg, Rng &rng) {
  Sign alice;
  switch (cfg.alice_policy) {
    case AlicePolicy::fixed_plus: alice = Sign::plus; break;
    case AlicePolicy::fixed_minus: alice = Sign::minus; break;
    default: alice = rng.uniform_index(2) == 0 ? Sign::plus : Sign::minus; break;
  }

  PortMapping mapping = cfg.mapping;
  if (cfg.randomize_mapping_per_trial) {
    mapping = randomize_port_mapping(rng);
  }

  MeasurementResult bob = apply_measurement(ctx.bob, ctx.psi[sign_index(alice)], rng);
  PolarizationState forwarded = reprepare(bob.label, bob.post_state, ctx.s);
  MeasurementResult charlie = apply_measurement(ctx.charlie, forwarded, rng);

  return {alice, bob.label, charlie.label, mapping.detector_for(bob.label, charlie.label)};
}

void accumulate(SessionStats &stats, const TrialRecord &rec) {
  ++stats.trials;
  int mu_row = rec.detector.mu - 2;
  int k_col = outcome_index(rec.detector.k);
  ++stats.counts[mu_row][k_col];
  ++stats.counts_by_sign[sign_index(rec.alice_sign)][mu_row][k_col];
  ++stats.sign_totals[sign_index(rec.alice_sign)];

  Outcome correct = conclusive_for(rec.alice_sign);
  if (rec.bob_outcome == correct && rec.charlie_outcome == correct) {
    ++stats.success_count;
  }
  bool bob_wrong = is_conclusive(rec.bob_outcome) && rec.bob_outcome != correct;
  bool charlie_wrong = is_conclusive(rec.charlie_outcome) && rec.charlie_outcome != correct;
  if (bob_wrong || charlie_wrong) {
    ++stats.wrong_conclusive_count;
  }
}

void merge(SessionStats &into, const SessionStats &part) {
  into.trials += part.trials;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      into.counts[r][c] += part.counts[r][c];
      into.counts_by_sign[0][r][c] += part.counts_by_sign[0][r][c];
      into.counts_by_sign[1][r][c] += part.counts_by_sign[1][r][c];
    }
  }
  into.sign_totals[0] += part.sign_totals[0];
  into.sign_totals[1] += part.sign_totals[1];
  into.success_count += part.success_count;
  into.wrong_conclusive_count += part.wrong_conclusive_count;
}

}  // namespace

TrialRecord run_trial(const SessionConfig &cfg, Rng &rng) {
  if (!cfg.mapping.is_bijective()) {
    throw std::invalid_argument("run_trial: mapping must be bijective");
  }
  TrialContext ctx = make_context(cfg.s);
  return run_one(ctx, cfg, rng);
}

ProbTable analytic_detector_probs(double s, Sign alice, const PortMapping &mapping) {
  coefficients_from_overlap(s);
  if (!mapping.is_bijective()) {
    throw std::invalid_argument("analytic_detector_probs: mapping must be bijective");
  }
  double rs = std::sqrt(s);
  Outcome match = conclusive_for(alice);

  ProbTable table;
  auto set = [&](Outcome bob, Outcome charlie, double p) {
    Detector d = mapping.detector_for(bob, charlie);
    table.at(d.mu, d.k) = p;
  };
  set(match, match, (1.0 - rs) * (1.0 - rs));
  set(match, Outcome::inconclusive, (1.0 - rs) * rs);
  set(Outcome::inconclusive, match, rs * (1.0 - rs));
  set(Outcome::inconclusive, Outcome::inconclusive, s);
  return table;
}

double joint_success_probability(double s) {
  coefficients_from_overlap(s);
  double rs = std::sqrt(s);
  return (1.0 - rs) * (1.0 - rs);
}

SessionStats run_session(const SessionConfig &cfg, int n_threads) {
  if (cfg.trials == 0) {
    throw std::invalid_argument("run_session: trials must be positive");
  }
  if (n_threads < 1) {
    throw std::invalid_argument("run_session: n_threads must be positive");
  }
  if (!cfg.mapping.is_bijective()) {
    throw std::invalid_argument("run_session: mapping must be bijective");
  }
  TrialContext ctx = make_context(cfg.s);

  uint64_t workers = std::min<uint64_t>(static_cast<uint64_t>(n_threads), cfg.trials);
  std::vector<SessionStats> parts(workers);
  auto worker = [&](uint64_t w) {
    uint64_t begin = cfg.trials * w / workers;
    uint64_t end = cfg.trials * (w + 1) / workers;
    SessionStats local;
    for (uint64_t i = begin; i < end; ++i) {
      Rng rng = Rng::derive(cfg.seed, i);
      accumulate(local, run_one(ctx, cfg, rng));
    }
    parts[w] = local;
  };

  if (workers == 1) {
    worker(0);
  } else {
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (uint64_t w = 0; w < workers; ++w) {
      threads.emplace_back(worker, w);
    }
    for (auto &t : threads) t.join();
  }

  SessionStats stats;
  for (const auto &part : parts) {
    merge(stats, part);
  }
  return stats;
}

}  // namespace susd
