#include "susd/validation.h"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "susd/rng.h"

namespace susd {

bool ValidationReport::all_pass() const {
  if (checks.empty()) return false;
  for (const auto &c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

std::array<Operator2, 9> detector_kraus_chain(double s) {
  KrausSet bob = bob_usd(s);
  KrausSet charlie = charlie_usd(s);

  const Operator2 split = hwp_jones(std::numbers::pi / 8.0);
  const Operator2 transmit = Operator2::diag(1.0, 0.0);
  const Operator2 reflect = Operator2::diag(0.0, 1.0);

  Operator2 bob_conclusive =
      bob.op(Outcome::conclusive_plus) + bob.op(Outcome::conclusive_minus);
  Operator2 charlie_conclusive =
      charlie.op(Outcome::conclusive_plus) + charlie.op(Outcome::conclusive_minus);

  std::array<Operator2, 3> to_second;
  to_second[0] = hwp_jones(reprep_plus_angle(s)) * transmit * split * bob_conclusive;
  to_second[1] = hwp_jones(reprep_minus_angle(s)) * reflect * split * bob_conclusive;
  to_second[2] = bob.op(Outcome::inconclusive);

  std::array<Operator2, 3> read;
  read[0] = transmit * split * charlie_conclusive;
  read[1] = reflect * split * charlie_conclusive;
  read[2] = charlie.op(Outcome::inconclusive);

  std::array<Operator2, 9> out;
  for (int bi = 0; bi < 3; ++bi) {
    for (int ci = 0; ci < 3; ++ci) {
      out[static_cast<size_t>(bi * 3 + ci)] = read[static_cast<size_t>(ci)] *
                                              to_second[static_cast<size_t>(bi)];
    }
  }
  return out;
}

namespace {

constexpr std::array<double, 10> fixed_grid = {0.0,  0.05, 0.1,  0.25, 0.4,
                                               0.5,  0.64, 0.75, 0.9,  1.0};
constexpr std::array<Sign, 2> both_signs = {Sign::plus, Sign::minus};

double dilation_deviation(const KrausSet &m) {
  NeumarkUnitary nu = neumark_dilation(m);
  Operator2 conclusive = m.op(Outcome::conclusive_plus) + m.op(Outcome::conclusive_minus);
  double dev = unitarity_deviation(nu);
  dev = std::max(dev, max_abs(nu.branch_block(0) - conclusive));
  dev = std::max(dev, max_abs(nu.branch_block(1) - m.op(Outcome::inconclusive)));
  return dev;
}

}  // namespace

ValidationReport run_validation(const ValidationOptions &options) {
  if (options.random_s_count < 1) {
    throw std::invalid_argument("run_validation: random_s_count must be positive");
  }

  ValidationReport report;
  auto add = [&](std::string name, double deviation, double tolerance) {
    bool pass = std::isfinite(deviation) && deviation <= tolerance;
    report.checks.push_back({std::move(name), deviation, tolerance, pass});
  };
  constexpr double inf = std::numeric_limits<double>::infinity();

  {
    double dev_bob = 0.0;
    double dev_charlie = 0.0;
    for (double s : fixed_grid) {
      dev_bob = std::max(dev_bob, verify_completeness(bob_usd(s)));
      dev_charlie = std::max(dev_charlie, verify_completeness(charlie_usd(s)));
    }
    add("first-receiver-completeness", dev_bob, 1e-12);
    add("second-receiver-completeness", dev_charlie, 1e-12);
  }

  {
    double dev = 0.0;
    for (double s : fixed_grid) {
      KrausSet bob = bob_usd(s);
      KrausSet charlie = charlie_usd(s);
      for (Sign sign : both_signs) {
        Outcome wrong = conclusive_for(other_sign(sign));
        dev = std::max(dev, norm_squared(bob.op(wrong).apply(prepare_alice(s, sign))));
        dev = std::max(dev, norm_squared(charlie.op(wrong).apply(prepare_phi(s, sign))));
      }
    }
    add("conclusive-error-probability", dev, 1e-24);
  }

  {
    double dev_prob = 0.0;
    double dev_post = 0.0;
    for (double s : fixed_grid) {
      KrausSet charlie = charlie_usd(s);
      for (Sign sign : both_signs) {
        PolarizationState fail = charlie.op(Outcome::inconclusive).apply(prepare_phi(s, sign));
        dev_prob = std::max(dev_prob, std::abs(norm_squared(fail) - std::sqrt(s)));
        if (norm_squared(fail) > 1e-30) {
          dev_post = std::max(dev_post, std::abs(1.0 - fidelity(normalized(fail), state_h())));
        }
      }
    }
    add("second-stage-failure-probability", dev_prob, 1e-12);
    add("failure-post-state", dev_post, 1e-12);
  }

  {
    double dev_bob = 0.0;
    double dev_charlie = 0.0;
    for (double s : fixed_grid) {
      dev_bob = std::max(dev_bob, dilation_deviation(bob_usd(s)));
      dev_charlie = std::max(dev_charlie, dilation_deviation(charlie_usd(s)));
    }
    add("first-receiver-dilation", dev_bob, 1e-10);
    add("second-receiver-dilation", dev_charlie, 1e-10);
  }

  {
    PortMapping mapping = PortMapping::canonical();
    double dev = 0.0;
    for (double s : fixed_grid) {
      std::array<Operator2, 9> chain = detector_kraus_chain(s);
      for (Sign sign : both_signs) {
        ProbTable expect = analytic_detector_probs(s, sign, mapping);
        ProbTable composed{};
        PolarizationState psi = prepare_alice(s, sign);
        for (int bi = 0; bi < 3; ++bi) {
          for (int ci = 0; ci < 3; ++ci) {
            Detector d = mapping.detector_for(outcome_order[static_cast<size_t>(bi)],
                                              outcome_order[static_cast<size_t>(ci)]);
            composed.at(d.mu, d.k) +=
                norm_squared(chain[static_cast<size_t>(bi * 3 + ci)].apply(psi));
          }
        }
        for (int mu = 2; mu <= 4; ++mu) {
          for (Outcome k : outcome_order) {
            dev = std::max(dev, std::abs(expect.at(mu, k) - composed.at(mu, k)));
          }
        }
      }
    }
    add("table-matches-composition", dev, 1e-12);
  }

  {
    NetworkParams params{};
    params.hwp_offset[hwp_i1_cw] = options.bob_cw_fault_rad;
    PortMapping mapping = PortMapping::canonical();
    Rng rng(options.seed);
    double dev_match = 0.0;
    double dev_isometry = 0.0;
    for (int i = 0; i < options.random_s_count; ++i) {
      double s = rng.uniform(0.01, 0.99);
      std::array<Operator2, 9> chain = detector_kraus_chain(s);
      SetupTransfer setup = compile_setup(s, params, mapping);
      for (int path = 0; path < 9; ++path) {
        dev_match = std::max(dev_match,
                             aligned_frobenius_distance(chain[static_cast<size_t>(path)],
                                                        setup.block[static_cast<size_t>(path)]));
      }
      dev_isometry = std::max(dev_isometry, setup.isometry_deviation());
    }
    add("optics-matches-chain", dev_match, 1e-10);
    add("optics-isometry", dev_isometry, 1e-12);
  }

  {
    SessionConfig cfg;
    cfg.s = 0.25;
    cfg.trials = 200000;
    cfg.alice_policy = AlicePolicy::uniform_random;
    cfg.seed = mix_u64(options.seed, 11);
    SessionStats stats = run_session(cfg);
    double dev = 0.0;
    for (Sign sign : both_signs) {
      ProbTable expect = analytic_detector_probs(cfg.s, sign, cfg.mapping);
      auto n = stats.sign_totals[static_cast<size_t>(sign_index(sign))];
      if (n == 0) {
        dev = inf;
        break;
      }
      for (int mu = 2; mu <= 4; ++mu) {
        for (Outcome k : outcome_order) {
          double p = expect.at(mu, k);
          uint64_t c = stats.counts_by_sign[static_cast<size_t>(sign_index(sign))]
                                           [static_cast<size_t>(mu - 2)]
                                           [static_cast<size_t>(outcome_index(k))];
          if (p == 0.0) {
            if (c != 0) dev = inf;
            continue;
          }
          double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
          double phat = static_cast<double>(c) / static_cast<double>(n);
          dev = std::max(dev, std::abs(phat - p) / sigma);
        }
      }
    }
    double p = joint_success_probability(cfg.s);
    double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.trials));
    dev = std::max(dev, std::abs(stats.p_succ() - p) / sigma);
    add("session-frequencies", dev, 4.5);
  }

  return report;
}

}  // namespace susd
