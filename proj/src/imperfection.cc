#include "susd/imperfection.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace susd {

namespace {

constexpr double deg = std::numbers::pi / 180.0;

void validate_config(const ImperfectionConfig &cfg) {
  if (!std::isfinite(cfg.hwp_jitter_max_deg) || cfg.hwp_jitter_max_deg < 0.0) {
    throw std::invalid_argument("imperfections: hwp_jitter_max_deg must be >= 0");
  }
  if (!std::isfinite(cfg.pbs_loss_max) || cfg.pbs_loss_max < 0.0 || cfg.pbs_loss_max > 1.0) {
    throw std::invalid_argument("imperfections: pbs_loss_max must lie in [0, 1]");
  }
  if (!std::isfinite(cfg.mode_mismatch_max) || cfg.mode_mismatch_max < 0.0 ||
      cfg.mode_mismatch_max > 1.0) {
    throw std::invalid_argument("imperfections: mode_mismatch_max must lie in [0, 1]");
  }
  if (cfg.samples == 0) {
    throw std::invalid_argument("imperfections: samples must be positive");
  }
}

}  // namespace

PerturbedSetup sample_imperfection(const ImperfectionConfig &cfg, Rng &rng) {
  validate_config(cfg);
  double jitter = cfg.hwp_jitter_max_deg * deg;
  bool extreme = cfg.sampling == ImperfectionConfig::Sampling::extreme;

  auto draw_symmetric = [&](double bound) {
    if (bound == 0.0) return 0.0;
    if (extreme) return rng.uniform_index(2) == 0 ? -bound : bound;
    return rng.uniform(-bound, bound);
  };
  auto draw_positive = [&](double bound) {
    if (bound == 0.0) return 0.0;
    if (extreme) return rng.uniform_index(2) == 0 ? 0.0 : bound;
    return rng.uniform(0.0, bound);
  };

  PerturbedSetup setup;
  setup.alice_hwp_offset = draw_symmetric(jitter);
  for (auto &offset : setup.network.hwp_offset) {
    offset = draw_symmetric(jitter);
  }
  for (auto &pbs : setup.network.pbs) {
    pbs.loss_h = draw_positive(cfg.pbs_loss_max);
    pbs.loss_v = draw_positive(cfg.pbs_loss_max);
  }
  for (auto &mm : setup.mode_mismatch) {
    mm = draw_positive(cfg.mode_mismatch_max);
  }
  return setup;
}

namespace {

// Incoherent mixture of unnormalized amplitude vectors riding one path.
// Component weight is its squared norm; components never re-interfere
// because the network splits but never recombines paths.
using Mixture = std::vector<PolarizationState>;

Mixture apply_op(const Operator2 &op, const Mixture &mix) {
  Mixture out;
  out.reserve(mix.size());
  for (const auto &c : mix) {
    out.push_back(op.apply(c));
  }
  return out;
}

double intensity(const Mixture &mix) {
  double acc = 0.0;
  for (const auto &c : mix) {
    acc += norm_squared(c);
  }
  return acc;
}

// Exchange a fraction eps of intensity between the two output ports of one
// interferometer, polarization kept, coherence dropped.
void mix_ports(Mixture &port0, Mixture &port1, double eps) {
  if (eps == 0.0) return;
  double keep = std::sqrt(1.0 - eps);
  double leak = std::sqrt(eps);
  Mixture new0, new1;
  new0.reserve(port0.size() + port1.size());
  new1.reserve(port0.size() + port1.size());
  for (const auto &c : port0) {
    new0.push_back({c.c_h * keep, c.c_v * keep});
    new1.push_back({c.c_h * leak, c.c_v * leak});
  }
  for (const auto &c : port1) {
    new1.push_back({c.c_h * keep, c.c_v * keep});
    new0.push_back({c.c_h * leak, c.c_v * leak});
  }
  port0 = std::move(new0);
  port1 = std::move(new1);
}

}  // namespace

PerturbedProbs perturbed_detector_probs(double s, Sign alice, const PerturbedSetup &setup,
                                        const PortMapping &mapping) {
  for (double mm : setup.mode_mismatch) {
    if (!std::isfinite(mm) || mm < 0.0 || mm > 1.0) {
      throw std::domain_error("perturbed_detector_probs: mode mismatch must lie in [0, 1]");
    }
  }
  NetworkStages st = build_network_stages(s, setup.network, mapping);

  PolarizationState input =
      hwp_jones(alice_prep_angle(s, alice) + setup.alice_hwp_offset).apply(state_h());

  Mixture port0 = {st.i1_port[0].apply(input)};
  Mixture port1 = {st.i1_port[1].apply(input)};
  mix_ports(port0, port1, setup.mode_mismatch[0]);

  ProbTable table;
  double throughput = 0.0;
  for (Outcome bo : outcome_order) {
    int bi = outcome_index(bo);
    const Mixture &from_i1 = bo == Outcome::inconclusive ? port1 : port0;
    Mixture path = apply_op(st.route[bi], from_i1);

    Mixture out0 = apply_op(st.imu_port[bi][0], path);
    Mixture out1 = apply_op(st.imu_port[bi][1], path);
    mix_ports(out0, out1, setup.mode_mismatch[st.mu[bi] - 1]);

    for (Outcome co : outcome_order) {
      int ci = outcome_index(co);
      const Mixture &port = co == Outcome::inconclusive ? out1 : out0;
      double p = intensity(apply_op(st.readout[bi][ci], port));
      Detector d = st.label[bi][ci];
      table.at(d.mu, d.k) += p;
      throughput += p;
    }
  }

  if (throughput < 1e-12) {
    throw std::runtime_error("perturbed_detector_probs: apparatus transmits nothing");
  }
  for (auto &row : table.cell) {
    for (double &p : row) {
      p /= throughput;
    }
  }
  return {table, throughput};
}

EnvelopeResult mc_envelope(std::span<const double> s_grid, Sign alice,
                           const ImperfectionConfig &cfg, uint64_t seed,
                           int n_threads) {
  validate_config(cfg);
  if (s_grid.empty()) {
    throw std::invalid_argument("mc_envelope: empty grid");
  }
  if (n_threads < 1) {
    throw std::invalid_argument("mc_envelope: n_threads must be positive");
  }

  EnvelopeResult result;
  result.s_grid.assign(s_grid.begin(), s_grid.end());
  result.alice = alice;
  result.cells.resize(s_grid.size());
  result.p_succ.resize(s_grid.size());

  PortMapping mapping = PortMapping::canonical();

  for (size_t gi = 0; gi < s_grid.size(); ++gi) {
    double s = s_grid[gi];
    ProbTable ideal = analytic_detector_probs(s, alice, mapping);
    Detector success_cell = mapping.detector_for(conclusive_for(alice), conclusive_for(alice));
    uint64_t grid_seed = mix_u64(seed, gi);

    // Per-sample values: nine cells then the success cell. Stored in full so
    // the reduction can run in sample order regardless of thread count.
    std::vector<std::array<double, 10>> samples(cfg.samples);
    auto worker = [&](uint64_t begin, uint64_t end) {
      for (uint64_t i = begin; i < end; ++i) {
        Rng rng = Rng::derive(grid_seed, i);
        PerturbedSetup setup = sample_imperfection(cfg, rng);
        PerturbedProbs pp = perturbed_detector_probs(s, alice, setup, mapping);
        auto &slot = samples[i];
        int idx = 0;
        for (int mu = 2; mu <= 4; ++mu) {
          for (Outcome k : outcome_order) {
            slot[idx++] = pp.table.at(mu, k);
          }
        }
        slot[9] = pp.table.at(success_cell.mu, success_cell.k);
      }
    };

    uint64_t workers = std::min<uint64_t>(static_cast<uint64_t>(n_threads), cfg.samples);
    if (workers <= 1) {
      worker(0, cfg.samples);
    } else {
      std::vector<std::thread> threads;
      threads.reserve(workers);
      for (uint64_t w = 0; w < workers; ++w) {
        threads.emplace_back(worker, cfg.samples * w / workers,
                             cfg.samples * (w + 1) / workers);
      }
      for (auto &t : threads) t.join();
    }

    auto reduce = [&](int idx, double ideal_value) {
      Envelope env;
      env.min = samples[0][idx];
      env.max = samples[0][idx];
      double sum = 0.0;
      for (const auto &slot : samples) {
        env.min = std::min(env.min, slot[idx]);
        env.max = std::max(env.max, slot[idx]);
        sum += slot[idx];
      }
      env.mean = sum / static_cast<double>(cfg.samples);
      double sq = 0.0;
      for (const auto &slot : samples) {
        double d = slot[idx] - env.mean;
        sq += d * d;
      }
      env.stddev = cfg.samples > 1
                       ? std::sqrt(sq / static_cast<double>(cfg.samples - 1))
                       : 0.0;
      if (cfg.envelope == ImperfectionConfig::EnvelopeKind::minmax) {
        // The unperturbed apparatus lies in the closure of the sampled set;
        // folding it in keeps the ideal curve inside the band even where the
        // ideal value sits on the boundary of the reachable range.
        env.min = std::min(env.min, ideal_value);
        env.max = std::max(env.max, ideal_value);
      } else {
        std::vector<double> sorted(cfg.samples);
        for (uint64_t i = 0; i < cfg.samples; ++i) sorted[i] = samples[i][idx];
        std::sort(sorted.begin(), sorted.end());
        auto rank = [&](double q) {
          double pos = q * static_cast<double>(cfg.samples - 1);
          return sorted[static_cast<size_t>(std::llround(pos))];
        };
        env.min = rank(0.025);
        env.max = rank(0.975);
      }
      return env;
    };

    int idx = 0;
    for (int mu = 2; mu <= 4; ++mu) {
      for (Outcome k : outcome_order) {
        result.cells[gi][mu - 2][outcome_index(k)] = reduce(idx++, ideal.at(mu, k));
      }
    }
    result.p_succ[gi] = reduce(9, joint_success_probability(s));
  }
  return result;
}

}  // namespace susd
