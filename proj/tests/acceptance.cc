// Acceptance gate: one pass/fail line per criterion, exit code equal to the
// number of failures.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "susd/counting.h"
#include "susd/imperfection.h"
#include "susd/optics.h"
#include "susd/protocol.h"
#include "susd/usd.h"
#include "susd/validation.h"

using namespace susd;
namespace fs = std::filesystem;

namespace {

const std::vector<double> default_grid = {0.05, 0.10, 0.20, 0.30, 0.50, 0.70, 0.90};

int worker_count() {
  unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::clamp(hw, 1u, 8u));
}

struct Criterion {
  int id;
  const char *name;
  bool pass;
  std::string detail;
};

// Criteria 1 and 3 share one batch of million-trial sessions per grid point.
struct SessionBatch {
  std::vector<SessionStats> stats;
  double seconds = 0.0;
};

SessionBatch run_session_batch() {
  SessionBatch batch;
  auto t0 = std::chrono::steady_clock::now();
  for (size_t i = 0; i < default_grid.size(); ++i) {
    SessionConfig cfg;
    cfg.s = default_grid[i];
    cfg.trials = 1000000;
    cfg.alice_policy = AlicePolicy::uniform_random;
    cfg.seed = mix_u64(0xacce97ed, i);
    batch.stats.push_back(run_session(cfg, worker_count()));
  }
  batch.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return batch;
}

Criterion criterion_success_law(const SessionBatch &batch) {
  double worst_z = 0.0;
  double worst_analytic = 0.0;
  bool pass = true;
  for (size_t i = 0; i < default_grid.size(); ++i) {
    double s = default_grid[i];
    double p = (1.0 - std::sqrt(s)) * (1.0 - std::sqrt(s));
    double sigma = std::sqrt(p * (1.0 - p) / 1e6);
    double z = std::abs(batch.stats[i].p_succ() - p) / sigma;
    worst_z = std::max(worst_z, z);
    worst_analytic = std::max(worst_analytic, std::abs(joint_success_probability(s) - p));
  }
  pass = worst_z < 3.0 && worst_analytic < 1e-12 && batch.seconds < 30.0;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "max |z| %.2f (limit 3), analytic dev %.2e (limit 1e-12), %.1f s (limit 30)",
                worst_z, worst_analytic, batch.seconds);
  return {1, "joint success law", pass, buf};
}

Criterion criterion_detector_table() {
  PortMapping mapping = PortMapping::canonical();
  double worst_formula = 0.0;
  double worst_oracle = 0.0;
  double worst_quarter = 0.0;
  std::vector<double> grid = default_grid;
  grid.push_back(0.25);
  for (double s : grid) {
    double rs = std::sqrt(s);
    ProbTable analytic = analytic_detector_probs(s, Sign::minus, mapping);

    // Closed forms for the '-' input: the four live cells plus dark
    // everything else.
    ProbTable expected{};
    expected.at(4, Outcome::conclusive_minus) = (1.0 - rs) * (1.0 - rs);
    expected.at(4, Outcome::inconclusive) = (1.0 - rs) * rs;
    expected.at(2, Outcome::conclusive_minus) = rs * (1.0 - rs);
    expected.at(2, Outcome::inconclusive) = s;

    // Independent route: exhaustively compose the two outcome distributions
    // with the forwarded state in between.
    ProbTable composed{};
    KrausSet bob = bob_usd(s);
    KrausSet charlie = charlie_usd(s);
    PolarizationState input = prepare_alice(s, Sign::minus);
    for (const auto &[bo, p1] : outcome_distribution(bob, input)) {
      if (p1 < 1e-30) continue;
      PolarizationState forwarded =
          reprepare(bo, normalized(bob.op(bo).apply(input)), s);
      for (const auto &[co, p2] : outcome_distribution(charlie, forwarded)) {
        Detector d = mapping.detector_for(bo, co);
        composed.at(d.mu, d.k) += p1 * p2;
      }
    }

    for (int mu = 2; mu <= 4; ++mu) {
      for (Outcome k : outcome_order) {
        double want = expected.at(mu, k);
        worst_formula = std::max(worst_formula, std::abs(analytic.at(mu, k) - want));
        worst_oracle = std::max(worst_oracle, std::abs(composed.at(mu, k) - want));
        if (s == 0.25 && want > 0.0) {
          worst_quarter = std::max(worst_quarter, std::abs(analytic.at(mu, k) - 0.25));
        }
      }
    }
  }
  bool pass = worst_formula < 1e-12 && worst_oracle < 1e-12 && worst_quarter < 1e-15;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "formula dev %.2e, composed-oracle dev %.2e, s=1/4 cell dev %.2e",
                worst_formula, worst_oracle, worst_quarter);
  return {2, "detector probability table", pass, buf};
}

Criterion criterion_unambiguity(const SessionBatch &batch) {
  uint64_t wrong = 0;
  for (const SessionStats &st : batch.stats) {
    wrong += st.wrong_conclusive_count;
  }
  double worst_cross = 0.0;
  for (double s : default_grid) {
    KrausSet bob = bob_usd(s);
    KrausSet charlie = charlie_usd(s);
    for (Sign sign : {Sign::plus, Sign::minus}) {
      Outcome bad = conclusive_for(other_sign(sign));
      worst_cross = std::max(
          worst_cross, norm_squared(bob.op(bad).apply(prepare_alice(s, sign))));
      worst_cross = std::max(
          worst_cross, norm_squared(charlie.op(bad).apply(prepare_phi(s, sign))));
    }
  }
  bool pass = wrong == 0 && worst_cross < 1e-24;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "wrong conclusive events %llu of 7e6 trials, analytic cross term %.2e",
                static_cast<unsigned long long>(wrong), worst_cross);
  return {3, "unambiguity", pass, buf};
}

Criterion criterion_optics_equivalence() {
  PortMapping mapping = PortMapping::canonical();
  Rng rng(20260816);
  double worst_block = 0.0;
  double worst_isometry = 0.0;
  for (int i = 0; i < 50; ++i) {
    double s = rng.uniform(0.01, 0.99);
    SetupTransfer setup = compile_setup(s, NetworkParams{}, mapping);
    std::array<Operator2, 9> chain = detector_kraus_chain(s);
    for (Outcome bo : outcome_order) {
      for (Outcome co : outcome_order) {
        int idx = outcome_index(bo) * 3 + outcome_index(co);
        const Operator2 &optical = setup.block_for(mapping.detector_for(bo, co));
        worst_block = std::max(worst_block,
                               aligned_frobenius_distance(chain[static_cast<size_t>(idx)],
                                                          optical));
      }
    }
    worst_isometry = std::max(worst_isometry, setup.isometry_deviation());
  }
  bool pass = worst_block < 1e-10 && worst_isometry < 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "path-block distance %.2e (limit 1e-10), isometry dev %.2e (limit 1e-12)",
                worst_block, worst_isometry);
  return {4, "optical network equals measurement chain", pass, buf};
}

Criterion criterion_completeness_dilation() {
  double worst_complete = 0.0;
  double worst_unitary = 0.0;
  double worst_action = 0.0;
  for (double s : default_grid) {
    for (bool second : {false, true}) {
      KrausSet m = second ? charlie_usd(s) : bob_usd(s);
      worst_complete = std::max(worst_complete, verify_completeness(m));
      NeumarkUnitary nu = neumark_dilation(m);
      worst_unitary = std::max(worst_unitary, unitarity_deviation(nu));
      Operator2 conclusive =
          m.op(Outcome::conclusive_plus) + m.op(Outcome::conclusive_minus);
      for (Sign sign : {Sign::plus, Sign::minus}) {
        PolarizationState in = second ? prepare_phi(s, sign) : prepare_alice(s, sign);
        auto out = nu.apply(in);
        PolarizationState top = conclusive.apply(in);
        PolarizationState bottom = m.op(Outcome::inconclusive).apply(in);
        worst_action = std::max({worst_action, std::abs(out[0] - top.c_h),
                                 std::abs(out[1] - top.c_v), std::abs(out[2] - bottom.c_h),
                                 std::abs(out[3] - bottom.c_v)});
      }
    }
  }
  bool pass = worst_complete < 1e-12 && worst_unitary < 1e-10 && worst_action < 1e-10;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "completeness dev %.2e, unitarity dev %.2e, action dev %.2e",
                worst_complete, worst_unitary, worst_action);
  return {5, "completeness and unitary extension", pass, buf};
}

Criterion criterion_second_stage_optimality() {
  double worst_fail = 0.0;
  double worst_fid = 0.0;
  for (double s : default_grid) {
    KrausSet charlie = charlie_usd(s);
    PolarizationState post_plus =
        normalized(charlie.op(Outcome::inconclusive).apply(prepare_phi(s, Sign::plus)));
    PolarizationState post_minus =
        normalized(charlie.op(Outcome::inconclusive).apply(prepare_phi(s, Sign::minus)));
    worst_fid = std::max(worst_fid, std::abs(1.0 - fidelity(post_plus, post_minus)));
    for (Sign sign : {Sign::plus, Sign::minus}) {
      double p_fail =
          norm_squared(charlie.op(Outcome::inconclusive).apply(prepare_phi(s, sign)));
      double overlap_mag =
          std::abs(overlap(prepare_phi(s, Sign::plus), prepare_phi(s, Sign::minus)));
      worst_fail = std::max(worst_fail, std::abs(p_fail - overlap_mag));
    }
  }
  bool pass = worst_fail < 1e-12 && worst_fid < 1e-12;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "failure-probability dev %.2e, post-state fidelity dev %.2e", worst_fail,
                worst_fid);
  return {6, "second-stage optimality", pass, buf};
}

Criterion criterion_error_envelopes() {
  int threads = worker_count();
  ImperfectionConfig cfg;  // defaults: 1 degree, 3% loss, 3% mismatch, 1e4 samples
  EnvelopeResult env = mc_envelope(default_grid, Sign::minus, cfg, 0xe17e10e5ULL, threads);

  bool contained = true;
  bool widths = true;
  PortMapping mapping = PortMapping::canonical();
  for (size_t g = 0; g < default_grid.size(); ++g) {
    ProbTable ideal = analytic_detector_probs(default_grid[g], Sign::minus, mapping);
    for (int mu = 2; mu <= 4; ++mu) {
      for (Outcome k : outcome_order) {
        const Envelope &e = env.cells[g][static_cast<size_t>(mu - 2)]
                                     [static_cast<size_t>(outcome_index(k))];
        contained = contained && e.min <= ideal.at(mu, k) && ideal.at(mu, k) <= e.max;
        widths = widths && (e.max - e.min) > 0.0;
      }
    }
    double ps = joint_success_probability(default_grid[g]);
    contained = contained && env.p_succ[g].min <= ps && ps <= env.p_succ[g].max;
    widths = widths && (env.p_succ[g].max - env.p_succ[g].min) > 0.0;
  }

  ImperfectionConfig zero;
  zero.hwp_jitter_max_deg = 0.0;
  zero.pbs_loss_max = 0.0;
  zero.mode_mismatch_max = 0.0;
  zero.samples = 100;
  EnvelopeResult flat = mc_envelope(default_grid, Sign::minus, zero, 5, threads);
  double worst_collapse = 0.0;
  for (size_t g = 0; g < default_grid.size(); ++g) {
    ProbTable ideal = analytic_detector_probs(default_grid[g], Sign::minus, mapping);
    for (int mu = 2; mu <= 4; ++mu) {
      for (Outcome k : outcome_order) {
        const Envelope &e = flat.cells[g][static_cast<size_t>(mu - 2)]
                                      [static_cast<size_t>(outcome_index(k))];
        worst_collapse = std::max({worst_collapse, e.max - e.min,
                                   std::abs(e.mean - ideal.at(mu, k))});
      }
    }
    worst_collapse = std::max({worst_collapse, flat.p_succ[g].max - flat.p_succ[g].min,
                               std::abs(flat.p_succ[g].mean -
                                        joint_success_probability(default_grid[g]))});
  }

  // Width grows with the imperfection scale.
  std::array<double, 3> ladder{};
  std::array<double, 3> scales = {0.25, 0.5, 1.0};
  for (size_t i = 0; i < scales.size(); ++i) {
    ImperfectionConfig scaled;
    scaled.hwp_jitter_max_deg = 1.0 * scales[i];
    scaled.pbs_loss_max = 0.03 * scales[i];
    scaled.mode_mismatch_max = 0.03 * scales[i];
    scaled.samples = 2000;
    EnvelopeResult e = mc_envelope(default_grid, Sign::minus, scaled, 42, threads);
    for (const Envelope &ps : e.p_succ) {
      ladder[i] += ps.max - ps.min;
    }
  }
  bool monotone = ladder[1] > 1.15 * ladder[0] && ladder[2] > 1.15 * ladder[1];

  bool pass = contained && widths && worst_collapse < 1e-12 && monotone;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "containment %s, widths %s, collapse dev %.2e, width ladder %.3g/%.3g/%.3g",
                contained ? "yes" : "NO", widths ? "yes" : "NO", worst_collapse, ladder[0],
                ladder[1], ladder[2]);
  return {7, "imperfection envelopes", pass, buf};
}

Criterion criterion_counting_statistics() {
  PortMapping mapping = PortMapping::canonical();
  ProbTable table = analytic_detector_probs(0.25, Sign::minus, mapping);
  std::array<double, 9> probs{};
  for (int i = 0; i < 9; ++i) {
    Detector d = detector_from_flat_index(i);
    probs[static_cast<size_t>(i)] = table.at(d.mu, d.k);
  }

  SourceConfig src;
  CountData data = simulate_counts(probs, src, 0xc0071);
  ProbEstimate sub = estimate_probs_subtracted(data, src);
  ProbEstimate raw = estimate_probs(data);

  double root_runs = std::sqrt(static_cast<double>(src.runs));
  double signal_total = src.pair_rate_hz * src.window_s * src.efficiency;
  double floor = src.accidental_rate_hz * src.window_s / 9.0;

  double worst_roundtrip_z = 0.0;
  bool dark_reduced = true;
  double worst_signal_z = 0.0;
  for (int i = 0; i < 9; ++i) {
    size_t idx = static_cast<size_t>(i);
    if (probs[idx] > 0.0) {
      double se = sub.p_std[idx] / root_runs;
      worst_roundtrip_z =
          std::max(worst_roundtrip_z, std::abs(sub.p[idx] - probs[idx]) / se);

      double expect_signal = signal_total * probs[idx];  // 5850 at s = 1/4
      double mean_count = 0.0;
      for (const auto &run : data.counts) {
        mean_count += static_cast<double>(run[idx]);
      }
      mean_count /= static_cast<double>(src.runs);
      double sigma = std::sqrt(expect_signal + floor) / root_runs;
      worst_signal_z =
          std::max(worst_signal_z, std::abs(mean_count - floor - expect_signal) / sigma);
    } else {
      // The accidental floor is removed rather than reported as signal.
      double floor_share = floor / (signal_total + 9.0 * floor);
      dark_reduced = dark_reduced && sub.p[idx] < floor_share && sub.p[idx] < raw.p[idx];
    }
  }

  SourceConfig longer = src;
  longer.window_s = 60.0;
  ProbEstimate sub_long =
      estimate_probs_subtracted(simulate_counts(probs, longer, 0xc0072), longer);
  double short_spread = 0.0;
  double long_spread = 0.0;
  for (int i = 0; i < 9; ++i) {
    size_t idx = static_cast<size_t>(i);
    if (probs[idx] > 0.0) {
      short_spread += sub.p_std[idx];
      long_spread += sub_long.p_std[idx];
    }
  }
  double ratio = long_spread / short_spread;

  bool pass = worst_roundtrip_z < 3.0 && dark_reduced && worst_signal_z < 3.0 &&
              ratio > 0.35 && ratio < 0.65;
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "round-trip |z| %.2f, signal-count |z| %.2f, dark cells reduced %s, "
                "4x-window std ratio %.3f (want 0.5 +/- 30%%)",
                worst_roundtrip_z, worst_signal_z, dark_reduced ? "yes" : "NO", ratio);
  return {8, "counting statistics", pass, buf};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Criterion criterion_reproducibility() {
  const char *cli = std::getenv("SUSD_CLI_PATH");
  if (cli == nullptr) {
    return {9, "byte-identical reproduction", false, "SUSD_CLI_PATH is not set"};
  }
  fs::path dir = fs::temp_directory_path() / "susd_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::path cfg_path = dir / "cfg.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"s_grid": [0.1, 0.25], "trials": 20000, "seed": 321,
               "alice_policy": "random",
               "source": {"runs": 6, "pair_rate_hz": 30000, "window_s": 1.0},
               "imperfections": {"samples": 300}})";
  }

  auto run = [&](const std::string &args) {
    std::string cmd = std::string("\"") + cli + "\" " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  std::string cfg_arg = "--config \"" + cfg_path.string() + "\"";

  bool ok = true;
  ok = ok && run("simulate " + cfg_arg + " --out \"" + (dir / "s1").string() + "\"");
  ok = ok && run("simulate " + cfg_arg + " --out \"" + (dir / "s2").string() + "\"");
  ok = ok && run("simulate " + cfg_arg + " --threads 4 --out \"" + (dir / "s4").string() + "\"");
  ok = ok && run("montecarlo " + cfg_arg + " --format json --out \"" +
                 (dir / "m1").string() + "\"");
  ok = ok && run("montecarlo " + cfg_arg + " --format json --threads 3 --out \"" +
                 (dir / "m3").string() + "\"");
  ok = ok && run("analytic " + cfg_arg + " --out \"" + (dir / "a1").string() + "\"");
  ok = ok && run("analytic " + cfg_arg + " --out \"" + (dir / "a2").string() + "\"");
  if (!ok) {
    return {9, "byte-identical reproduction", false, "a tool invocation failed"};
  }

  bool repeat_equal = slurp(dir / "s1.detectors.csv") == slurp(dir / "s2.detectors.csv") &&
                      slurp(dir / "s1.success.csv") == slurp(dir / "s2.success.csv") &&
                      slurp(dir / "a1.detectors.csv") == slurp(dir / "a2.detectors.csv");
  bool thread_equal = slurp(dir / "s1.detectors.csv") == slurp(dir / "s4.detectors.csv") &&
                      slurp(dir / "s1.success.csv") == slurp(dir / "s4.success.csv") &&
                      slurp(dir / "m1.json") == slurp(dir / "m3.json");
  bool nonempty = !slurp(dir / "s1.detectors.csv").empty() && !slurp(dir / "m1.json").empty();
  fs::remove_all(dir);

  bool pass = repeat_equal && thread_equal && nonempty;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "repeat runs identical %s, worker counts identical %s",
                repeat_equal ? "yes" : "NO", thread_equal ? "yes" : "NO");
  return {9, "byte-identical reproduction", pass, buf};
}

}  // namespace

int main() {
  std::vector<Criterion> results;
  SessionBatch batch = run_session_batch();
  results.push_back(criterion_success_law(batch));
  results.push_back(criterion_detector_table());
  results.push_back(criterion_unambiguity(batch));
  results.push_back(criterion_optics_equivalence());
  results.push_back(criterion_completeness_dilation());
  results.push_back(criterion_second_stage_optimality());
  results.push_back(criterion_error_envelopes());
  results.push_back(criterion_counting_statistics());
  results.push_back(criterion_reproducibility());

  int failures = 0;
  for (const Criterion &c : results) {
    std::printf("%s criterion %d: %s (%s)\n", c.pass ? "PASS" : "FAIL", c.id, c.name,
                c.detail.c_str());
    if (!c.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures;
}
