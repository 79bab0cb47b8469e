#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "susd/counting.h"
#include "susd/imperfection.h"
#include "susd/protocol.h"

namespace susd {

inline constexpr const char *tool_version = "1.0.0";

struct ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Full run description, mirrored one-to-one by the JSON config file. Unknown
// keys anywhere in the document are rejected so a typo cannot silently fall
// back to a default.
struct RunConfig {
  std::vector<double> s_grid = {0.05, 0.10, 0.20, 0.30, 0.50, 0.70, 0.90};
  // "default", "config", or "cli": recorded in output metadata because the
  // default grid is a tool choice, not measured ground truth.
  std::string s_grid_origin = "default";
  AlicePolicy alice_policy = AlicePolicy::fixed_minus;
  uint64_t trials = 100000;
  uint64_t seed = 0;
  bool seed_in_config = false;  // whether the config document set the seed
  std::string out = "results";
  std::string format = "csv";  // "csv" or "json"
  int threads = 1;
  bool randomize_mapping_per_trial = false;
  PortMapping mapping = PortMapping::canonical();
  ImperfectionConfig imperfections;
  SourceConfig source;
};

const char *alice_policy_name(AlicePolicy p);

// Parses and validates a config document; throws ConfigError with a message
// naming the offending key.
RunConfig parse_run_config_json(const std::string &text);
RunConfig load_run_config_file(const std::string &path);

// FNV-1a over a canonical dump of the result-defining fields (grid, policy,
// trials, relabeling, mapping, imperfections, source). Seed, output location,
// format, and worker count are excluded: the first is reported separately and
// the rest must not affect emitted numbers.
std::string config_hash(const RunConfig &cfg);

// One output line per (s, input state, detector). Optional fields are absent
// when the command does not produce them; the raw (unsubtracted) estimates
// appear only in JSON output because the CSV column set is fixed.
struct DetectorRow {
  double s = 0.0;
  Sign state = Sign::minus;
  int mu = 2;
  Outcome k = Outcome::inconclusive;
  double p_analytic = 0.0;
  std::optional<double> p_mean;
  std::optional<double> p_std;
  std::optional<double> p_env_min;
  std::optional<double> p_env_max;
  std::optional<double> p_mean_raw;
  std::optional<double> p_std_raw;
};

struct SuccessRow {
  double s = 0.0;
  double p_succ_analytic = 0.0;
  std::optional<double> p_succ_mean;
  std::optional<double> p_succ_std;
  std::optional<double> p_succ_env_min;
  std::optional<double> p_succ_env_max;
};

struct ResultBundle {
  std::string command;
  std::string version = tool_version;
  uint64_t seed = 0;
  std::string hash;
  std::string s_grid_origin;
  std::vector<double> s_grid;
  AlicePolicy alice_policy = AlicePolicy::fixed_minus;
  std::vector<DetectorRow> detectors;
  std::vector<SuccessRow> success;
};

// Closed-form tables only.
ResultBundle build_analytic_bundle(const RunConfig &cfg);
// Trial sessions feeding the photon-counting chain: per input state, the
// session estimates the detector table, counting draws 45-run data from it,
// and the background-subtracted per-run statistics become p_mean / p_std.
ResultBundle build_simulate_bundle(const RunConfig &cfg);
// Imperfection-sampling envelopes.
ResultBundle build_montecarlo_bundle(const RunConfig &cfg);

// "%.15g"
std::string format_g15(double v);

std::string render_detector_csv(const ResultBundle &b);
std::string render_success_csv(const ResultBundle &b);
std::string render_json(const ResultBundle &b);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partial file. Throws std::runtime_error on IO failure.
void write_file_atomic(const std::string &path, const std::string &content);

// <out>.detectors.csv and <out>.success.csv for format "csv", <out>.json for
// format "json". Returns the paths written.
std::vector<std::string> write_bundle(const ResultBundle &b, const std::string &out,
                                      const std::string &format);

}  // namespace susd
