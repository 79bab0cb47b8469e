#include "susd/result_io.h"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <span>

#include "json.hpp"

namespace susd {

using ordered_json = nlohmann::ordered_json;

const char *alice_policy_name(AlicePolicy p) {
  switch (p) {
    case AlicePolicy::fixed_plus: return "plus";
    case AlicePolicy::fixed_minus: return "minus";
    default: return "random";
  }
}

namespace {

void reject_unknown_keys(const ordered_json &obj, const char *where,
                         std::initializer_list<const char *> allowed) {
  for (const auto &item : obj.items()) {
    bool known = false;
    for (const char *key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw ConfigError(std::string("config: unknown key \"") + item.key() + "\" in " + where);
    }
  }
}

double require_number(const ordered_json &v, const char *key) {
  if (!v.is_number()) {
    throw ConfigError(std::string("config: \"") + key + "\" must be a number");
  }
  double d = v.get<double>();
  if (!std::isfinite(d)) {
    throw ConfigError(std::string("config: \"") + key + "\" must be finite");
  }
  return d;
}

double require_in_range(const ordered_json &v, const char *key, double lo, double hi) {
  double d = require_number(v, key);
  if (d < lo || d > hi) {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "config: \"%s\" must lie in [%g, %g]", key, lo, hi);
    throw ConfigError(buf);
  }
  return d;
}

uint64_t require_u64(const ordered_json &v, const char *key, uint64_t min_value) {
  if (!v.is_number_unsigned()) {
    throw ConfigError(std::string("config: \"") + key + "\" must be a non-negative integer");
  }
  uint64_t u = v.get<uint64_t>();
  if (u < min_value) {
    throw ConfigError(std::string("config: \"") + key + "\" is below its minimum");
  }
  return u;
}

std::string require_string(const ordered_json &v, const char *key) {
  if (!v.is_string()) {
    throw ConfigError(std::string("config: \"") + key + "\" must be a string");
  }
  return v.get<std::string>();
}

AlicePolicy parse_policy(const std::string &name) {
  if (name == "plus") return AlicePolicy::fixed_plus;
  if (name == "minus") return AlicePolicy::fixed_minus;
  if (name == "random") return AlicePolicy::uniform_random;
  throw ConfigError("config: \"alice_policy\" must be \"plus\", \"minus\", or \"random\"");
}

Outcome parse_outcome_char(char c) {
  switch (c) {
    case '+': return Outcome::conclusive_plus;
    case '-': return Outcome::conclusive_minus;
    case 'i': return Outcome::inconclusive;
    default: throw ConfigError("config: detector labels must be drawn from \"+-i\"");
  }
}

PortMapping parse_mapping(const ordered_json &obj) {
  reject_unknown_keys(obj, "\"mapping\"", {"mu_for_bob", "k_for_charlie"});
  PortMapping mapping = PortMapping::canonical();
  if (obj.contains("mu_for_bob")) {
    const auto &arr = obj.at("mu_for_bob");
    if (!arr.is_array() || arr.size() != 3) {
      throw ConfigError("config: \"mu_for_bob\" must be an array of three integers");
    }
    for (int i = 0; i < 3; ++i) {
      const auto &v = arr.at(static_cast<size_t>(i));
      if (!v.is_number_integer()) {
        throw ConfigError("config: \"mu_for_bob\" entries must be integers");
      }
      int mu = v.get<int>();
      if (mu < 2 || mu > 4) {
        throw ConfigError("config: \"mu_for_bob\" entries must lie in 2..4");
      }
      mapping.mu_for_bob[static_cast<size_t>(i)] = mu;
    }
  }
  if (obj.contains("k_for_charlie")) {
    const auto &arr = obj.at("k_for_charlie");
    if (!arr.is_array() || arr.size() != 3) {
      throw ConfigError("config: \"k_for_charlie\" must be an array of three strings");
    }
    for (int row = 0; row < 3; ++row) {
      std::string labels = require_string(arr.at(static_cast<size_t>(row)), "k_for_charlie");
      if (labels.size() != 3) {
        throw ConfigError("config: each \"k_for_charlie\" row needs three labels");
      }
      for (int i = 0; i < 3; ++i) {
        mapping.k_for_charlie[static_cast<size_t>(row)][static_cast<size_t>(i)] =
            parse_outcome_char(labels[static_cast<size_t>(i)]);
      }
    }
  }
  if (!mapping.is_bijective()) {
    throw ConfigError("config: \"mapping\" must be a bijective relabeling");
  }
  return mapping;
}

void parse_imperfections(const ordered_json &obj, ImperfectionConfig &cfg) {
  reject_unknown_keys(obj, "\"imperfections\"",
                      {"hwp_jitter_max_deg", "pbs_loss_max", "mode_mismatch_max", "samples",
                       "sampling", "envelope"});
  if (obj.contains("hwp_jitter_max_deg")) {
    cfg.hwp_jitter_max_deg =
        require_in_range(obj.at("hwp_jitter_max_deg"), "hwp_jitter_max_deg", 0.0, 90.0);
  }
  if (obj.contains("pbs_loss_max")) {
    cfg.pbs_loss_max = require_in_range(obj.at("pbs_loss_max"), "pbs_loss_max", 0.0, 1.0);
  }
  if (obj.contains("mode_mismatch_max")) {
    cfg.mode_mismatch_max =
        require_in_range(obj.at("mode_mismatch_max"), "mode_mismatch_max", 0.0, 1.0);
  }
  if (obj.contains("samples")) {
    cfg.samples = require_u64(obj.at("samples"), "samples", 1);
  }
  if (obj.contains("sampling")) {
    std::string name = require_string(obj.at("sampling"), "sampling");
    if (name == "uniform") {
      cfg.sampling = ImperfectionConfig::Sampling::uniform;
    } else if (name == "extreme") {
      cfg.sampling = ImperfectionConfig::Sampling::extreme;
    } else {
      throw ConfigError("config: \"sampling\" must be \"uniform\" or \"extreme\"");
    }
  }
  if (obj.contains("envelope")) {
    std::string name = require_string(obj.at("envelope"), "envelope");
    if (name == "minmax") {
      cfg.envelope = ImperfectionConfig::EnvelopeKind::minmax;
    } else if (name == "percentile") {
      cfg.envelope = ImperfectionConfig::EnvelopeKind::percentile;
    } else {
      throw ConfigError("config: \"envelope\" must be \"minmax\" or \"percentile\"");
    }
  }
}

void parse_source(const ordered_json &obj, SourceConfig &src) {
  reject_unknown_keys(obj, "\"source\"",
                      {"pair_rate_hz", "accidental_rate_hz", "efficiency", "window_s", "runs"});
  if (obj.contains("pair_rate_hz")) {
    src.pair_rate_hz = require_in_range(obj.at("pair_rate_hz"), "pair_rate_hz", 0.0, 1e12);
  }
  if (obj.contains("accidental_rate_hz")) {
    src.accidental_rate_hz =
        require_in_range(obj.at("accidental_rate_hz"), "accidental_rate_hz", 0.0, 1e12);
  }
  if (obj.contains("efficiency")) {
    src.efficiency = require_in_range(obj.at("efficiency"), "efficiency", 0.0, 1.0);
  }
  if (obj.contains("window_s")) {
    src.window_s = require_in_range(obj.at("window_s"), "window_s", 1e-9, 1e9);
  }
  if (obj.contains("runs")) {
    src.runs = static_cast<int>(require_u64(obj.at("runs"), "runs", 2));
    if (src.runs > 1000000) {
      throw ConfigError("config: \"runs\" is unreasonably large");
    }
  }
}

}  // namespace

RunConfig parse_run_config_json(const std::string &text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error &e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw ConfigError("config: document must be a JSON object");
  }
  reject_unknown_keys(doc, "the top level",
                      {"s_grid", "alice_policy", "trials", "seed", "out", "format", "threads",
                       "randomize_mapping_per_trial", "mapping", "imperfections", "source"});

  RunConfig cfg;
  if (doc.contains("s_grid")) {
    const auto &arr = doc.at("s_grid");
    if (!arr.is_array() || arr.empty()) {
      throw ConfigError("config: \"s_grid\" must be a non-empty array");
    }
    cfg.s_grid.clear();
    for (const auto &v : arr) {
      cfg.s_grid.push_back(require_in_range(v, "s_grid", 0.0, 1.0));
    }
    cfg.s_grid_origin = "config";
  }
  if (doc.contains("alice_policy")) {
    cfg.alice_policy = parse_policy(require_string(doc.at("alice_policy"), "alice_policy"));
  }
  if (doc.contains("trials")) {
    cfg.trials = require_u64(doc.at("trials"), "trials", 1);
  }
  if (doc.contains("seed")) {
    cfg.seed = require_u64(doc.at("seed"), "seed", 0);
    cfg.seed_in_config = true;
  }
  if (doc.contains("out")) {
    cfg.out = require_string(doc.at("out"), "out");
    if (cfg.out.empty()) {
      throw ConfigError("config: \"out\" must not be empty");
    }
  }
  if (doc.contains("format")) {
    cfg.format = require_string(doc.at("format"), "format");
    if (cfg.format != "csv" && cfg.format != "json") {
      throw ConfigError("config: \"format\" must be \"csv\" or \"json\"");
    }
  }
  if (doc.contains("threads")) {
    cfg.threads = static_cast<int>(require_u64(doc.at("threads"), "threads", 1));
    if (cfg.threads > 1024) {
      throw ConfigError("config: \"threads\" is unreasonably large");
    }
  }
  if (doc.contains("randomize_mapping_per_trial")) {
    const auto &v = doc.at("randomize_mapping_per_trial");
    if (!v.is_boolean()) {
      throw ConfigError("config: \"randomize_mapping_per_trial\" must be a boolean");
    }
    cfg.randomize_mapping_per_trial = v.get<bool>();
  }
  if (doc.contains("mapping")) {
    if (!doc.at("mapping").is_object()) {
      throw ConfigError("config: \"mapping\" must be an object");
    }
    cfg.mapping = parse_mapping(doc.at("mapping"));
  }
  if (doc.contains("imperfections")) {
    if (!doc.at("imperfections").is_object()) {
      throw ConfigError("config: \"imperfections\" must be an object");
    }
    parse_imperfections(doc.at("imperfections"), cfg.imperfections);
  }
  if (doc.contains("source")) {
    if (!doc.at("source").is_object()) {
      throw ConfigError("config: \"source\" must be an object");
    }
    parse_source(doc.at("source"), cfg.source);
  }
  return cfg;
}

RunConfig load_run_config_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("config: cannot open \"" + path + "\"");
  }
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw ConfigError("config: cannot read \"" + path + "\"");
  }
  return parse_run_config_json(text);
}

namespace {

std::string mapping_rows(const PortMapping &mapping, int row) {
  std::string labels;
  for (Outcome k : mapping.k_for_charlie[static_cast<size_t>(row)]) {
    labels.push_back(outcome_char(k));
  }
  return labels;
}

}  // namespace

std::string config_hash(const RunConfig &cfg) {
  ordered_json c;
  c["s_grid"] = cfg.s_grid;
  c["alice_policy"] = alice_policy_name(cfg.alice_policy);
  c["trials"] = cfg.trials;
  c["randomize_mapping_per_trial"] = cfg.randomize_mapping_per_trial;
  c["mapping"]["mu_for_bob"] = cfg.mapping.mu_for_bob;
  c["mapping"]["k_for_charlie"] = {mapping_rows(cfg.mapping, 0), mapping_rows(cfg.mapping, 1),
                                   mapping_rows(cfg.mapping, 2)};
  c["imperfections"]["hwp_jitter_max_deg"] = cfg.imperfections.hwp_jitter_max_deg;
  c["imperfections"]["pbs_loss_max"] = cfg.imperfections.pbs_loss_max;
  c["imperfections"]["mode_mismatch_max"] = cfg.imperfections.mode_mismatch_max;
  c["imperfections"]["samples"] = cfg.imperfections.samples;
  c["imperfections"]["sampling"] =
      cfg.imperfections.sampling == ImperfectionConfig::Sampling::uniform ? "uniform" : "extreme";
  c["imperfections"]["envelope"] =
      cfg.imperfections.envelope == ImperfectionConfig::EnvelopeKind::minmax ? "minmax"
                                                                             : "percentile";
  c["source"]["pair_rate_hz"] = cfg.source.pair_rate_hz;
  c["source"]["accidental_rate_hz"] = cfg.source.accidental_rate_hz;
  c["source"]["efficiency"] = cfg.source.efficiency;
  c["source"]["window_s"] = cfg.source.window_s;
  c["source"]["runs"] = cfg.source.runs;

  std::string dump = c.dump();
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char byte : dump) {
    h ^= byte;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

namespace {

std::vector<Sign> signs_for_policy(AlicePolicy p) {
  switch (p) {
    case AlicePolicy::fixed_plus: return {Sign::plus};
    case AlicePolicy::fixed_minus: return {Sign::minus};
    default: return {Sign::plus, Sign::minus};
  }
}

// Purpose tags keep the three stochastic stages on disjoint seed streams.
constexpr uint64_t seed_tag_session = 1;
constexpr uint64_t seed_tag_counting = 2;
constexpr uint64_t seed_tag_envelope = 3;

uint64_t stage_seed(uint64_t seed, uint64_t tag, uint64_t item) {
  return mix_u64(mix_u64(seed, tag), item);
}

ResultBundle bundle_shell(const RunConfig &cfg, const char *command) {
  ResultBundle b;
  b.command = command;
  b.seed = cfg.seed;
  b.hash = config_hash(cfg);
  b.s_grid_origin = cfg.s_grid_origin;
  b.s_grid = cfg.s_grid;
  b.alice_policy = cfg.alice_policy;
  return b;
}

// Mean of independent per-state estimates; the combined std follows from
// averaging independent measurements.
void pool_success(SuccessRow &row, std::span<const double> means,
                  std::span<const std::optional<double>> stds) {
  if (means.empty()) return;
  double mean = 0.0;
  for (double m : means) mean += m;
  row.p_succ_mean = mean / static_cast<double>(means.size());
  double var = 0.0;
  bool have_all = true;
  for (const auto &sd : stds) {
    if (!sd) {
      have_all = false;
      break;
    }
    var += *sd * *sd;
  }
  if (have_all) {
    row.p_succ_std = std::sqrt(var) / static_cast<double>(stds.size());
  }
}

}  // namespace

ResultBundle build_analytic_bundle(const RunConfig &cfg) {
  ResultBundle b = bundle_shell(cfg, "analytic");
  std::vector<Sign> signs = signs_for_policy(cfg.alice_policy);
  for (double s : cfg.s_grid) {
    for (Sign sign : signs) {
      ProbTable table = analytic_detector_probs(s, sign, cfg.mapping);
      for (int mu = 2; mu <= 4; ++mu) {
        for (Outcome k : outcome_order) {
          DetectorRow row;
          row.s = s;
          row.state = sign;
          row.mu = mu;
          row.k = k;
          row.p_analytic = table.at(mu, k);
          b.detectors.push_back(row);
        }
      }
    }
    SuccessRow srow;
    srow.s = s;
    srow.p_succ_analytic = joint_success_probability(s);
    b.success.push_back(srow);
  }
  return b;
}

ResultBundle build_simulate_bundle(const RunConfig &cfg) {
  ResultBundle b = bundle_shell(cfg, "simulate");
  std::vector<Sign> signs = signs_for_policy(cfg.alice_policy);
  for (size_t si = 0; si < cfg.s_grid.size(); ++si) {
    double s = cfg.s_grid[si];
    std::vector<double> succ_means;
    std::vector<std::optional<double>> succ_stds;
    for (Sign sign : signs) {
      uint64_t item = si * 2 + static_cast<uint64_t>(sign_index(sign));

      SessionConfig sc;
      sc.s = s;
      sc.trials = cfg.trials;
      sc.alice_policy = sign == Sign::plus ? AlicePolicy::fixed_plus : AlicePolicy::fixed_minus;
      sc.mapping = cfg.mapping;
      sc.randomize_mapping_per_trial = cfg.randomize_mapping_per_trial;
      sc.seed = stage_seed(cfg.seed, seed_tag_session, item);
      SessionStats stats = run_session(sc, cfg.threads);

      std::array<double, 9> probs{};
      for (int mu = 2; mu <= 4; ++mu) {
        for (Outcome k : outcome_order) {
          probs[static_cast<size_t>(detector_flat_index({mu, k}))] = stats.p(mu, k);
        }
      }
      CountData counts =
          simulate_counts(probs, cfg.source, stage_seed(cfg.seed, seed_tag_counting, item));
      ProbEstimate est = estimate_probs_subtracted(counts, cfg.source);
      ProbEstimate raw = estimate_probs(counts);

      ProbTable expect = analytic_detector_probs(s, sign, cfg.mapping);
      for (int mu = 2; mu <= 4; ++mu) {
        for (Outcome k : outcome_order) {
          size_t flat = static_cast<size_t>(detector_flat_index({mu, k}));
          DetectorRow row;
          row.s = s;
          row.state = sign;
          row.mu = mu;
          row.k = k;
          row.p_analytic = expect.at(mu, k);
          row.p_mean = est.p[flat];
          row.p_std = est.p_std[flat];
          row.p_mean_raw = raw.p[flat];
          row.p_std_raw = raw.p_std[flat];
          b.detectors.push_back(row);
        }
      }

      if (cfg.randomize_mapping_per_trial) {
        // Per-trial relabeling hides the success cell from the count record;
        // only the trial-level truth remains available.
        succ_means.push_back(stats.p_succ());
        succ_stds.push_back(std::nullopt);
      } else {
        Detector cell = cfg.mapping.detector_for(conclusive_for(sign), conclusive_for(sign));
        size_t flat = static_cast<size_t>(detector_flat_index(cell));
        succ_means.push_back(est.p[flat]);
        succ_stds.push_back(est.p_std[flat]);
      }
    }
    SuccessRow srow;
    srow.s = s;
    srow.p_succ_analytic = joint_success_probability(s);
    pool_success(srow, succ_means, succ_stds);
    b.success.push_back(srow);
  }
  return b;
}

ResultBundle build_montecarlo_bundle(const RunConfig &cfg) {
  ResultBundle b = bundle_shell(cfg, "montecarlo");
  std::vector<Sign> signs = signs_for_policy(cfg.alice_policy);

  std::vector<EnvelopeResult> envs;
  envs.reserve(signs.size());
  for (Sign sign : signs) {
    uint64_t seed =
        stage_seed(cfg.seed, seed_tag_envelope, static_cast<uint64_t>(sign_index(sign)));
    envs.push_back(mc_envelope(cfg.s_grid, sign, cfg.imperfections, seed, cfg.threads));
  }

  for (size_t si = 0; si < cfg.s_grid.size(); ++si) {
    double s = cfg.s_grid[si];
    for (size_t gi = 0; gi < signs.size(); ++gi) {
      Sign sign = signs[gi];
      ProbTable expect = analytic_detector_probs(s, sign, cfg.mapping);
      for (int mu = 2; mu <= 4; ++mu) {
        for (Outcome k : outcome_order) {
          const Envelope &env = envs[gi].cells[si][static_cast<size_t>(mu - 2)]
                                               [static_cast<size_t>(outcome_index(k))];
          DetectorRow row;
          row.s = s;
          row.state = sign;
          row.mu = mu;
          row.k = k;
          row.p_analytic = expect.at(mu, k);
          row.p_mean = env.mean;
          row.p_std = env.stddev;
          row.p_env_min = env.min;
          row.p_env_max = env.max;
          b.detectors.push_back(row);
        }
      }
    }
    SuccessRow srow;
    srow.s = s;
    srow.p_succ_analytic = joint_success_probability(s);
    std::vector<double> means;
    std::vector<std::optional<double>> stds;
    double env_min = 0.0;
    double env_max = 0.0;
    for (size_t gi = 0; gi < signs.size(); ++gi) {
      const Envelope &env = envs[gi].p_succ[si];
      means.push_back(env.mean);
      stds.push_back(env.stddev);
      env_min = gi == 0 ? env.min : std::min(env_min, env.min);
      env_max = gi == 0 ? env.max : std::max(env_max, env.max);
    }
    pool_success(srow, means, stds);
    srow.p_succ_env_min = env_min;
    srow.p_succ_env_max = env_max;
    b.success.push_back(srow);
  }
  return b;
}

std::string format_g15(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

namespace {

void append_cell(std::string &out, const std::optional<double> &v) {
  out.push_back(',');
  if (v) out += format_g15(*v);
}

}  // namespace

std::string render_detector_csv(const ResultBundle &b) {
  std::string out = "s,state,mu,k,p_analytic,p_mean,p_std,p_env_min,p_env_max\n";
  for (const DetectorRow &row : b.detectors) {
    out += format_g15(row.s);
    out.push_back(',');
    out.push_back(sign_char(row.state));
    out.push_back(',');
    out += std::to_string(row.mu);
    out.push_back(',');
    out.push_back(outcome_char(row.k));
    out.push_back(',');
    out += format_g15(row.p_analytic);
    append_cell(out, row.p_mean);
    append_cell(out, row.p_std);
    append_cell(out, row.p_env_min);
    append_cell(out, row.p_env_max);
    out.push_back('\n');
  }
  return out;
}

std::string render_success_csv(const ResultBundle &b) {
  std::string out = "s,p_succ_analytic,p_succ_mean,p_succ_std,p_succ_env_min,p_succ_env_max\n";
  for (const SuccessRow &row : b.success) {
    out += format_g15(row.s);
    out.push_back(',');
    out += format_g15(row.p_succ_analytic);
    append_cell(out, row.p_succ_mean);
    append_cell(out, row.p_succ_std);
    append_cell(out, row.p_succ_env_min);
    append_cell(out, row.p_succ_env_max);
    out.push_back('\n');
  }
  return out;
}

std::string render_json(const ResultBundle &b) {
  ordered_json j;
  j["command"] = b.command;
  j["tool_version"] = b.version;
  j["seed"] = b.seed;
  j["config_hash"] = b.hash;
  j["s_grid_origin"] = b.s_grid_origin;
  j["alice_policy"] = alice_policy_name(b.alice_policy);
  j["s_grid"] = b.s_grid;

  auto set_opt = [](ordered_json &obj, const char *key, const std::optional<double> &v) {
    if (v) obj[key] = *v;
  };

  j["detectors"] = ordered_json::array();
  for (const DetectorRow &row : b.detectors) {
    ordered_json r;
    r["s"] = row.s;
    r["state"] = std::string(1, sign_char(row.state));
    r["mu"] = row.mu;
    r["k"] = std::string(1, outcome_char(row.k));
    r["p_analytic"] = row.p_analytic;
    set_opt(r, "p_mean", row.p_mean);
    set_opt(r, "p_std", row.p_std);
    set_opt(r, "p_env_min", row.p_env_min);
    set_opt(r, "p_env_max", row.p_env_max);
    set_opt(r, "p_mean_raw", row.p_mean_raw);
    set_opt(r, "p_std_raw", row.p_std_raw);
    j["detectors"].push_back(std::move(r));
  }

  j["success"] = ordered_json::array();
  for (const SuccessRow &row : b.success) {
    ordered_json r;
    r["s"] = row.s;
    r["p_succ_analytic"] = row.p_succ_analytic;
    set_opt(r, "p_succ_mean", row.p_succ_mean);
    set_opt(r, "p_succ_std", row.p_succ_std);
    set_opt(r, "p_succ_env_min", row.p_succ_env_min);
    set_opt(r, "p_succ_env_max", row.p_succ_env_max);
    j["success"].push_back(std::move(r));
  }

  return j.dump(2) + "\n";
}

void write_file_atomic(const std::string &path, const std::string &content) {
  namespace fs = std::filesystem;
  fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      throw std::runtime_error("cannot create directory " + target.parent_path().string() +
                               ": " + ec.message());
    }
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw std::runtime_error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

std::vector<std::string> write_bundle(const ResultBundle &b, const std::string &out,
                                      const std::string &format) {
  std::vector<std::string> written;
  if (format == "csv") {
    std::string detectors_path = out + ".detectors.csv";
    std::string success_path = out + ".success.csv";
    write_file_atomic(detectors_path, render_detector_csv(b));
    write_file_atomic(success_path, render_success_csv(b));
    written.push_back(detectors_path);
    written.push_back(success_path);
  } else if (format == "json") {
    std::string json_path = out + ".json";
    write_file_atomic(json_path, render_json(b));
    written.push_back(json_path);
  } else {
    throw ConfigError("config: \"format\" must be \"csv\" or \"json\"");
  }
  return written;
}

}  // namespace susd
