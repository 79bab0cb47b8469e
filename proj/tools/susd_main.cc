#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "susd/result_io.h"
#include "susd/validation.h"

namespace {

std::optional<uint64_t> seed_from_environment() {
  const char *value = std::getenv("SUSD_SEED");
  if (value == nullptr || *value == '\0') return std::nullopt;
  for (const char *p = value; *p != '\0'; ++p) {
    if (!std::isdigit(static_cast<unsigned char>(*p))) {
      throw susd::ConfigError("SUSD_SEED must be a decimal unsigned integer");
    }
  }
  errno = 0;
  char *end = nullptr;
  unsigned long long parsed = std::strtoull(value, &end, 10);
  if (errno != 0 || end == value || *end != '\0') {
    throw susd::ConfigError("SUSD_SEED is out of range");
  }
  return parsed;
}

std::vector<double> parse_grid_csv(const std::string &text) {
  std::vector<double> grid;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t comma = text.find(',', pos);
    std::string field =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (field.empty()) {
      throw susd::ConfigError("--s-grid: empty field");
    }
    errno = 0;
    char *end = nullptr;
    double v = std::strtod(field.c_str(), &end);
    if (errno != 0 || end == field.c_str() || *end != '\0') {
      throw susd::ConfigError("--s-grid: cannot parse \"" + field + "\"");
    }
    if (!(v >= 0.0 && v <= 1.0)) {
      throw susd::ConfigError("--s-grid: values must lie in [0, 1]");
    }
    grid.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (grid.empty()) {
    throw susd::ConfigError("--s-grid: no values given");
  }
  return grid;
}

void print_report(const susd::ValidationReport &report) {
  for (const auto &check : report.checks) {
    std::printf("%s %-34s deviation %.6e  tolerance %.0e\n",
                check.pass ? "PASS" : "FAIL", check.name.c_str(), check.deviation,
                check.tolerance);
  }
  std::printf("%s (%zu checks)\n", report.all_pass() ? "ALL PASS" : "FAILURES PRESENT",
              report.checks.size());
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Sequential unambiguous-discrimination bench: tables, trials, envelopes"};
  app.require_subcommand(1);

  std::string config_path;
  double s_point = 0.0;
  std::string s_grid_csv;
  uint64_t seed = 0;
  uint64_t trials = 0;
  std::string out;
  std::string format;
  int threads = 1;
  int random_s = 50;
  double fault_deg = 0.0;

  auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration file")->required();
    auto *s_opt =
        cmd->add_option("--s", s_point, "Single overlap value")->check(CLI::Range(0.0, 1.0));
    auto *grid_opt = cmd->add_option("--s-grid", s_grid_csv, "Comma-separated overlap values");
    s_opt->excludes(grid_opt);
    grid_opt->excludes(s_opt);
    cmd->add_option("--seed", seed, "RNG seed (overrides config and SUSD_SEED)");
    cmd->add_option("--trials", trials, "Trials per grid point")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "Output path stem");
    cmd->add_option("--format", format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", threads, "Worker threads (never changes the numbers)")
        ->check(CLI::Range(1, 1024));
  };

  CLI::App *analytic =
      app.add_subcommand("analytic", "Closed-form detector and success tables");
  CLI::App *simulate =
      app.add_subcommand("simulate", "Trial simulation feeding counting statistics");
  CLI::App *montecarlo =
      app.add_subcommand("montecarlo", "Imperfection-model probability envelopes");
  CLI::App *validate = app.add_subcommand("validate", "Self-consistency check suite");
  add_common(analytic);
  add_common(simulate);
  add_common(montecarlo);
  validate->add_option("--config", config_path,
                       "JSON run configuration (only its seed is used)");
  validate->add_option("--seed", seed, "RNG seed (overrides config and SUSD_SEED)");
  validate->add_option("--random-s", random_s, "Random overlap draws for the optics check")
      ->check(CLI::Range(1, 1000000));
  validate->add_option("--fault-bob-cw-deg", fault_deg,
                       "Extra rotation injected into the first clockwise plate, degrees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) {
      susd::ValidationOptions options;
      bool seed_in_config = false;
      if (!config_path.empty()) {
        susd::RunConfig cfg = susd::load_run_config_file(config_path);
        if (cfg.seed_in_config) {
          options.seed = cfg.seed;
          seed_in_config = true;
        }
      }
      if (validate->count("--seed") > 0) {
        options.seed = seed;
      } else if (!seed_in_config) {
        if (auto env = seed_from_environment()) options.seed = *env;
      }
      options.random_s_count = random_s;
      options.bob_cw_fault_rad = fault_deg * std::numbers::pi / 180.0;

      susd::ValidationReport report = susd::run_validation(options);
      print_report(report);
      return report.all_pass() ? 0 : 3;
    }

    susd::RunConfig cfg = susd::load_run_config_file(config_path);
    CLI::App *active = analytic->parsed() ? analytic
                       : simulate->parsed() ? simulate
                                            : montecarlo;
    if (active->count("--s") > 0) {
      cfg.s_grid = {s_point};
      cfg.s_grid_origin = "cli";
    } else if (active->count("--s-grid") > 0) {
      cfg.s_grid = parse_grid_csv(s_grid_csv);
      cfg.s_grid_origin = "cli";
    }
    if (active->count("--seed") > 0) {
      cfg.seed = seed;
    } else if (!cfg.seed_in_config) {
      if (auto env = seed_from_environment()) cfg.seed = *env;
    }
    if (active->count("--trials") > 0) cfg.trials = trials;
    if (active->count("--out") > 0) cfg.out = out;
    if (active->count("--format") > 0) cfg.format = format;
    if (active->count("--threads") > 0) cfg.threads = threads;

    susd::ResultBundle bundle;
    if (analytic->parsed()) {
      bundle = susd::build_analytic_bundle(cfg);
    } else if (simulate->parsed()) {
      bundle = susd::build_simulate_bundle(cfg);
    } else {
      bundle = susd::build_montecarlo_bundle(cfg);
    }
    for (const std::string &path : susd::write_bundle(bundle, cfg.out, cfg.format)) {
      std::printf("wrote %s\n", path.c_str());
    }
    return 0;
  } catch (const susd::ConfigError &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
