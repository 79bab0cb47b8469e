#include "susd/counting.h"

#include <cmath>
#include <stdexcept>

namespace susd {

int detector_flat_index(const Detector &d) {
  if (d.mu < 2 || d.mu > 4) {
    throw std::invalid_argument("detector_flat_index: mu must lie in 2..4");
  }
  return (d.mu - 2) * 3 + outcome_index(d.k);
}

Detector detector_from_flat_index(int idx) {
  if (idx < 0 || idx > 8) {
    throw std::invalid_argument("detector_from_flat_index: index must lie in 0..8");
  }
  return {idx / 3 + 2, outcome_order[idx % 3]};
}

namespace {

void validate_source(const SourceConfig &src) {
  if (!(src.pair_rate_hz >= 0.0) || !std::isfinite(src.pair_rate_hz)) {
    throw std::invalid_argument("source: pair_rate_hz must be >= 0");
  }
  if (!(src.accidental_rate_hz >= 0.0) || !std::isfinite(src.accidental_rate_hz)) {
    throw std::invalid_argument("source: accidental_rate_hz must be >= 0");
  }
  if (!(src.efficiency >= 0.0) || src.efficiency > 1.0) {
    throw std::invalid_argument("source: efficiency must lie in [0, 1]");
  }
  if (!(src.window_s > 0.0) || !std::isfinite(src.window_s)) {
    throw std::invalid_argument("source: window_s must be > 0");
  }
  if (src.runs < 1) {
    throw std::invalid_argument("source: runs must be >= 1");
  }
}

}  // namespace

CountData simulate_counts(const std::array<double, 9> &probs, const SourceConfig &src,
                          uint64_t seed) {
  validate_source(src);
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("simulate_counts: probabilities must be >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("simulate_counts: probabilities must sum to one");
  }

  double signal_scale = src.pair_rate_hz * src.window_s * src.efficiency;
  double accidental_mean = src.accidental_rate_hz * src.window_s / 9.0;

  CountData data;
  data.counts.resize(static_cast<size_t>(src.runs));
  for (int run = 0; run < src.runs; ++run) {
    Rng rng = Rng::derive(seed, static_cast<uint64_t>(run));
    for (int d = 0; d < 9; ++d) {
      double mean = signal_scale * probs[static_cast<size_t>(d)] + accidental_mean;
      data.counts[static_cast<size_t>(run)][static_cast<size_t>(d)] = rng.poisson(mean);
    }
  }
  return data;
}

namespace {

ProbEstimate reduce_runs(const std::vector<std::array<double, 9>> &freqs) {
  size_t runs = freqs.size();
  ProbEstimate est{};
  for (const auto &f : freqs) {
    for (int d = 0; d < 9; ++d) {
      est.p[static_cast<size_t>(d)] += f[static_cast<size_t>(d)];
    }
  }
  for (double &p : est.p) {
    p /= static_cast<double>(runs);
  }
  for (const auto &f : freqs) {
    for (int d = 0; d < 9; ++d) {
      double dev = f[static_cast<size_t>(d)] - est.p[static_cast<size_t>(d)];
      est.p_std[static_cast<size_t>(d)] += dev * dev;
    }
  }
  for (double &sd : est.p_std) {
    sd = std::sqrt(sd / static_cast<double>(runs - 1));
  }
  return est;
}

}  // namespace

ProbEstimate estimate_probs(const CountData &data) {
  if (data.counts.size() < 2) {
    throw std::invalid_argument("estimate_probs: need at least two runs");
  }
  std::vector<std::array<double, 9>> freqs;
  freqs.reserve(data.counts.size());
  for (const auto &run : data.counts) {
    uint64_t total = 0;
    for (uint64_t c : run) total += c;
    if (total == 0) {
      throw std::invalid_argument("estimate_probs: run with zero total counts");
    }
    std::array<double, 9> f;
    for (int d = 0; d < 9; ++d) {
      f[static_cast<size_t>(d)] =
          static_cast<double>(run[static_cast<size_t>(d)]) / static_cast<double>(total);
    }
    freqs.push_back(f);
  }
  return reduce_runs(freqs);
}

ProbEstimate estimate_probs_subtracted(const CountData &data, const SourceConfig &src) {
  validate_source(src);
  if (data.counts.size() < 2) {
    throw std::invalid_argument("estimate_probs_subtracted: need at least two runs");
  }
  double accidental_mean = src.accidental_rate_hz * src.window_s / 9.0;
  std::vector<std::array<double, 9>> freqs;
  freqs.reserve(data.counts.size());
  for (const auto &run : data.counts) {
    std::array<double, 9> net;
    double total = 0.0;
    for (int d = 0; d < 9; ++d) {
      double v = static_cast<double>(run[static_cast<size_t>(d)]) - accidental_mean;
      net[static_cast<size_t>(d)] = v > 0.0 ? v : 0.0;
      total += net[static_cast<size_t>(d)];
    }
    if (total <= 0.0) {
      throw std::invalid_argument("estimate_probs_subtracted: run with no net counts");
    }
    for (double &v : net) {
      v /= total;
    }
    freqs.push_back(net);
  }
  return reduce_runs(freqs);
}

}  // namespace susd
