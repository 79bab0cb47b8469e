#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "susd/optics.h"
#include "susd/protocol.h"
#include "susd/usd.h"

namespace susd {

struct CheckResult {
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
};

struct ValidationOptions {
  uint64_t seed = 0x5eed;
  int random_s_count = 50;
  // Extra rotation injected into the first interferometer's clockwise plate.
  // Zero means a healthy bench; anything else should trip the comparison
  // between the optical transfer blocks and the measurement chain.
  double bob_cw_fault_rad = 0.0;
};

// Expected per-detector operator built purely from the measurement algebra:
// the first receiver's element, the conclusive-path sorting and re-preparation
// (or pass-through on the inconclusive path), the second receiver's element,
// and the readout sorting. Index is bob_index * 3 + charlie_index, matching
// the ordering of the compiled optical transfer blocks.
std::array<Operator2, 9> detector_kraus_chain(double s);

// Runs every consistency check and returns one result per check. All checks
// are deterministic for a given options value.
ValidationReport run_validation(const ValidationOptions &options);

}  // namespace susd
