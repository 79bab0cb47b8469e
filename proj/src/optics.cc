#include "susd/optics.h"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace susd {

namespace {
constexpr double pi = std::numbers::pi;

double require_loss(double loss, const char *what) {
  if (!std::isfinite(loss) || loss < 0.0 || loss > 1.0) {
    throw std::domain_error(std::string(what) + ": loss must lie in [0, 1]");
  }
  return loss;
}

// Real-state polar angle on the h-v plane.
double state_angle(const PolarizationState &st) {
  return std::atan2(st.c_v.real(), st.c_h.real());
}

// A half-wave plate at theta maps a real state at angle chi to 2*theta - chi,
// so the plate that takes chi_in to chi_out sits at their bisector.
double hwp_angle_for(double chi_in, double chi_out) {
  return 0.5 * (chi_in + chi_out);
}
}  // namespace

Operator2 hwp_jones(double theta) {
  double c = std::cos(2.0 * theta);
  double s = std::sin(2.0 * theta);
  Operator2 out;
  out.at(0, 0) = Amplitude{c, 0.0};
  out.at(0, 1) = Amplitude{s, 0.0};
  out.at(1, 0) = Amplitude{s, 0.0};
  out.at(1, 1) = Amplitude{-c, 0.0};
  return out;
}

double reduce_mod_pi(double theta) {
  double r = std::fmod(theta, pi);
  if (r < 0.0) r += pi;
  return r;
}

SagnacConfig bob_sagnac_settings(double s) {
  coefficients_from_overlap(s);
  double rs = std::sqrt(s);
  double cw = 0.5 * std::acos(std::sqrt((1.0 - rs) / (1.0 + s)));
  double ccw = 0.5 * std::acos(std::sqrt(1.0 / (1.0 + rs))) + pi / 2.0;
  return {reduce_mod_pi(cw), reduce_mod_pi(ccw)};
}

SagnacConfig charlie_sagnac_settings(double s) {
  coefficients_from_overlap(s);
  double rs = std::sqrt(s);
  double ccw = 0.5 * std::acos(std::sqrt((1.0 - rs) / (1.0 + rs)));
  return {0.0, reduce_mod_pi(ccw)};
}

Transfer4 sagnac_transfer(const SagnacConfig &cfg, const PBSParams &pbs) {
  double th = std::sqrt(1.0 - require_loss(pbs.loss_h, "sagnac_transfer"));
  double rv = std::sqrt(1.0 - require_loss(pbs.loss_v, "sagnac_transfer"));
  Operator2 cw = hwp_jones(cfg.theta_cw);
  Operator2 ccw = hwp_jones(cfg.theta_ccw);

  // Input port 0: h is transmitted into the clockwise arm, v reflected into
  // the counter-clockwise arm. On recombination each arm's h component is
  // transmitted and its v component reflected, which routes the
  // polarization-preserving parts to port b0 and the converted parts to b1.
  // Input port 1 drives the arms the opposite way round.
  Transfer4 t;
  t.at(0, 0) = th * cw.at(0, 0) * th;   // b0 h <- in0 h
  t.at(3, 0) = rv * cw.at(1, 0) * th;   // b1 v <- in0 h
  t.at(1, 1) = rv * ccw.at(1, 1) * rv;  // b0 v <- in0 v
  t.at(2, 1) = th * ccw.at(0, 1) * rv;  // b1 h <- in0 v
  t.at(2, 2) = th * ccw.at(0, 0) * th;  // b1 h <- in1 h
  t.at(1, 2) = rv * ccw.at(1, 0) * th;  // b0 v <- in1 h
  t.at(0, 3) = th * cw.at(0, 1) * rv;   // b0 h <- in1 v
  t.at(3, 3) = rv * cw.at(1, 1) * rv;   // b1 v <- in1 v
  return t;
}

Operator2 Transfer4::port_block(int port) const {
  if (port != 0 && port != 1) {
    throw std::invalid_argument("Transfer4::port_block: port must be 0 or 1");
  }
  Operator2 out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      out.at(r, c) = at(port * 2 + r, c);
    }
  }
  return out;
}

double unitarity_deviation(const Transfer4 &t) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Amplitude acc{0.0, 0.0};
      for (int k = 0; k < 4; ++k) {
        acc += std::conj(t.at(k, r)) * t.at(k, c);
      }
      if (r == c) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

double alice_prep_angle(double s, Sign sign) {
  return hwp_angle_for(0.0, state_angle(prepare_alice(s, sign)));
}

double reprep_plus_angle(double s) {
  return hwp_angle_for(0.0, state_angle(prepare_phi(s, Sign::plus)));
}

double reprep_minus_angle(double s) {
  return hwp_angle_for(pi / 2.0, state_angle(prepare_phi(s, Sign::minus)));
}

namespace {

struct SagnacSlots {
  HwpSlot cw;
  HwpSlot ccw;
  HwpSlot split;
  PbsSlot body;
  PbsSlot split_pbs;
};

SagnacSlots slots_for_mu(int mu) {
  switch (mu) {
    case 2: return {hwp_i2_cw, hwp_i2_ccw, hwp_i2_split, pbs_i2, pbs_i2_split};
    case 3: return {hwp_i3_cw, hwp_i3_ccw, hwp_i3_split, pbs_i3, pbs_i3_split};
    case 4: return {hwp_i4_cw, hwp_i4_ccw, hwp_i4_split, pbs_i4, pbs_i4_split};
    default:
      throw std::invalid_argument("interferometer index must be 2, 3 or 4");
  }
}

// Splitter pass after a separating plate: transmitted output keeps h,
// reflected output keeps v.
Operator2 project_transmit(const PBSParams &pbs) {
  return Operator2::diag(std::sqrt(1.0 - require_loss(pbs.loss_h, "compile_setup")), 0.0);
}

Operator2 project_reflect(const PBSParams &pbs) {
  return Operator2::diag(0.0, std::sqrt(1.0 - require_loss(pbs.loss_v, "compile_setup")));
}

}  // namespace

NetworkStages build_network_stages(double s, const NetworkParams &params,
                                   const PortMapping &mapping) {
  coefficients_from_overlap(s);
  if (!mapping.is_bijective()) {
    throw std::invalid_argument("build_network_stages: mapping must be bijective");
  }

  NetworkStages st;

  SagnacConfig bob = bob_sagnac_settings(s);
  bob.theta_cw += params.hwp_offset[hwp_i1_cw];
  bob.theta_ccw += params.hwp_offset[hwp_i1_ccw];
  Transfer4 i1 = sagnac_transfer(bob, params.pbs[pbs_i1]);
  st.i1_port[0] = i1.port_block(0);
  st.i1_port[1] = i1.port_block(1);

  // Conclusive port: a plate at pi/8 turns |+>/|-> into |h>/|v>, the splitter
  // separates them, and a dedicated plate per path re-prepares the state the
  // next observer must discriminate.
  Operator2 split_plate = hwp_jones(pi / 8.0 + params.hwp_offset[hwp_bob_split]);
  Operator2 to_plus = project_transmit(params.pbs[pbs_bob_split]) * split_plate;
  Operator2 to_minus = project_reflect(params.pbs[pbs_bob_split]) * split_plate;
  Operator2 reprep_plus =
      hwp_jones(reprep_plus_angle(s) + params.hwp_offset[hwp_reprep_plus]);
  Operator2 reprep_minus =
      hwp_jones(reprep_minus_angle(s) + params.hwp_offset[hwp_reprep_minus]);

  st.route[outcome_index(Outcome::conclusive_plus)] = reprep_plus * to_plus;
  st.route[outcome_index(Outcome::conclusive_minus)] = reprep_minus * to_minus;
  st.route[outcome_index(Outcome::inconclusive)] = Operator2::identity();

  for (Outcome bo : outcome_order) {
    int bi = outcome_index(bo);
    int mu = mapping.mu_for_bob[bi];
    st.mu[bi] = mu;
    SagnacSlots slot = slots_for_mu(mu);

    SagnacConfig charlie = charlie_sagnac_settings(s);
    charlie.theta_cw += params.hwp_offset[slot.cw];
    charlie.theta_ccw += params.hwp_offset[slot.ccw];
    Transfer4 imu = sagnac_transfer(charlie, params.pbs[slot.body]);
    st.imu_port[bi][0] = imu.port_block(0);
    st.imu_port[bi][1] = imu.port_block(1);

    Operator2 csplit = hwp_jones(pi / 8.0 + params.hwp_offset[slot.split]);
    st.readout[bi][outcome_index(Outcome::conclusive_plus)] =
        project_transmit(params.pbs[slot.split_pbs]) * csplit;
    st.readout[bi][outcome_index(Outcome::conclusive_minus)] =
        project_reflect(params.pbs[slot.split_pbs]) * csplit;
    st.readout[bi][outcome_index(Outcome::inconclusive)] = Operator2::identity();

    for (Outcome co : outcome_order) {
      st.label[bi][outcome_index(co)] = mapping.detector_for(bo, co);
    }
  }
  return st;
}

SetupTransfer compile_setup(double s, const NetworkParams &params,
                            const PortMapping &mapping) {
  NetworkStages st = build_network_stages(s, params, mapping);

  SetupTransfer out;
  for (Outcome bo : outcome_order) {
    int bi = outcome_index(bo);
    Operator2 path = st.route[bi] * st.i1_port[bo == Outcome::inconclusive ? 1 : 0];
    for (Outcome co : outcome_order) {
      int ci = outcome_index(co);
      Operator2 stage2 = st.imu_port[bi][co == Outcome::inconclusive ? 1 : 0];
      out.block[bi * 3 + ci] = st.readout[bi][ci] * stage2 * path;
      out.label[bi * 3 + ci] = st.label[bi][ci];
    }
  }
  return out;
}

const Operator2 &SetupTransfer::block_for(Detector d) const {
  for (size_t i = 0; i < label.size(); ++i) {
    if (label[i] == d) {
      return block[i];
    }
  }
  throw std::invalid_argument("SetupTransfer::block_for: unknown detector address");
}

double SetupTransfer::isometry_deviation() const {
  Operator2 acc;
  for (const auto &b : block) {
    acc = acc + b.adjoint() * b;
  }
  return max_abs(acc - Operator2::identity());
}

Operator2 transfer_to_kraus(const SetupTransfer &t, Detector d) {
  return t.block_for(d);
}

}  // namespace susd
