#pragma once

#include "susd/protocol.h"

namespace susd {

// Half-wave plate with fast axis at theta from horizontal:
// [[cos 2t, sin 2t], [sin 2t, -cos 2t]].
Operator2 hwp_jones(double theta);

// Plate angles are physically periodic in pi.
double reduce_mod_pi(double theta);

struct WavePlateSetting {
  double theta = 0.0;  // radians, reduced mod pi
};

// Plate angles of one polarization interferometer: one plate in the
// clockwise (transmitted) arm, one in the counter-clockwise (reflected) arm.
struct SagnacConfig {
  double theta_cw = 0.0;
  double theta_ccw = 0.0;
};

// First-stage settings: the interferometer realizes the non-projective part
// of the discrimination, sending conclusive weight to port b0 and the
// sign-carrying failure branch to port b1.
SagnacConfig bob_sagnac_settings(double s);

// Second-stage settings; the clockwise plate sits at zero and only the
// reflected arm is rotated.
SagnacConfig charlie_sagnac_settings(double s);

// Polarizing splitter with per-polarization intensity loss. Horizontal light
// is transmitted, vertical reflected; each passage attenuates the amplitude
// by sqrt(1 - loss) of the acted-on polarization.
struct PBSParams {
  double loss_h = 0.0;
  double loss_v = 0.0;
};

// One interferometer as a two-port transfer matrix. Rows are
// (b0 h, b0 v, b1 h, b1 v); columns are the two input ports in the same
// polarization order. Port b0 collects the polarization-preserving plate
// components (cos terms) of both arms, port b1 the converting ones (sin
// terms). Only input port 0 is driven in the assembled setup; the second
// column pair completes the device to a unitary when the splitter is ideal.
struct Transfer4 {
  std::array<Amplitude, 16> m{};

  Amplitude &at(int r, int c) { return m[r * 4 + c]; }
  const Amplitude &at(int r, int c) const { return m[r * 4 + c]; }

  // 2x2 block from driven input port 0 to output port 0 or 1.
  Operator2 port_block(int port) const;
};

Transfer4 sagnac_transfer(const SagnacConfig &cfg, const PBSParams &pbs);
double unitarity_deviation(const Transfer4 &t);

// Wave-plate slots of the full network, in sampling order.
enum HwpSlot {
  hwp_i1_cw = 0,
  hwp_i1_ccw,
  hwp_bob_split,      // separates the two conclusive first-stage results
  hwp_reprep_plus,    // |h> -> forwarded '+' state on the mu(+) path
  hwp_reprep_minus,   // |v> -> forwarded '-' state on the mu(-) path
  hwp_i2_cw,
  hwp_i2_ccw,
  hwp_i2_split,
  hwp_i3_cw,
  hwp_i3_ccw,
  hwp_i3_split,
  hwp_i4_cw,
  hwp_i4_ccw,
  hwp_i4_split,
  hwp_slot_count
};

// Splitter slots of the full network, in sampling order.
enum PbsSlot {
  pbs_i1 = 0,
  pbs_bob_split,
  pbs_i2,
  pbs_i2_split,
  pbs_i3,
  pbs_i3_split,
  pbs_i4,
  pbs_i4_split,
  pbs_slot_count
};

// Per-element deviations from the ideal network: additive plate-angle
// offsets (radians) and splitter losses. Zero-initialized means ideal.
struct NetworkParams {
  std::array<double, hwp_slot_count> hwp_offset{};
  std::array<PBSParams, pbs_slot_count> pbs{};
};

// The compiled network broken at its two mixing points: after the first
// interferometer and after each second-stage interferometer. Exposed so the
// coherent compiler and the incoherent-leak error model share one routing
// and one set of element matrices.
struct NetworkStages {
  Operator2 i1_port[2];      // first interferometer blocks (0 conclusive, 1 failure)
  Operator2 route[3];        // per first-stage outcome: optics between I1 and I_mu
  int mu[3];                 // interferometer fed by each first-stage outcome
  Operator2 imu_port[3][2];  // per outcome path: its interferometer blocks
  Operator2 readout[3][3];   // [bob][charlie]: final split projection (or identity)
  Detector label[3][3];      // detector address after relabeling
};

NetworkStages build_network_stages(double s, const NetworkParams &params,
                                   const PortMapping &mapping);

// Full coherent input-to-detectors map: nine 2x2 path blocks, one per
// detector. Path index is outcome_index(bob)*3 + outcome_index(charlie).
struct SetupTransfer {
  std::array<Operator2, 9> block{};
  std::array<Detector, 9> label{};

  const Operator2 &block_for(Detector d) const;  // throws on unknown address
  double isometry_deviation() const;             // ||sum B^dag B - I||_max
};

SetupTransfer compile_setup(double s, const NetworkParams &params,
                            const PortMapping &mapping);

// 2x2 block of the compiled transfer belonging to one detector.
Operator2 transfer_to_kraus(const SetupTransfer &t, Detector d);

// Preparation plate angle: hwp(angle)|h> equals prepare_alice(s, sign).
double alice_prep_angle(double s, Sign sign);

// Re-preparation plate angles on the two conclusive paths.
double reprep_plus_angle(double s);
double reprep_minus_angle(double s);

}  // namespace susd
