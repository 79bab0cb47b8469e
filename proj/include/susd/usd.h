#pragma once

#include <array>
#include <utility>
#include <vector>

#include "susd/qstate.h"
#include "susd/rng.h"

namespace susd {

enum class Outcome { conclusive_plus, conclusive_minus, inconclusive };

// Sampling and reporting order of the three outcomes: (+, -, i).
inline constexpr std::array<Outcome, 3> outcome_order = {
    Outcome::conclusive_plus, Outcome::conclusive_minus, Outcome::inconclusive};

inline int outcome_index(Outcome o) {
  switch (o) {
    case Outcome::conclusive_plus: return 0;
    case Outcome::conclusive_minus: return 1;
    default: return 2;
  }
}

inline char outcome_char(Outcome o) {
  switch (o) {
    case Outcome::conclusive_plus: return '+';
    case Outcome::conclusive_minus: return '-';
    default: return 'i';
  }
}

inline Outcome conclusive_for(Sign s) {
  return s == Sign::plus ? Outcome::conclusive_plus : Outcome::conclusive_minus;
}

inline bool is_conclusive(Outcome o) { return o != Outcome::inconclusive; }

struct KrausElement {
  Outcome label;
  Operator2 op;
};

// A labeled generalized measurement. Every constructor in this module
// produces a complete set: sum of A^dag A equals the identity.
struct KrausSet {
  std::vector<KrausElement> elements;

  // First element carrying the label; throws std::invalid_argument if absent.
  const Operator2 &op(Outcome label) const;
};

// Three-outcome discrimination measurement for the pair prepare_alice(s, ±).
// Succeeds with probability 1 - sqrt(s) per input and leaves the inconclusive
// branch in ∓ s^(1/4) prepare_phi(s, ±), so a later observer can still try.
KrausSet bob_usd(double s);

// Optimal three-outcome discrimination for the pair prepare_phi(s, ±)
// (mutual overlap magnitude sqrt(s)). Fails with probability sqrt(s); the
// failure branch collapses both inputs onto |h> up to sign.
KrausSet charlie_usd(double s);

// Optimal unambiguous discrimination of two arbitrary pure states with
// overlap magnitude pair_overlap. conclusive_plus identifies `first`,
// conclusive_minus identifies `second`; each conclusive probability is
// 1 - pair_overlap on its own input and exactly zero on the other one.
// Throws std::invalid_argument when |<first|second>| disagrees with
// pair_overlap beyond 1e-10.
KrausSet optimal_usd(double pair_overlap, const PolarizationState &first,
                     const PolarizationState &second);

// Probabilities ||A_m |in>||^2 in element order.
std::vector<std::pair<Outcome, double>> outcome_distribution(
    const KrausSet &m, const PolarizationState &in);

// Max-abs deviation of sum A^dag A from the identity.
double verify_completeness(const KrausSet &m);

struct MeasurementResult {
  Outcome label;
  PolarizationState post_state;  // normalized, global phase preserved
  double probability;
};

// Sample one outcome by inverse CDF over the elements in set order and
// collapse the state. Throws std::runtime_error when the total outcome
// probability underflows (all below 1e-15).
MeasurementResult apply_measurement(const KrausSet &m, const PolarizationState &in,
                                    Rng &rng);

// Unitary system+ancilla extension of a two-branch measurement. Basis order
// (h b0, v b0, h b1, v b1); conclusive elements share ancilla branch b0 and
// are separated there by a projective (|h>±|v>)/sqrt(2) readout, the
// inconclusive element occupies branch b1.
struct NeumarkUnitary {
  std::array<Amplitude, 16> u{};  // row-major 4x4
  int initial_ancilla = 0;        // ancilla basis state the device starts in

  Amplitude &at(int r, int c) { return u[r * 4 + c]; }
  const Amplitude &at(int r, int c) const { return u[r * 4 + c]; }

  // <pol_k, b_m| U |pol_j, b_initial> as a 2x2 block.
  Operator2 branch_block(int ancilla_out) const;

  // U applied to |system> |b_initial>; components in basis order.
  std::array<Amplitude, 4> apply(const PolarizationState &system) const;
};

// Builds the extension columns from the branch operators and completes them
// by Gram-Schmidt over canonical basis vectors in index order, producing an
// exactly unitary matrix. Throws std::invalid_argument when the branch
// operators do not embed (conclusive supports not orthogonal, or the set is
// not complete).
NeumarkUnitary neumark_dilation(const KrausSet &m);

// ||U^dag U - I||_max.
double unitarity_deviation(const NeumarkUnitary &nu);

}  // namespace susd
