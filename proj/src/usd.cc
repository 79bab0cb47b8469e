#include "susd/usd.h"

#include <cmath>
#include <stdexcept>

namespace susd {

const Operator2 &KrausSet::op(Outcome label) const {
  for (const auto &e : elements) {
    if (e.label == label) {
      return e.op;
    }
  }
  throw std::invalid_argument("KrausSet::op: no element with requested label");
}

KrausSet bob_usd(double s) {
  coefficients_from_overlap(s);
  double rs = std::sqrt(s);
  double qs = std::pow(s, 0.25);

  // Conclusive elements are rank one: project onto the dual of one input
  // (annihilating the other) and emit (|h>±|v>)/sqrt(2). The coefficients
  // below are the closed forms of sqrt(1-sqrt(s)) / (2a) and ... / (2b),
  // written so they stay finite at both endpoints of [0, 1].
  double p = std::sqrt((1.0 - rs) / (2.0 * (1.0 + s)));
  double q = 1.0 / std::sqrt(2.0 * (1.0 + rs));

  Operator2 conclusive_plus =
      Operator2::outer(state_diag(Sign::plus), {Amplitude{p, 0.0}, Amplitude{q, 0.0}});
  Operator2 conclusive_minus =
      Operator2::outer(state_diag(Sign::minus), {Amplitude{p, 0.0}, Amplitude{-q, 0.0}});

  // Inconclusive element: maps the ± input to ∓ s^(1/4) times the forwarded
  // pair state. The sign flip is physical and must be preserved.
  double r = qs * std::sqrt((1.0 + rs) / (1.0 + s));
  double t = qs / std::sqrt(1.0 + rs);
  Operator2 inconclusive;
  inconclusive.at(0, 1) = Amplitude{-t, 0.0};
  inconclusive.at(1, 0) = Amplitude{r, 0.0};

  KrausSet out;
  out.elements = {{Outcome::conclusive_plus, conclusive_plus},
                  {Outcome::conclusive_minus, conclusive_minus},
                  {Outcome::inconclusive, inconclusive}};
  return out;
}

KrausSet charlie_usd(double s) {
  coefficients_from_overlap(s);
  double rs = std::sqrt(s);
  double qs = std::pow(s, 0.25);

  double alpha = 1.0 / std::sqrt(2.0);
  double beta = std::sqrt((1.0 - rs) / (2.0 * (1.0 + rs)));

  Operator2 conclusive_plus = Operator2::outer(
      state_diag(Sign::plus), {Amplitude{alpha, 0.0}, Amplitude{-beta, 0.0}});
  Operator2 conclusive_minus = Operator2::outer(
      state_diag(Sign::minus), {Amplitude{alpha, 0.0}, Amplitude{beta, 0.0}});

  // Failure branch |h><v| scaled so the failure probability is sqrt(s) for
  // both inputs; the post state is |h> regardless of which state arrived.
  Operator2 inconclusive;
  inconclusive.at(0, 1) = Amplitude{qs * std::sqrt(2.0 / (1.0 + rs)), 0.0};

  KrausSet out;
  out.elements = {{Outcome::conclusive_plus, conclusive_plus},
                  {Outcome::conclusive_minus, conclusive_minus},
                  {Outcome::inconclusive, inconclusive}};
  return out;
}

namespace {

// Unit vector orthogonal to v, phase-fixed so that <perp|ref> is real and
// non-negative. Keeps optimal_usd deterministic.
PolarizationState orthogonal_to(const PolarizationState &v, const PolarizationState &ref) {
  PolarizationState w{-std::conj(v.c_v), std::conj(v.c_h)};
  Amplitude ip = overlap(w, ref);
  if (std::abs(ip) > 1e-300) {
    Amplitude phase = std::conj(ip) / std::abs(ip);
    // <phase*w | ref> = conj(phase) <w|ref> = |ip|
    w.c_h *= std::conj(phase);
    w.c_v *= std::conj(phase);
  }
  return w;
}

// Principal square root of a 2x2 Hermitian positive semidefinite matrix.
Operator2 psd_sqrt(const Operator2 &mat) {
  double tr = (mat.at(0, 0) + mat.at(1, 1)).real();
  Amplitude det_c = mat.at(0, 0) * mat.at(1, 1) - mat.at(0, 1) * mat.at(1, 0);
  double det = std::max(det_c.real(), 0.0);
  double denom_sq = tr + 2.0 * std::sqrt(det);
  if (denom_sq < 1e-150) {
    return Operator2::zero();
  }
  double denom = std::sqrt(denom_sq);
  Operator2 out = mat;
  out.at(0, 0) += std::sqrt(det);
  out.at(1, 1) += std::sqrt(det);
  return out.scaled(1.0 / denom);
}

}  // namespace

KrausSet optimal_usd(double pair_overlap, const PolarizationState &first,
                     const PolarizationState &second) {
  if (!std::isfinite(pair_overlap) || pair_overlap < 0.0 || pair_overlap > 1.0) {
    throw std::invalid_argument("optimal_usd: pair_overlap must lie in [0, 1]");
  }
  double measured = std::abs(overlap(first, second));
  if (std::abs(measured - pair_overlap) > 1e-10) {
    throw std::invalid_argument(
        "optimal_usd: pair_overlap inconsistent with the supplied states");
  }

  double scale = 1.0 / std::sqrt(1.0 + pair_overlap);
  PolarizationState second_perp = orthogonal_to(second, first);
  PolarizationState first_perp = orthogonal_to(first, second);

  Operator2 k1 = Operator2::outer(state_diag(Sign::plus), second_perp).scaled(scale);
  Operator2 k2 = Operator2::outer(state_diag(Sign::minus), first_perp).scaled(scale);

  // Whatever weight the conclusive elements leave behind becomes the failure
  // element; the PSD square root keeps the set complete by construction.
  Operator2 remainder =
      Operator2::identity() - k1.adjoint() * k1 - k2.adjoint() * k2;
  Operator2 ki = psd_sqrt(remainder);

  KrausSet out;
  out.elements = {{Outcome::conclusive_plus, k1},
                  {Outcome::conclusive_minus, k2},
                  {Outcome::inconclusive, ki}};
  return out;
}

std::vector<std::pair<Outcome, double>> outcome_distribution(
    const KrausSet &m, const PolarizationState &in) {
  std::vector<std::pair<Outcome, double>> out;
  out.reserve(m.elements.size());
  for (const auto &e : m.elements) {
    out.emplace_back(e.label, norm_squared(e.op.apply(in)));
  }
  return out;
}

double verify_completeness(const KrausSet &m) {
  Operator2 acc;
  for (const auto &e : m.elements) {
    acc = acc + e.op.adjoint() * e.op;
  }
  return max_abs(acc - Operator2::identity());
}

MeasurementResult apply_measurement(const KrausSet &m, const PolarizationState &in,
                                    Rng &rng) {
  if (m.elements.empty()) {
    throw std::invalid_argument("apply_measurement: empty Kraus set");
  }
  double total = 0.0;
  for (const auto &e : m.elements) {
    total += norm_squared(e.op.apply(in));
  }
  if (total < 1e-15) {
    throw std::runtime_error("apply_measurement: total outcome probability underflow");
  }

  double u = rng.uniform01() * total;
  double cum = 0.0;
  const KrausElement *chosen = &m.elements.back();
  for (const auto &e : m.elements) {
    cum += norm_squared(e.op.apply(in));
    if (u < cum) {
      chosen = &e;
      break;
    }
  }

  PolarizationState raw = chosen->op.apply(in);
  double prob = norm_squared(raw);
  return {chosen->label, normalized(raw), prob};
}

NeumarkUnitary neumark_dilation(const KrausSet &m) {
  // Branch operators: conclusive labels share branch 0, inconclusive is
  // branch 1. The conclusive sum is well defined because the two conclusive
  // elements emit orthogonal states.
  Operator2 branch0, branch1;
  for (const auto &e : m.elements) {
    if (is_conclusive(e.label)) {
      branch0 = branch0 + e.op;
    } else {
      branch1 = branch1 + e.op;
    }
  }

  std::array<std::array<Amplitude, 4>, 4> cols{};
  for (int j = 0; j < 2; ++j) {
    cols[j][0] = branch0.at(0, j);
    cols[j][1] = branch0.at(1, j);
    cols[j][2] = branch1.at(0, j);
    cols[j][3] = branch1.at(1, j);
  }

  auto dot = [](const std::array<Amplitude, 4> &x, const std::array<Amplitude, 4> &y) {
    Amplitude acc{0.0, 0.0};
    for (int i = 0; i < 4; ++i) acc += std::conj(x[i]) * y[i];
    return acc;
  };
  auto nrm = [&](const std::array<Amplitude, 4> &x) {
    return std::sqrt(dot(x, x).real());
  };

  // The two constrained columns must already be orthonormal; otherwise the
  // branch structure does not embed in a two-branch extension.
  double n0 = nrm(cols[0]);
  double n1 = nrm(cols[1]);
  double cross = std::abs(dot(cols[0], cols[1]));
  if (std::abs(n0 - 1.0) > 1e-8 || std::abs(n1 - 1.0) > 1e-8 || cross > 1e-8) {
    throw std::invalid_argument(
        "neumark_dilation: branch operators do not embed in a two-branch unitary");
  }

  // Exact re-orthonormalization removes the residual rounding so the result
  // is unitary to machine precision, not merely to the completeness bound.
  for (int i = 0; i < 4; ++i) cols[0][i] /= n0;
  Amplitude c01 = dot(cols[0], cols[1]);
  for (int i = 0; i < 4; ++i) cols[1][i] -= c01 * cols[0][i];
  double n1b = nrm(cols[1]);
  for (int i = 0; i < 4; ++i) cols[1][i] /= n1b;

  int filled = 2;
  for (int e = 0; e < 4 && filled < 4; ++e) {
    std::array<Amplitude, 4> cand{};
    cand[e] = Amplitude{1.0, 0.0};
    for (int j = 0; j < filled; ++j) {
      Amplitude proj = dot(cols[j], cand);
      for (int i = 0; i < 4; ++i) cand[i] -= proj * cols[j][i];
    }
    double n = nrm(cand);
    if (n > 0.25) {
      for (int i = 0; i < 4; ++i) cand[i] /= n;
      cols[filled++] = cand;
    }
  }
  if (filled != 4) {
    throw std::runtime_error("neumark_dilation: basis completion failed");
  }

  NeumarkUnitary nu;
  nu.initial_ancilla = 0;
  for (int c = 0; c < 4; ++c) {
    for (int r = 0; r < 4; ++r) {
      nu.at(r, c) = cols[c][r];
    }
  }
  return nu;
}

Operator2 NeumarkUnitary::branch_block(int ancilla_out) const {
  Operator2 out;
  for (int k = 0; k < 2; ++k) {
    for (int j = 0; j < 2; ++j) {
      out.at(k, j) = at(ancilla_out * 2 + k, initial_ancilla * 2 + j);
    }
  }
  return out;
}

std::array<Amplitude, 4> NeumarkUnitary::apply(const PolarizationState &system) const {
  std::array<Amplitude, 4> out{};
  std::array<Amplitude, 2> in = {system.c_h, system.c_v};
  for (int r = 0; r < 4; ++r) {
    for (int j = 0; j < 2; ++j) {
      out[r] += at(r, initial_ancilla * 2 + j) * in[j];
    }
  }
  return out;
}

double unitarity_deviation(const NeumarkUnitary &nu) {
  double worst = 0.0;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      Amplitude acc{0.0, 0.0};
      for (int k = 0; k < 4; ++k) {
        acc += std::conj(nu.at(k, r)) * nu.at(k, c);
      }
      if (r == c) acc -= 1.0;
      worst = std::max(worst, std::abs(acc));
    }
  }
  return worst;
}

}  // namespace susd
