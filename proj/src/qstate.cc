#include "susd/qstate.h"

#include <cmath>
#include <stdexcept>

namespace susd {

double norm_squared(const PolarizationState &st) {
  return std::norm(st.c_h) + std::norm(st.c_v);
}

PolarizationState normalized(const PolarizationState &st) {
  double n2 = norm_squared(st);
  if (n2 < 1e-300) {
    throw std::domain_error("normalized: zero-norm state");
  }
  double inv = 1.0 / std::sqrt(n2);
  return {st.c_h * inv, st.c_v * inv};
}

Amplitude overlap(const PolarizationState &u, const PolarizationState &v) {
  return std::conj(u.c_h) * v.c_h + std::conj(u.c_v) * v.c_v;
}

double fidelity(const PolarizationState &u, const PolarizationState &v) {
  return std::norm(overlap(u, v));
}

bool equal_up_to_phase(const PolarizationState &u, const PolarizationState &v,
                       double tol) {
  return std::abs(1.0 - std::abs(overlap(u, v))) <= tol;
}

Operator2 Operator2::identity() { return diag(1.0, 1.0); }

Operator2 Operator2::zero() { return Operator2{}; }

Operator2 Operator2::diag(Amplitude hh, Amplitude vv) {
  Operator2 out;
  out.at(0, 0) = hh;
  out.at(1, 1) = vv;
  return out;
}

Operator2 Operator2::outer(const PolarizationState &ket, const PolarizationState &bra) {
  Operator2 out;
  out.at(0, 0) = ket.c_h * std::conj(bra.c_h);
  out.at(0, 1) = ket.c_h * std::conj(bra.c_v);
  out.at(1, 0) = ket.c_v * std::conj(bra.c_h);
  out.at(1, 1) = ket.c_v * std::conj(bra.c_v);
  return out;
}

Operator2 Operator2::adjoint() const {
  Operator2 out;
  out.at(0, 0) = std::conj(at(0, 0));
  out.at(0, 1) = std::conj(at(1, 0));
  out.at(1, 0) = std::conj(at(0, 1));
  out.at(1, 1) = std::conj(at(1, 1));
  return out;
}

PolarizationState Operator2::apply(const PolarizationState &st) const {
  return {at(0, 0) * st.c_h + at(0, 1) * st.c_v,
          at(1, 0) * st.c_h + at(1, 1) * st.c_v};
}

Operator2 Operator2::operator*(const Operator2 &rhs) const {
  Operator2 out;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      out.at(r, c) = at(r, 0) * rhs.at(0, c) + at(r, 1) * rhs.at(1, c);
    }
  }
  return out;
}

Operator2 Operator2::operator+(const Operator2 &rhs) const {
  Operator2 out;
  for (int i = 0; i < 4; ++i) out.m[i] = m[i] + rhs.m[i];
  return out;
}

Operator2 Operator2::operator-(const Operator2 &rhs) const {
  Operator2 out;
  for (int i = 0; i < 4; ++i) out.m[i] = m[i] - rhs.m[i];
  return out;
}

Operator2 Operator2::scaled(Amplitude factor) const {
  Operator2 out;
  for (int i = 0; i < 4; ++i) out.m[i] = m[i] * factor;
  return out;
}

double frobenius_norm(const Operator2 &op) {
  double acc = 0.0;
  for (const auto &e : op.m) acc += std::norm(e);
  return std::sqrt(acc);
}

double max_abs(const Operator2 &op) {
  double worst = 0.0;
  for (const auto &e : op.m) worst = std::max(worst, std::abs(e));
  return worst;
}

double aligned_frobenius_distance(const Operator2 &reference, const Operator2 &other) {
  Amplitude ip{0.0, 0.0};
  for (int i = 0; i < 4; ++i) {
    ip += std::conj(other.m[i]) * reference.m[i];
  }
  Amplitude phase{1.0, 0.0};
  if (std::abs(ip) > 1e-30) {
    phase = ip / std::abs(ip);
  }
  return frobenius_norm(reference - other.scaled(phase));
}

OverlapParams coefficients_from_overlap(double s) {
  if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
    throw std::domain_error("coefficients_from_overlap: s must lie in [0, 1]");
  }
  return {s, std::sqrt((1.0 + s) / 2.0), std::sqrt((1.0 - s) / 2.0)};
}

PolarizationState prepare_alice(double s, Sign sign) {
  OverlapParams p = coefficients_from_overlap(s);
  return {Amplitude{p.a, 0.0}, Amplitude{sign_factor(sign) * p.b, 0.0}};
}

PolarizationState prepare_phi(double s, Sign sign) {
  coefficients_from_overlap(s);
  double rs = std::sqrt(s);
  double ch = std::sqrt((1.0 - rs) / 2.0);
  double cv = -sign_factor(sign) * std::sqrt((1.0 + rs) / 2.0);
  return {Amplitude{ch, 0.0}, Amplitude{cv, 0.0}};
}

PolarizationState state_h() { return {Amplitude{1.0, 0.0}, Amplitude{0.0, 0.0}}; }

PolarizationState state_v() { return {Amplitude{0.0, 0.0}, Amplitude{1.0, 0.0}}; }

PolarizationState state_diag(Sign sign) {
  double inv = 1.0 / std::sqrt(2.0);
  return {Amplitude{inv, 0.0}, Amplitude{sign_factor(sign) * inv, 0.0}};
}

}  // namespace susd
