#pragma once

#include <array>
#include <complex>

namespace susd {

using Amplitude = std::complex<double>;

enum class Sign { plus, minus };

inline double sign_factor(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }
inline int sign_index(Sign s) { return s == Sign::plus ? 0 : 1; }
inline Sign other_sign(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
inline char sign_char(Sign s) { return s == Sign::plus ? '+' : '-'; }

// Single-photon polarization amplitudes over the (h, v) basis. The struct is
// also used for unnormalized amplitude vectors inside transfer computations;
// only the prepare_* functions guarantee unit norm.
struct PolarizationState {
  Amplitude c_h{0.0, 0.0};
  Amplitude c_v{0.0, 0.0};
};

double norm_squared(const PolarizationState &st);
PolarizationState normalized(const PolarizationState &st);  // throws on zero norm

// Inner product <u|v>, conjugate-linear in the first argument.
Amplitude overlap(const PolarizationState &u, const PolarizationState &v);

// |<u|v>|^2 for unit vectors.
double fidelity(const PolarizationState &u, const PolarizationState &v);

// Equality of unit states up to a global phase: | 1 - |<u|v>| | <= tol.
bool equal_up_to_phase(const PolarizationState &u, const PolarizationState &v,
                       double tol = 1e-10);

// 2x2 complex matrix, row-major, rows and columns ordered (h, v).
struct Operator2 {
  std::array<Amplitude, 4> m{};

  static Operator2 identity();
  static Operator2 zero();
  static Operator2 diag(Amplitude hh, Amplitude vv);
  // |ket><bra|
  static Operator2 outer(const PolarizationState &ket, const PolarizationState &bra);

  Amplitude &at(int r, int c) { return m[r * 2 + c]; }
  const Amplitude &at(int r, int c) const { return m[r * 2 + c]; }

  Operator2 adjoint() const;
  PolarizationState apply(const PolarizationState &st) const;
  Operator2 operator*(const Operator2 &rhs) const;
  Operator2 operator+(const Operator2 &rhs) const;
  Operator2 operator-(const Operator2 &rhs) const;
  Operator2 scaled(Amplitude factor) const;
};

double frobenius_norm(const Operator2 &op);
double max_abs(const Operator2 &op);

// min over unit phase factors of ||reference - phase * other||_F. Zero inputs
// compare by plain norm.
double aligned_frobenius_distance(const Operator2 &reference, const Operator2 &other);

// State-pair geometry for a given symmetric overlap s = a^2 - b^2.
struct OverlapParams {
  double s;
  double a;  // h coefficient, sqrt((1+s)/2)
  double b;  // v coefficient magnitude, sqrt((1-s)/2)
};

// Throws std::domain_error unless 0 <= s <= 1. All other entry points accept
// s already validated here, so domain checks live in one place.
OverlapParams coefficients_from_overlap(double s);

// a|h> + b|v> or a|h> - b|v>; the pair has overlap s. c_h is real and
// non-negative in every prepared state, fixing the global phase.
PolarizationState prepare_alice(double s, Sign sign);

// The conditional pair forwarded after a first-stage conclusive or failed
// discrimination; mutual overlap -sqrt(s).
PolarizationState prepare_phi(double s, Sign sign);

PolarizationState state_h();
PolarizationState state_v();
PolarizationState state_diag(Sign sign);  // (|h> ± |v>)/sqrt(2)

}  // namespace susd
