#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "susd/qstate.h"

using namespace susd;

namespace {

constexpr double root_half = 0.7071067811865476;

PolarizationState make(Amplitude h, Amplitude v) { return {h, v}; }

}  // namespace

TEST_CASE("prepared pair has the requested overlap") {
  // Reference coefficients computed independently for s = 0.25.
  PolarizationState plus = prepare_alice(0.25, Sign::plus);
  PolarizationState minus = prepare_alice(0.25, Sign::minus);
  CHECK(plus.c_h.real() == doctest::Approx(0.7905694150420949).epsilon(1e-15));
  CHECK(plus.c_v.real() == doctest::Approx(0.6123724356957945).epsilon(1e-15));
  CHECK(minus.c_h.real() == doctest::Approx(0.7905694150420949).epsilon(1e-15));
  CHECK(minus.c_v.real() == doctest::Approx(-0.6123724356957945).epsilon(1e-15));
  CHECK(plus.c_h.imag() == 0.0);
  CHECK(plus.c_v.imag() == 0.0);

  for (double s : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) {
    PolarizationState u = prepare_alice(s, Sign::plus);
    PolarizationState v = prepare_alice(s, Sign::minus);
    CHECK(norm_squared(u) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(norm_squared(v) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(overlap(u, v).real() == doctest::Approx(s).epsilon(1e-14));
    CHECK(overlap(u, v).imag() == 0.0);
  }
}

TEST_CASE("forwarded pair has overlap -sqrt(s)") {
  PolarizationState plus = prepare_phi(0.25, Sign::plus);
  PolarizationState minus = prepare_phi(0.25, Sign::minus);
  CHECK(plus.c_h.real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(plus.c_v.real() == doctest::Approx(-0.8660254037844386).epsilon(1e-15));
  CHECK(minus.c_h.real() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(minus.c_v.real() == doctest::Approx(0.8660254037844386).epsilon(1e-15));

  for (double s : {0.0, 0.1, 0.25, 0.5, 0.9, 1.0}) {
    PolarizationState u = prepare_phi(s, Sign::plus);
    PolarizationState v = prepare_phi(s, Sign::minus);
    CHECK(norm_squared(u) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(overlap(u, v).real() == doctest::Approx(-std::sqrt(s)).epsilon(1e-14));
  }
}

TEST_CASE("overlap parameter is validated in one place") {
  CHECK_THROWS_AS(coefficients_from_overlap(-0.01), std::domain_error);
  CHECK_THROWS_AS(coefficients_from_overlap(1.01), std::domain_error);
  CHECK_THROWS_AS(coefficients_from_overlap(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(prepare_alice(-0.5, Sign::plus), std::domain_error);
  CHECK_THROWS_AS(prepare_phi(2.0, Sign::minus), std::domain_error);
  OverlapParams p = coefficients_from_overlap(0.25);
  CHECK(p.s == 0.25);
  CHECK(p.a * p.a - p.b * p.b == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("inner product is conjugate-linear in the first argument") {
  PolarizationState u = make({0.6, 0.0}, {0.0, 0.8});
  PolarizationState v = make({0.3, 0.4}, {0.5, -0.2});
  Amplitude factor{0.2, -0.9};
  PolarizationState su = make(factor * u.c_h, factor * u.c_v);
  Amplitude lhs = overlap(su, v);
  Amplitude rhs = std::conj(factor) * overlap(u, v);
  CHECK(std::abs(lhs - rhs) < 1e-15);
  CHECK(std::abs(overlap(u, v) - std::conj(overlap(v, u))) < 1e-15);
  CHECK(fidelity(u, v) == doctest::Approx(fidelity(v, u)).epsilon(1e-14));
}

TEST_CASE("normalization preserves phase and rejects the zero vector") {
  PolarizationState n = normalized(make({0.0, 0.0}, {0.0, 2.0}));
  CHECK(std::abs(n.c_v - Amplitude{0.0, 1.0}) < 1e-15);
  CHECK_THROWS_AS(normalized(make({0.0, 0.0}, {0.0, 0.0})), std::domain_error);
}

TEST_CASE("phase-blind equality") {
  PolarizationState u = normalized(make({0.6, 0.1}, {0.3, -0.5}));
  Amplitude phase = std::polar(1.0, 1.234);
  PolarizationState pu = make(phase * u.c_h, phase * u.c_v);
  CHECK(equal_up_to_phase(u, pu));
  CHECK(equal_up_to_phase(u, u));
  CHECK_FALSE(equal_up_to_phase(state_h(), state_v()));
  CHECK_FALSE(equal_up_to_phase(state_h(), state_diag(Sign::plus)));
}

TEST_CASE("basis states") {
  CHECK(state_h().c_h == Amplitude{1.0, 0.0});
  CHECK(state_h().c_v == Amplitude{0.0, 0.0});
  CHECK(state_v().c_v == Amplitude{1.0, 0.0});
  CHECK(state_diag(Sign::plus).c_h.real() == doctest::Approx(root_half).epsilon(1e-15));
  CHECK(state_diag(Sign::minus).c_v.real() == doctest::Approx(-root_half).epsilon(1e-15));
}

TEST_CASE("operator algebra") {
  Operator2 id = Operator2::identity();
  Operator2 d = Operator2::diag({2.0, 0.0}, {0.0, 1.0});
  PolarizationState v = make({0.3, -0.1}, {0.7, 0.2});

  PolarizationState idv = id.apply(v);
  CHECK(std::abs(idv.c_h - v.c_h) < 1e-16);
  CHECK(std::abs(idv.c_v - v.c_v) < 1e-16);

  Operator2 prod = d * d;
  CHECK(std::abs(prod.at(0, 0) - Amplitude{4.0, 0.0}) < 1e-15);
  CHECK(std::abs(prod.at(1, 1) - Amplitude{-1.0, 0.0}) < 1e-15);

  PolarizationState lhs = prod.apply(v);
  PolarizationState rhs = d.apply(d.apply(v));
  CHECK(std::abs(lhs.c_h - rhs.c_h) < 1e-15);
  CHECK(std::abs(lhs.c_v - rhs.c_v) < 1e-15);

  PolarizationState u = make({0.5, 0.5}, {-0.2, 0.1});
  Amplitude a1 = overlap(u, d.apply(v));
  Amplitude a2 = overlap(d.adjoint().apply(u), v);
  CHECK(std::abs(a1 - a2) < 1e-15);

  Operator2 outer = Operator2::outer(state_h(), state_diag(Sign::plus));
  PolarizationState ov = outer.apply(state_diag(Sign::plus));
  CHECK(std::abs(ov.c_h - Amplitude{1.0, 0.0}) < 1e-15);
  CHECK(std::abs(ov.c_v) < 1e-15);

  CHECK(frobenius_norm(id) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(max_abs(d) == doctest::Approx(2.0).epsilon(1e-15));

  Operator2 sum = id + id;
  Operator2 diff = sum - id;
  CHECK(max_abs(diff - id) < 1e-16);
  Operator2 scaled = id.scaled({0.0, 3.0});
  CHECK(std::abs(scaled.at(0, 0) - Amplitude{0.0, 3.0}) < 1e-16);
}

TEST_CASE("phase-aligned distance ignores exactly one global phase") {
  Operator2 a = Operator2::outer(state_diag(Sign::plus), state_h());
  Operator2 rotated = a.scaled(std::polar(1.0, -2.1));
  CHECK(aligned_frobenius_distance(a, rotated) < 1e-14);
  CHECK(aligned_frobenius_distance(rotated, a) < 1e-14);

  Operator2 b = Operator2::outer(state_diag(Sign::minus), state_h());
  CHECK(aligned_frobenius_distance(a, b) > 0.5);

  Operator2 zero = Operator2::zero();
  CHECK(aligned_frobenius_distance(zero, zero) == 0.0);
  CHECK(aligned_frobenius_distance(a, zero) == doctest::Approx(1.0).epsilon(1e-14));
}
