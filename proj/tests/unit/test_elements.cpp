#include <doctest.h>

#include <cmath>

#include "astrack/coords.hpp"
#include "astrack/elements.hpp"
#include "astrack/harness.hpp"
#include "oracles/rk45.hpp"
#include "support/generators.hpp"

using namespace astrack;

namespace {

StateVector standardized_state(double e, double T0) {
  const double h2 = 1.0 - e * e;
  const double h = std::sqrt(h2);
  const double A = h2 / (1.0 + e * std::cos(T0));
  const double C = h / A;
  const double B = e / (A * C) * std::sin(T0);
  return {Vector3(A, 0.0, 0.0), Vector3(B, C, 0.0), 0.0};
}

double rel(const Vector3& a, const Vector3& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("rtn basis of a standardized state is the standard basis") {
  const RtnBasis b = rtn_basis(standardized_state(0.7, deg2rad(45.0)));
  CHECK((b.u - Vector3::UnitX()).norm() < 1e-15);
  CHECK((b.v - Vector3::UnitY()).norm() < 1e-15);
  CHECK((b.w - Vector3::UnitZ()).norm() < 1e-15);
}

TEST_CASE("rtn basis is right handed and orthonormal") {
  testsupport::StateGenerator gen(1);
  for (int k = 0; k < 200; ++k) {
    const RtnBasis b = rtn_basis(gen.bound_state());
    const Matrix3 m = b.matrix();
    CHECK((m.transpose() * m - Matrix3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(m.determinant() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("rtn basis recovers a rotated plane") {
  const double i = deg2rad(158.0);
  Matrix3 rot;
  rot << 1, 0, 0, 0, std::cos(i), -std::sin(i), 0, std::sin(i), std::cos(i);
  const StateVector s0{Vector3(9078.0, 0, 0), Vector3(2.6, 8.1, 0), 0.0};
  const StateVector s{rot * s0.position, rot * s0.velocity, 0.0};
  const Matrix3 m = rtn_basis(s).matrix();
  CHECK((m - rot).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("degenerate states are rejected") {
  CHECK_THROWS_AS(rtn_basis({Vector3::Zero(), Vector3(1, 0, 0), 0.0}), DegenerateStateError);
  CHECK_THROWS_AS(rtn_basis({Vector3(1, 0, 0), Vector3(2, 0, 0), 0.0}), DegenerateStateError);
  CHECK_THROWS_AS(orbital_features({Vector3(1, 0, 0), Vector3(0, 2, 0), 0.0}, 1.0), UnboundOrbitError);
}

TEST_CASE("features of the standardized eccentric state") {
  const OrbitalFeatures f = orbital_features(standardized_state(0.7, deg2rad(45.0)), 1.0);
  CHECK(f.e == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(f.a == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.n == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(f.theta_p == doctest::Approx(-deg2rad(45.0)).epsilon(1e-14));
  CHECK(std::hypot(f.f1, f.f2) == doctest::Approx(f.e));
  CHECK(std::abs(f.e_vec.dot(f.basis.w)) < 1e-10);
  CHECK(f.period == doctest::Approx(kTwoPi));
}

TEST_CASE("features of a circular orbit") {
  const OrbitalFeatures f = orbital_features({Vector3(1, 0, 0), Vector3(0, 1, 0), 0.0}, 1.0);
  CHECK(f.e < 1e-15);
  CHECK(f.a == doctest::Approx(1.0));
  CHECK(f.n == doctest::Approx(1.0));
  CHECK(std::abs(f.f1) < 1e-15);
  CHECK(std::abs(f.f2) < 1e-15);
}

TEST_CASE("twelve hour orbit radii") {
  const StateVector s = central_state_for(0.7, deg2rad(45.0), 0.0, kEarthMu, std::cbrt(kEarthMu * std::pow(43200.0 / kTwoPi, 2)));
  const OrbitalFeatures f = orbital_features(s, kEarthMu);
  CHECK(f.a == doctest::Approx(26610.0).epsilon(0.01));
  CHECK(f.a * (1 + f.e) == doctest::Approx(45237.0).epsilon(0.01));
  CHECK(f.a * (1 - f.e) == doctest::Approx(7983.0).epsilon(0.01));
  CHECK(s.position.norm() == doctest::Approx(9078.0).epsilon(0.01));
  // Commonly quoted as B = 2.6 km/s, C = 8.1 km/s; the closed form gives 2.68 and 8.10.
  CHECK(s.velocity.x() == doctest::Approx(2.6825).epsilon(1e-3));
  CHECK(s.velocity.y() == doctest::Approx(8.1).epsilon(0.01));
}

TEST_CASE("propagation identities") {
  const StateVector s = standardized_state(0.7, deg2rad(45.0));
  const OrbitalFeatures f = orbital_features(s, 1.0);
  const StateVector same = propagate(s, f, 0.0);
  CHECK(same.position == s.position);
  CHECK(same.velocity == s.velocity);
  const StateVector period = propagate(s, f, f.period);
  CHECK(rel(period.position, s.position) < 1e-9);
  CHECK(rel(period.velocity, s.velocity) < 1e-9);
  CHECK(period.epoch == doctest::Approx(f.period));
  CHECK_THROWS_AS(propagate(s, f, std::nan("")), DomainError);
}

TEST_CASE("propagation agrees with numerical integration") {
  for (double T0 : {0.0, 45.0, 200.0}) {
    const StateVector s = standardized_state(0.7, deg2rad(T0));
    for (double frac : {0.5, -0.3, 1.7}) {
      const double t = frac * kTwoPi;
      const StateVector p = propagate(s, 1.0, t);
      const oracle::State6 y = oracle::integrate_two_body(
          {s.position.x(), s.position.y(), s.position.z(), s.velocity.x(), s.velocity.y(), s.velocity.z()}, 1.0, t);
      CHECK(rel(p.position, Vector3(y[0], y[1], y[2])) < 1e-7);
      CHECK(rel(p.velocity, Vector3(y[3], y[4], y[5])) < 1e-7);
    }
  }
  testsupport::StateGenerator gen(5);
  for (int k = 0; k < 20; ++k) {
    const StateVector s = gen.bound_state(0.9);
    const double t = gen.uniform(-5.0, 5.0);
    const StateVector p = propagate(s, 1.0, t);
    const oracle::State6 y = oracle::integrate_two_body(
        {s.position.x(), s.position.y(), s.position.z(), s.velocity.x(), s.velocity.y(), s.velocity.z()}, 1.0, t);
    CHECK(rel(p.position, Vector3(y[0], y[1], y[2])) < 1e-7);
  }
}

TEST_CASE("conserved quantities and linear mean-scale angle") {
  const StateVector s = standardized_state(0.7, deg2rad(45.0));
  const OrbitalFeatures f0 = orbital_features(s, 1.0);
  double max_phi_dev = 0.0;
  for (int k = -50; k <= 150; ++k) {
    const double t = 3.0 * f0.period * k / 100.0;
    const OrbitalFeatures ft = orbital_features(propagate(s, f0, t), 1.0);
    CHECK(std::abs(ft.h - f0.h) / f0.h < 1e-10);
    CHECK(std::abs(ft.a - f0.a) / f0.a < 1e-10);
    CHECK(std::abs(ft.e - f0.e) < 1e-10);
    CHECK((ft.h_vec - f0.h_vec).norm() / f0.h < 1e-10);
    CHECK(std::abs(specific_energy(propagate(s, f0, t), 1.0) - specific_energy(s, 1.0)) < 1e-10);
    max_phi_dev = std::max(max_phi_dev, std::abs(propagated_angles(f0, t).phi - f0.n * t));
  }
  CHECK(max_phi_dev < 1e-10);
  const PropagatedAngles a0 = propagated_angles(f0, 0.0);
  CHECK(std::abs(a0.theta) < 1e-14);
  CHECK(a0.phi == 0.0);
}

TEST_CASE("propagation composes") {
  testsupport::StateGenerator gen(6);
  for (int k = 0; k < 50; ++k) {
    const StateVector s = gen.bound_state(0.9);
    const double t1 = gen.uniform(-4.0, 4.0);
    const double t2 = gen.uniform(-4.0, 4.0);
    const StateVector a = propagate(propagate(s, 1.0, t1), 1.0, t2);
    const StateVector b = propagate(s, 1.0, t1 + t2);
    CHECK(rel(a.position, b.position) < 1e-9);
    CHECK(rel(a.velocity, b.velocity) < 1e-9);
  }
}
