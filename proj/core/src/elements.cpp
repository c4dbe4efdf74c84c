#include "astrack/elements.hpp"

#include <cmath>

#include "astrack/kepler.hpp"

namespace astrack {

Vector6 StateVector::stacked() const {
  Vector6 x;
  x << position, velocity;
  return x;
}

StateVector StateVector::from_stacked(const Vector6& x, double epoch) {
  return {x.head<3>(), x.tail<3>(), epoch};
}

Matrix3 RtnBasis::matrix() const {
  Matrix3 m;
  m.col(0) = u;
  m.col(1) = v;
  m.col(2) = w;
  return m;
}

RtnBasis rtn_basis(const StateVector& s) {
  const double r = s.position.norm();
  if (!(r > 0.0) || !std::isfinite(r)) throw DegenerateStateError("position has zero length");
  RtnBasis b;
  b.u = s.position / r;
  const Vector3 tangential = s.velocity - s.velocity.dot(b.u) * b.u;
  const double tn = tangential.norm();
  if (!(tn > 1e-14 * std::max(1.0, s.velocity.norm())))
    throw DegenerateStateError("velocity is parallel to position");
  b.v = tangential / tn;
  b.w = b.u.cross(b.v);
  return b;
}

OrbitalFeatures orbital_features(const StateVector& s, double mu) {
  if (!(mu > 0.0)) throw DomainError("gravitational parameter must be positive");
  OrbitalFeatures f;
  f.mu = mu;
  f.basis = rtn_basis(s);
  f.h_vec = s.position.cross(s.velocity);
  f.h = f.h_vec.norm();
  f.e_vec = s.velocity.cross(f.h_vec) / mu - f.basis.u;
  f.f1 = f.e_vec.dot(f.basis.u);
  f.f2 = f.e_vec.dot(f.basis.v);
  f.e = std::hypot(f.f1, f.f2);
  if (!(f.e < 1.0)) throw UnboundOrbitError("orbit is not bound (e = " + std::to_string(f.e) + ")");
  f.theta_p = std::atan2(f.f2, f.f1);
  f.a = (f.h * f.h / mu) / (1.0 - f.e * f.e);
  f.n = std::sqrt(mu / (f.a * f.a * f.a));
  f.period = kTwoPi / f.n;
  return f;
}

PropagatedAngles propagated_angles(const OrbitalFeatures& f, double dt) {
  const kepler::Eccentricity e(f.e);
  const double m0 = kepler::true_to_mean(-f.theta_p, e);
  const double T = kepler::mean_to_true(m0 + f.n * dt, e);
  PropagatedAngles out;
  out.theta = f.theta_p + T;
  out.phi = f.n * dt;
  out.r = f.semi_latus_rectum() / (1.0 + f.e * std::cos(T));
  return out;
}

StateVector propagate(const StateVector& s, const OrbitalFeatures& f, double dt) {
  if (!std::isfinite(dt)) throw DomainError("propagation interval must be finite");
  if (dt == 0.0) return s;
  const PropagatedAngles ang = propagated_angles(f, dt);
  const double T = ang.theta - f.theta_p;
  const Vector3 radial = std::cos(ang.theta) * f.basis.u + std::sin(ang.theta) * f.basis.v;
  const Vector3 along = -std::sin(ang.theta) * f.basis.u + std::cos(ang.theta) * f.basis.v;
  const double k = f.mu / f.h;
  StateVector out;
  out.position = ang.r * radial;
  out.velocity = k * (f.e * std::sin(T) * radial + (1.0 + f.e * std::cos(T)) * along);
  out.epoch = s.epoch + dt;
  return out;
}

StateVector propagate(const StateVector& s, double mu, double dt) {
  return propagate(s, orbital_features(s, mu), dt);
}

double specific_energy(const StateVector& s, double mu) {
  return 0.5 * s.velocity.squaredNorm() - mu / s.position.norm();
}

}  // namespace astrack
