#include "astrack/coords.hpp"

#include <algorithm>
#include <cmath>

#include "astrack/kepler.hpp"

namespace astrack {

namespace {

constexpr double kDegenerateAngle = 1e-12;
constexpr double kRetrogradeMargin = 1e-8;

Vector3 normal_from_angles(double i, double raan) {
  return {std::sin(i) * std::sin(raan), -std::sin(i) * std::cos(raan), std::cos(i)};
}

}  // namespace

CentralState::CentralState(const StateVector& state, double mu)
    : state_(state), features_(orbital_features(state, mu)), rotation_(features_.basis.matrix()) {
  A_ = state.position.norm();
  B_ = state.velocity.dot(features_.basis.u);
  C_ = state.velocity.dot(features_.basis.v);
}

StateVector CentralState::to_crtn(const StateVector& s) const {
  return {rotation_.transpose() * s.position, rotation_.transpose() * s.velocity, s.epoch};
}

StateVector CentralState::from_crtn(const StateVector& y) const {
  return {rotation_ * y.position, rotation_ * y.velocity, y.epoch};
}

KeplerianElements eci_to_keplerian(const StateVector& s, const RtnBasis& basis, double mu) {
  const Matrix3 Rb = basis.matrix();
  const StateVector y{Rb.transpose() * s.position, Rb.transpose() * s.velocity, s.epoch};
  const OrbitalFeatures f = orbital_features(y, mu);
  const Vector3 w = f.h_vec / f.h;

  KeplerianElements k;
  k.reference_basis = basis;
  k.i = std::acos(std::clamp(w.z(), -1.0, 1.0));
  if (kPi - k.i < kRetrogradeMargin)
    throw SingularityError("orbit is retrograde with respect to the reference basis");
  k.e = f.e;
  k.a = f.a;

  Vector3 node(-w.y(), w.x(), 0.0);
  const double node_norm = node.norm();
  if (node_norm < kDegenerateAngle) {
    k.raan = 0.0;
    node = Vector3::UnitX();
  } else {
    node /= node_norm;
    k.raan = wrap_two_pi(std::atan2(node.y(), node.x()));
  }
  const Vector3 m = w.cross(node);
  k.argp = (f.e < kDegenerateAngle) ? 0.0 : wrap_two_pi(std::atan2(f.e_vec.dot(m), f.e_vec.dot(node)));
  const double u_lat = std::atan2(y.position.dot(m), y.position.dot(node));
  k.true_anomaly = wrap_two_pi(u_lat - k.argp);
  return k;
}

StateVector keplerian_to_eci(const KeplerianElements& k, double mu, double epoch) {
  const kepler::Eccentricity ecc(k.e);
  if (!(k.a > 0.0)) throw DomainError("semi-major axis must be positive");
  const Vector3 w = normal_from_angles(k.i, k.raan);
  const Vector3 node(std::cos(k.raan), std::sin(k.raan), 0.0);
  const Vector3 m = w.cross(node);
  const Vector3 P = std::cos(k.argp) * node + std::sin(k.argp) * m;
  const Vector3 Q = -std::sin(k.argp) * node + std::cos(k.argp) * m;

  const double p = k.a * (1.0 - k.e * k.e);
  const double cT = std::cos(k.true_anomaly);
  const double sT = std::sin(k.true_anomaly);
  const double r = p / (1.0 + k.e * cT);
  const double vs = std::sqrt(mu / p);

  const Matrix3 Rb = k.reference_basis.matrix();
  StateVector s;
  s.position = Rb * (r * (cT * P + sT * Q));
  s.velocity = Rb * (vs * (-sT * P + (k.e + cT) * Q));
  s.epoch = epoch;
  return s;
}

EquinoctialElements keplerian_to_equinoctial(const KeplerianElements& k) {
  if (kPi - k.i < kRetrogradeMargin)
    throw SingularityError("equinoctial elements are singular for retrograde orbits");
  const double t = 2.0 * std::tan(0.5 * k.i);
  const double lp = k.raan + k.argp;
  EquinoctialElements q;
  q.reference_basis = k.reference_basis;
  q.values << t * std::cos(k.raan), t * std::sin(k.raan), lp + k.true_anomaly,
      k.e * std::cos(lp), k.e * std::sin(lp), k.a;
  return q;
}

EquinoctialElements eci_to_equinoctial(const StateVector& s, const RtnBasis& basis, double mu) {
  return keplerian_to_equinoctial(eci_to_keplerian(s, basis, mu));
}

AstFrame ast_frame(double a1, double a2) {
  const double hq = 0.5 * a1;
  const double kq = 0.5 * a2;
  const double s2 = 1.0 + hq * hq + kq * kq;
  AstFrame fr;
  fr.f = Vector3(1.0 - kq * kq + hq * hq, 2.0 * hq * kq, -2.0 * kq) / s2;
  fr.g = Vector3(2.0 * hq * kq, 1.0 + kq * kq - hq * hq, 2.0 * hq) / s2;
  return fr;
}

double ast_perigee_angle(const AstCoordinates& a) { return std::atan2(a[4], a[3]); }

double ast_true_longitude(const AstCoordinates& a) {
  const kepler::Eccentricity e(std::hypot(a[3], a[4]));
  const double theta_p = ast_perigee_angle(a);
  const double phi_p = kepler::true_to_mean(theta_p, e);
  return theta_p + kepler::mean_to_true(a[2] - phi_p, e);
}

AstCoordinates eci_to_ast(const StateVector& s, const CentralState& c) {
  const StateVector y = c.to_crtn(s);
  const OrbitalFeatures f = orbital_features(y, c.mu());
  const Vector3 w = f.h_vec / f.h;
  if (1.0 + w.z() < kRetrogradeMargin)
    throw SingularityError("state is retrograde with respect to the central frame");

  AstCoordinates out;
  out.epoch = s.epoch;
  out[0] = -2.0 * w.y() / (1.0 + w.z());
  out[1] = 2.0 * w.x() / (1.0 + w.z());
  const AstFrame fr = ast_frame(out[0], out[1]);
  out[3] = f.e_vec.dot(fr.f);
  out[4] = f.e_vec.dot(fr.g);
  out[5] = f.n;

  const kepler::Eccentricity e(std::hypot(out[3], out[4]));
  const double theta_p = std::atan2(out[4], out[3]);
  const double L = std::atan2(y.position.dot(fr.g), y.position.dot(fr.f));
  const double phi_raw = kepler::true_to_mean(theta_p, e) + kepler::true_to_mean(L - theta_p, e);
  const double drift = f.n * (s.epoch - c.epoch());
  out[2] = drift + wrap_pi(phi_raw - drift);
  return out;
}

StateVector ast_to_eci(const AstCoordinates& a, const CentralState& c) {
  const double mu = c.mu();
  const double ecc = std::hypot(a[3], a[4]);
  const kepler::Eccentricity e(ecc);
  if (!(a[5] > 0.0)) throw DomainError("mean motion must be positive");
  const AstFrame fr = ast_frame(a[0], a[1]);
  const double sma = std::cbrt(mu / (a[5] * a[5]));
  const double p = sma * (1.0 - ecc * ecc);
  const double L = ast_true_longitude(a);
  const double cL = std::cos(L);
  const double sL = std::sin(L);
  const double r = p / (1.0 + a[3] * cL + a[4] * sL);
  const double vs = std::sqrt(mu / p);

  StateVector y;
  y.position = r * (cL * fr.f + sL * fr.g);
  y.velocity = vs * (-(sL + a[4]) * fr.f + (cL + a[3]) * fr.g);
  y.epoch = a.epoch;
  return c.from_crtn(y);
}

AstCoordinates propagate_ast(const AstCoordinates& a, double dt) {
  AstCoordinates out = a;
  out[2] += a[5] * dt;
  out.epoch += dt;
  return out;
}

AstJacobian ast_jacobian(const CentralState& c) {
  const double A = c.A();
  const double B = c.B();
  const double C = c.C();
  const double mu = c.mu();
  const OrbitalFeatures& f = c.features();

  const double h = A * C;
  const double sma = A * mu / (2.0 * mu - A * (B * B + C * C));
  const double n = std::sqrt(mu / (sma * sma * sma));
  const double T0 = -f.theta_p;

  AstJacobian out;
  const double q = 1.0 + f.e * std::cos(T0);
  out.D = std::pow(1.0 - f.e * f.e, 1.5) / (q * q);
  out.P1 = -1.5 * (n / (h * h)) * 2.0 * A * C;
  out.P2 = -1.5 * (n / (h * h)) * (sma / mu);
  const double k = A * C * C - mu;
  out.Q1 = 2.0 * C * C * k + 2.0 * A * B * B * C * C;
  out.Q2 = -2.0 * B * C * k - 2.0 * A * B * B * B * C + 2.0 * B * C * mu;
  out.Q3 = 4.0 * A * C * k + 2.0 * A * A * B * B * C;

  Matrix6& J = out.j;
  J.setZero();
  J(0, 2) = -B / (A * C);
  J(0, 5) = 1.0 / C;
  J(1, 2) = -1.0 / A;
  J(2, 1) = out.D / A;
  J(3, 0) = C * C / mu;
  J(3, 1) = -B * C / mu;
  J(3, 4) = 2.0 * A * C / mu;
  J(4, 0) = -B * C / mu;
  J(4, 1) = B * B / mu - 1.0 / A;
  J(4, 3) = -A * C / mu;
  J(4, 4) = -A * B / mu;
  J(5, 0) = out.P1 * C + out.P2 * out.Q1;
  J(5, 1) = -out.P1 * B + out.P2 * out.Q2;
  J(5, 3) = 2.0 * out.P2 * A * A * B * C * C;
  J(5, 4) = out.P1 * A + out.P2 * out.Q3;
  return out;
}

}  // namespace astrack
