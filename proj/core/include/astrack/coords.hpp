#pragma once

#include "astrack/elements.hpp"
#include "astrack/types.hpp"

namespace astrack {

/// Classical elements relative to a reference basis. Angles in radians.
struct KeplerianElements {
  double i = 0.0;
  double raan = 0.0;
  double e = 0.0;
  double argp = 0.0;
  double a = 0.0;
  double true_anomaly = 0.0;
  RtnBasis reference_basis;
};

/// E1..E6: 2tan(i/2)cos(raan), 2tan(i/2)sin(raan), raan+argp+T, e cos(raan+argp), e sin(raan+argp), a.
struct EquinoctialElements {
  Vector6 values = Vector6::Zero();
  RtnBasis reference_basis;
};

/// The reference state that fixes the CRTN frame. Immutable once built.
class CentralState {
 public:
  CentralState(const StateVector& state, double mu);

  const StateVector& state() const { return state_; }
  const OrbitalFeatures& features() const { return features_; }
  /// R = [u v w] of the central state; CRTN coordinates are y = R^T x.
  const Matrix3& rotation() const { return rotation_; }
  double mu() const { return features_.mu; }
  double epoch() const { return state_.epoch; }
  double A() const { return A_; }
  double B() const { return B_; }
  double C() const { return C_; }

  /// Expresses an inertial state in CRTN coordinates.
  StateVector to_crtn(const StateVector& s) const;
  StateVector from_crtn(const StateVector& y) const;

 private:
  StateVector state_;
  OrbitalFeatures features_;
  Matrix3 rotation_;
  double A_ = 0.0;
  double B_ = 0.0;
  double C_ = 0.0;
};

/// a1..a6. a3 is the mean-scale angle, kept unwrapped; a6 is the mean motion.
struct AstCoordinates {
  Vector6 values = Vector6::Zero();
  double epoch = 0.0;

  double operator[](int k) const { return values[k]; }
  double& operator[](int k) { return values[k]; }
};

/// In-plane unit vectors spanned by the orbit, written in CRTN coordinates.
struct AstFrame {
  Vector3 f = Vector3::UnitX();
  Vector3 g = Vector3::UnitY();
};

struct AstJacobian {
  Matrix6 j = Matrix6::Zero();
  double D = 0.0;
  double P1 = 0.0;
  double P2 = 0.0;
  double Q1 = 0.0;
  double Q2 = 0.0;
  double Q3 = 0.0;
};

KeplerianElements eci_to_keplerian(const StateVector& s, const RtnBasis& basis, double mu);
StateVector keplerian_to_eci(const KeplerianElements& k, double mu, double epoch = 0.0);

EquinoctialElements keplerian_to_equinoctial(const KeplerianElements& k);
EquinoctialElements eci_to_equinoctial(const StateVector& s, const RtnBasis& basis, double mu);

AstFrame ast_frame(double a1, double a2);

/// Perigee direction measured in the (f, g) frame, atan2(a5, a4).
double ast_perigee_angle(const AstCoordinates& a);

/// True-scale angle L(t) of the object in the (f, g) frame.
double ast_true_longitude(const AstCoordinates& a);

AstCoordinates eci_to_ast(const StateVector& s, const CentralState& c);
StateVector ast_to_eci(const AstCoordinates& a, const CentralState& c);

/// Exact linear propagation in AST coordinates: a3 += a6 dt.
AstCoordinates propagate_ast(const AstCoordinates& a, double dt);

/// Analytic first-order map from CRTN deviations (eps, delta) at t = 0 to AST deviations.
AstJacobian ast_jacobian(const CentralState& c);

}  // namespace astrack
