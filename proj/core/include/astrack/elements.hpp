#pragma once

#include "astrack/types.hpp"

namespace astrack {

/// Cartesian inertial position [km] and velocity [km/s] at an epoch [s].
struct StateVector {
  Vector3 position = Vector3::Zero();
  Vector3 velocity = Vector3::Zero();
  double epoch = 0.0;

  Vector6 stacked() const;
  static StateVector from_stacked(const Vector6& x, double epoch = 0.0);
};

/// Radial / tangential / normal unit vectors of a state.
struct RtnBasis {
  Vector3 u = Vector3::UnitX();
  Vector3 v = Vector3::UnitY();
  Vector3 w = Vector3::UnitZ();

  /// Columns [u v w].
  Matrix3 matrix() const;
  static RtnBasis standard() { return {}; }
};

struct OrbitalFeatures {
  RtnBasis basis;
  Vector3 h_vec = Vector3::Zero();
  double h = 0.0;  ///< |x cross v|
  Vector3 e_vec = Vector3::Zero();
  double e = 0.0;
  double a = 0.0;
  double period = 0.0;
  double n = 0.0;
  double theta_p = 0.0;  ///< perigee direction measured from u towards v
  double f1 = 0.0;       ///< e cos(theta_p)
  double f2 = 0.0;       ///< e sin(theta_p)
  double mu = 0.0;

  double semi_latus_rectum() const { return h * h / mu; }
};

/// Angles swept since the epoch of the state: theta(0) = phi(0) = 0.
struct PropagatedAngles {
  double theta = 0.0;
  double phi = 0.0;
  double r = 0.0;
};

RtnBasis rtn_basis(const StateVector& s);

/// Throws UnboundOrbitError for e >= 1 and DegenerateStateError for rectilinear states.
OrbitalFeatures orbital_features(const StateVector& s, double mu);

PropagatedAngles propagated_angles(const OrbitalFeatures& f, double dt);

/// Exact two-body propagation by dt seconds (negative allowed).
StateVector propagate(const StateVector& s, const OrbitalFeatures& f, double dt);
StateVector propagate(const StateVector& s, double mu, double dt);

double specific_energy(const StateVector& s, double mu);

}  // namespace astrack
