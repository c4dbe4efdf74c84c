#pragma once

#include <cstdint>

#include "astrack/coords.hpp"
#include "astrack/types.hpp"

namespace astrack {

/// Direction to the object seen from the frame origin, in CRTN angles.
struct AnglesOnlyMeasurement {
  double longitude = 0.0;  ///< [-pi, pi)
  double latitude = 0.0;   ///< [-pi/2, pi/2]
  double sigma_long = 0.0;
  double sigma_lat = 0.0;
  double time = 0.0;

  Vector2 angles() const { return {longitude, latitude}; }
};

struct AnglePair {
  double longitude = 0.0;
  double latitude = 0.0;
};

struct UnitDirection {
  Vector3 z = Vector3::UnitX();
};

struct AngleSigmas {
  double longitude = 0.0;
  double latitude = 0.0;
};

UnitDirection angles_to_unit(double longitude, double latitude);
AnglePair unit_to_angles(const UnitDirection& d);

/// Longitude of the AST state kept on the branch nearest its true-scale angle L.
AnglePair predict_angles_unwrapped(const AstCoordinates& a);

/// Same direction with longitude wrapped to [-pi, pi).
AnglePair predict_angles(const AstCoordinates& a);

/// asin(sin i sin(L - raan)) from the element form of the AST state.
double spherical_latitude(const AstCoordinates& a);

/// Noisy angles of `truth` seen in the frame of `c`. Deterministic for a fixed seed.
AnglesOnlyMeasurement simulate_measurement(const StateVector& truth, const CentralState& c,
                                           const AngleSigmas& sigmas, std::uint64_t seed);

/// Re-expresses the observed direction after the frame rotation d -> rotation * d.
AnglesOnlyMeasurement rotate_measurement(const AnglesOnlyMeasurement& m, const Matrix3& rotation);

}  // namespace astrack
