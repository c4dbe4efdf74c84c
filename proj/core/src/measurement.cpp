#include "astrack/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace astrack {

UnitDirection angles_to_unit(double longitude, double latitude) {
  const double cl = std::cos(latitude);
  return {Vector3(cl * std::cos(longitude), cl * std::sin(longitude), std::sin(latitude))};
}

AnglePair unit_to_angles(const UnitDirection& d) {
  const Vector3 z = d.z.normalized();
  return {std::atan2(z.y(), z.x()), std::asin(std::clamp(z.z(), -1.0, 1.0))};
}

AnglePair predict_angles_unwrapped(const AstCoordinates& a) {
  const AstFrame fr = ast_frame(a[0], a[1]);
  const double L = ast_true_longitude(a);
  const Vector3 z = std::cos(L) * fr.f + std::sin(L) * fr.g;
  AnglePair out;
  out.longitude = nearest_branch(std::atan2(z.y(), z.x()), L);
  out.latitude = std::asin(std::clamp(z.z(), -1.0, 1.0));
  return out;
}

AnglePair predict_angles(const AstCoordinates& a) {
  AnglePair out = predict_angles_unwrapped(a);
  out.longitude = wrap_pi(out.longitude);
  return out;
}

double spherical_latitude(const AstCoordinates& a) {
  const double i = 2.0 * std::atan(0.5 * std::hypot(a[0], a[1]));
  const double raan = std::atan2(a[1], a[0]);
  return std::asin(std::sin(i) * std::sin(ast_true_longitude(a) - raan));
}

AnglesOnlyMeasurement simulate_measurement(const StateVector& truth, const CentralState& c,
                                           const AngleSigmas& sigmas, std::uint64_t seed) {
  const StateVector y = c.to_crtn(truth);
  const AnglePair exact = unit_to_angles({y.position});

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double n_lon = normal(rng);
  const double n_lat = normal(rng);

  AnglesOnlyMeasurement m;
  m.longitude = wrap_pi(exact.longitude + sigmas.longitude * n_lon);
  m.latitude = std::clamp(exact.latitude + sigmas.latitude * n_lat, -0.5 * kPi, 0.5 * kPi);
  m.sigma_long = sigmas.longitude;
  m.sigma_lat = sigmas.latitude;
  m.time = truth.epoch;
  return m;
}

AnglesOnlyMeasurement rotate_measurement(const AnglesOnlyMeasurement& m, const Matrix3& rotation) {
  const UnitDirection d = angles_to_unit(m.longitude, m.latitude);
  const AnglePair ang = unit_to_angles({rotation * d.z});
  AnglesOnlyMeasurement out = m;
  out.longitude = wrap_pi(ang.longitude);
  out.latitude = ang.latitude;
  return out;
}

}  // namespace astrack
