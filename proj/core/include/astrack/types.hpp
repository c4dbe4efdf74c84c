#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace astrack {

using Vector2 = Eigen::Vector2d;
using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix2 = Eigen::Matrix2d;
using Matrix3 = Eigen::Matrix3d;
using Matrix6 = Eigen::Matrix<double, 6, 6>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Earth gravitational parameter [km^3/s^2].
inline constexpr double kEarthMu = 398600.4418;

constexpr double deg2rad(double deg) { return deg * (kPi / 180.0); }
constexpr double rad2deg(double rad) { return rad * (180.0 / kPi); }

/// Wraps an angle into [-pi, pi).
inline double wrap_pi(double angle) {
  double w = angle - kTwoPi * std::floor((angle + kPi) / kTwoPi);
  if (w >= kPi) w -= kTwoPi;
  if (w < -kPi) w += kTwoPi;
  return w;
}

/// Wraps an angle into [0, 2pi).
inline double wrap_two_pi(double angle) {
  double w = angle - kTwoPi * std::floor(angle / kTwoPi);
  if (w >= kTwoPi) w -= kTwoPi;
  return w;
}

/// Returns the representative of `angle` (mod 2pi) closest to `reference`.
inline double nearest_branch(double angle, double reference) {
  return reference + wrap_pi(angle - reference);
}

// Error hierarchy. Everything thrown by the library derives from Error.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (e >= 1, non-SPD covariance, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An iteration failed to converge or a factorization broke down.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Zero radius or position parallel to velocity.
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

/// Orbit with eccentricity >= 1.
class UnboundOrbitError : public Error {
 public:
  using Error::Error;
};

/// Inclination too close to pi for the requested element set.
class SingularityError : public Error {
 public:
  using Error::Error;
};

}  // namespace astrack
