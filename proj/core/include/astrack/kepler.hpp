#pragma once

#include "astrack/types.hpp"

/// Conversions between mean, eccentric and true anomaly for elliptic orbits.
///
/// Anomalies are plain numbers, not wrapped angles: every conversion reduces
/// its argument to the window [-pi, pi) + 2 pi k, converts inside the window
/// and adds 2 pi k back, so the winding count survives the round trip.
namespace astrack::kepler {

enum class AnomalyScale { Mean, Eccentric, True };

/// Orbital eccentricity restricted to the elliptic range [0, 1).
class Eccentricity {
 public:
  explicit Eccentricity(double e);

  double value() const noexcept { return e_; }
  operator double() const noexcept { return e_; }

 private:
  double e_;
};

struct Anomaly {
  double value = 0.0;  ///< radians, unbounded
  AnomalyScale scale = AnomalyScale::Mean;
};

/// Solves M = E - e sin E for E. The result lies in the same 2 pi window as M.
///
/// Newton iteration, started at M for e < 0.8 and at +-pi otherwise, with a
/// bisection fallback when Newton has not converged after 50 steps.
double solve_kepler(double mean_anomaly, Eccentricity e);

double eccentric_to_mean(double eccentric_anomaly, Eccentricity e);
double eccentric_to_true(double eccentric_anomaly, Eccentricity e);
double true_to_eccentric(double true_anomaly, Eccentricity e);
double mean_to_true(double mean_anomaly, Eccentricity e);
double true_to_mean(double true_anomaly, Eccentricity e);

/// Generic conversion between any two scales (composed through E).
Anomaly convert(Anomaly a, Eccentricity e, AnomalyScale target);

/// dM/dT = (1 - e^2)^{3/2} / (1 + e cos T)^2, always positive.
double true_to_mean_derivative(double true_anomaly, Eccentricity e);

}  // namespace astrack::kepler
