#include "astrack/kepler.hpp"

#include <cmath>
#include <string>

namespace astrack::kepler {

namespace {

constexpr int kNewtonMaxIter = 50;
constexpr int kBisectionMaxIter = 200;

struct Window {
  double reduced;  // in [-pi, pi)
  double offset;   // 2 pi k
};

Window split(double x) {
  if (!std::isfinite(x)) throw DomainError("anomaly must be finite");
  const double r = wrap_pi(x);
  return {r, x - r};
}

// Solves E - e sin E = m for m in [0, pi]; the root lies in [0, pi].
double solve_half_window(double m, double e) {
  if (e == 0.0 || m == 0.0) return m;
  if (m == kPi) return kPi;

  double E = (e < 0.8) ? m : kPi;
  bool converged = false;
  for (int it = 0; it < kNewtonMaxIter; ++it) {
    const double g = E - e * std::sin(E) - m;
    const double dE = g / (1.0 - e * std::cos(E));
    E -= dE;
    if (std::abs(dE) <= 4e-16 * std::max(1.0, std::abs(E))) {
      converged = true;
      break;
    }
  }
  if (converged && E >= 0.0 && E <= kPi) return E;

  double lo = 0.0;
  double hi = kPi;
  for (int it = 0; it < kBisectionMaxIter && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (mid - e * std::sin(mid) - m < 0.0)
      lo = mid;
    else
      hi = mid;
  }
  E = 0.5 * (lo + hi);
  if (std::abs(E - e * std::sin(E) - m) > 1e-12)
    throw NumericalError("Kepler solver failed to converge for M=" + std::to_string(m) +
                         ", e=" + std::to_string(e));
  return E;
}

}  // namespace

Eccentricity::Eccentricity(double e) : e_(e) {
  if (!std::isfinite(e) || e < 0.0 || e >= 1.0)
    throw DomainError("eccentricity must lie in [0, 1), got " + std::to_string(e));
}

double solve_kepler(double mean_anomaly, Eccentricity e) {
  const Window w = split(mean_anomaly);
  const double E = solve_half_window(std::abs(w.reduced), e.value());
  return std::copysign(E, w.reduced) + w.offset;
}

double eccentric_to_mean(double eccentric_anomaly, Eccentricity e) {
  const Window w = split(eccentric_anomaly);
  return w.reduced - e.value() * std::sin(w.reduced) + w.offset;
}

double eccentric_to_true(double eccentric_anomaly, Eccentricity e) {
  const Window w = split(eccentric_anomaly);
  const double half = 0.5 * w.reduced;
  const double T = 2.0 * std::atan2(std::sqrt(1.0 + e.value()) * std::sin(half),
                                    std::sqrt(1.0 - e.value()) * std::cos(half));
  return T + w.offset;
}

double true_to_eccentric(double true_anomaly, Eccentricity e) {
  const Window w = split(true_anomaly);
  const double half = 0.5 * w.reduced;
  const double E = 2.0 * std::atan2(std::sqrt(1.0 - e.value()) * std::sin(half),
                                    std::sqrt(1.0 + e.value()) * std::cos(half));
  return E + w.offset;
}

double mean_to_true(double mean_anomaly, Eccentricity e) {
  return eccentric_to_true(solve_kepler(mean_anomaly, e), e);
}

double true_to_mean(double true_anomaly, Eccentricity e) {
  return eccentric_to_mean(true_to_eccentric(true_anomaly, e), e);
}

Anomaly convert(Anomaly a, Eccentricity e, AnomalyScale target) {
  if (a.scale == target) return a;
  double E = 0.0;
  switch (a.scale) {
    case AnomalyScale::Mean: E = solve_kepler(a.value, e); break;
    case AnomalyScale::Eccentric: E = a.value; break;
    case AnomalyScale::True: E = true_to_eccentric(a.value, e); break;
  }
  switch (target) {
    case AnomalyScale::Mean: return {eccentric_to_mean(E, e), target};
    case AnomalyScale::Eccentric: return {E, target};
    case AnomalyScale::True: return {eccentric_to_true(E, e), target};
  }
  return {E, AnomalyScale::Eccentric};
}

double true_to_mean_derivative(double true_anomaly, Eccentricity e) {
  const double ev = e.value();
  const double q = 1.0 + ev * std::cos(true_anomaly);
  return std::pow(1.0 - ev * ev, 1.5) / (q * q);
}

}  // namespace astrack::kepler
