#include "support/properties.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "astrack/coords.hpp"
#include "astrack/filters.hpp"
#include "astrack/stats.hpp"
#include "oracles/kalman.hpp"
#include "oracles/ks_uniform.hpp"
#include "support/generators.hpp"

namespace testsupport {

using namespace astrack;

namespace {

double state_rel_error(const StateVector& a, const StateVector& b) {
  return std::max((a.position - b.position).norm() / b.position.norm(),
                  (a.velocity - b.velocity).norm() / b.velocity.norm());
}

PropertyOutcome finish(std::string name, double worst, double tol, std::string detail = {}) {
  PropertyOutcome o;
  o.name = std::move(name);
  o.worst = worst;
  o.tolerance = tol;
  o.passed = std::isfinite(worst) && worst <= tol;
  o.detail = std::move(detail);
  return o;
}

RtnBasis basis_from(const Matrix3& r) { return {r.col(0), r.col(1), r.col(2)}; }

}  // namespace

PropertyOutcome roundtrip_keplerian(int n, std::uint64_t seed) {
  StateGenerator gen(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const StateVector s = gen.bound_state(0.95, 3.0);
    const RtnBasis basis = (k % 2 == 0) ? RtnBasis::standard() : basis_from(gen.rotation());
    try {
      const KeplerianElements el = eci_to_keplerian(s, basis, 1.0);
      worst = std::max(worst, state_rel_error(keplerian_to_eci(el, 1.0), s));
    } catch (const SingularityError&) {
      // A random basis can make the orbit retrograde; that case is out of the element set's domain.
    }
  }
  return finish("ECI -> Keplerian -> ECI round trip", worst, 1e-9);
}

PropertyOutcome roundtrip_ast(int n, std::uint64_t seed) {
  StateGenerator gen(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const StateVector central = gen.bound_state(0.95);
    const CentralState c(central, 1.0);
    const StateVector dev = gen.perturbed(central, 0.01);
    const double dt = gen.uniform(0.0, 3.0) * orbital_features(dev, 1.0).period;
    const StateVector s = propagate(dev, 1.0, dt);
    const AstCoordinates a = eci_to_ast(s, c);
    worst = std::max(worst, state_rel_error(ast_to_eci(a, c), s));
  }
  return finish("ECI -> AST -> ECI round trip", worst, 1e-9);
}

PropertyOutcome rotation_equivariance(int n, std::uint64_t seed) {
  StateGenerator gen(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const StateVector central = gen.bound_state(0.9);
    const StateVector dev = gen.perturbed(central, 0.02);
    const Matrix3 Q = gen.rotation();
    const StateVector central_r{Q * central.position, Q * central.velocity, central.epoch};
    const StateVector dev_r{Q * dev.position, Q * dev.velocity, dev.epoch};
    const AstCoordinates a = eci_to_ast(dev, CentralState(central, 1.0));
    const AstCoordinates b = eci_to_ast(dev_r, CentralState(central_r, 1.0));
    for (int j = 0; j < 6; ++j)
      worst = std::max(worst, std::abs(a[j] - b[j]) / std::max(1.0, std::abs(a[j])));
  }
  return finish("AST rotation equivariance", worst, 1e-10);
}

PropertyOutcome gauge_invariance(int n, std::uint64_t seed) {
  StateGenerator gen(seed);
  double worst = 0.0;
  const StateVector central{Vector3(1.0, 0.0, 0.0), Vector3(0.1, 1.05, 0.0), 0.0};
  const CentralState c(central, 1.0);
  for (int k = 0; k < n; ++k) {
    // Equatorial orbits: the shifted elements describe the same state.
    KeplerianElements el;
    el.i = 0.0;
    el.e = gen.uniform(0.05, 0.6);
    el.a = gen.uniform(0.8, 1.5);
    el.raan = gen.uniform(0.0, kTwoPi);
    el.argp = gen.uniform(0.0, kTwoPi);
    el.true_anomaly = gen.uniform(-kPi, kPi);
    KeplerianElements shifted = el;
    const double shift = gen.uniform(-1.0, 1.0);
    shifted.raan += shift;
    shifted.argp -= shift;
    const StateVector s1 = keplerian_to_eci(el, 1.0);
    const StateVector s2 = keplerian_to_eci(shifted, 1.0);
    worst = std::max(worst, state_rel_error(s2, s1));
    const AstCoordinates a1 = eci_to_ast(s1, c);
    const AstCoordinates a2 = eci_to_ast(s2, c);
    worst = std::max(worst, std::abs(a1[2] - a2[2]));
    worst = std::max(worst, std::abs(keplerian_to_equinoctial(el).values[2] -
                                     keplerian_to_equinoctial(shifted).values[2]));

    // Inclined orbits: the mean-longitude-like element only depends on raan + argp.
    KeplerianElements inc = el;
    inc.i = gen.uniform(0.1, 2.5);
    KeplerianElements inc_shifted = inc;
    inc_shifted.raan += shift;
    inc_shifted.argp -= shift;
    worst = std::max(worst, std::abs(keplerian_to_equinoctial(inc).values[2] -
                                     keplerian_to_equinoctial(inc_shifted).values[2]));
  }
  return finish("gauge invariance of E3 and A3", worst, 1e-10);
}

PropertyOutcome linear_h_degeneracy(int n, std::uint64_t seed) {
  StateGenerator gen(seed);
  double worst = 0.0;
  const std::vector<FilterKind> kinds{FilterKind::EKF,  FilterKind::UKF,   FilterKind::IEKF,
                                      FilterKind::IUKF, FilterKind::OCEKF, FilterKind::OCUKF};
  for (int k = 0; k < n; ++k) {
    const int m = (k % 2 == 0) ? 1 : 2;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, 6);
    if (m == 1) {
      H(0, 2) = 1.0;
    } else {
      for (int r = 0; r < m; ++r)
        for (int col = 0; col < 6; ++col) H(r, col) = gen.normal();
    }
    Matrix6 Am;
    for (int r = 0; r < 6; ++r)
      for (int col = 0; col < 6; ++col) Am(r, col) = 0.3 * gen.normal();
    GaussianState prior;
    prior.covariance = Am * Am.transpose() + 0.05 * Matrix6::Identity();
    for (int r = 0; r < 6; ++r) prior.mean[r] = gen.normal();
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(m, m);
    for (int r = 0; r < m; ++r) R(r, r) = gen.uniform(0.01, 0.5);
    Eigen::VectorXd z = H * prior.mean;
    for (int r = 0; r < m; ++r) z[r] += gen.normal();

    const LinearMeasurementModel model(H, z, R);
    const oracle::KalmanPosterior exact = oracle::analytic_posterior(prior.mean, prior.covariance, H, z, R);
    for (FilterKind kind : kinds) {
      UpdateConfig cfg;
      cfg.kind = kind;
      const UpdateResult res = update(prior, model, cfg);
      worst = std::max(worst, (res.state.mean - exact.mean).cwiseAbs().maxCoeff());
      worst = std::max(worst, (res.state.covariance - exact.cov).cwiseAbs().maxCoeff());
    }
  }
  return finish("linear-h filter degeneracy", worst, 1e-10);
}

PropertyOutcome mardia_affine_invariance(int n, std::uint64_t seed) {
  StateGenerator gen(seed);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    PointCloud c = sample_cloud(Vector6::Zero(), Matrix6::Identity(), 500, seed + static_cast<std::uint64_t>(k));
    c.points.col(0) = c.points.col(0).array().exp().matrix();  // skewed margin
    Matrix6 T;
    for (int r = 0; r < 6; ++r)
      for (int col = 0; col < 6; ++col) T(r, col) = gen.normal();
    T += 3.0 * Matrix6::Identity();
    Vector6 b;
    for (int r = 0; r < 6; ++r) b[r] = 10.0 * gen.normal();
    PointCloud d;
    d.points = (c.points * T.transpose()).rowwise() + b.transpose();
    const NormalityResult r1 = mardia_tests(c);
    const NormalityResult r2 = mardia_tests(d);
    worst = std::max(worst, std::abs(r1.b1 - r2.b1) / r1.b1);
    worst = std::max(worst, std::abs(r1.b2 - r2.b2) / r1.b2);
  }
  return finish("Mardia affine invariance", worst, 1e-9);
}

PropertyOutcome mardia_null_calibration(int replicates, int points, std::uint64_t seed) {
  int reject_skew = 0;
  int reject_kurt = 0;
  std::vector<double> p_skew;
  std::vector<double> p_kurt;
  for (int k = 0; k < replicates; ++k) {
    const PointCloud c = sample_cloud(Vector6::Zero(), Matrix6::Identity(), points,
                                      seed * 1000003ULL + static_cast<std::uint64_t>(k));
    const NormalityResult r = mardia_tests(c);
    reject_skew += r.p_skewness < 0.05;
    reject_kurt += r.p_kurtosis < 0.05;
    p_skew.push_back(r.p_skewness);
    p_kurt.push_back(r.p_kurtosis);
  }
  const double rate_s = static_cast<double>(reject_skew) / replicates;
  const double rate_k = static_cast<double>(reject_kurt) / replicates;
  const double ks_s = oracle::ks_uniform_pvalue(p_skew);
  const double ks_k = oracle::ks_uniform_pvalue(p_kurt);
  std::ostringstream detail;
  detail << "rejection skew=" << rate_s << " kurt=" << rate_k << "; KS p skew=" << ks_s << " kurt=" << ks_k;
  const double worst = std::max(std::abs(rate_s - 0.05), std::abs(rate_k - 0.05));
  PropertyOutcome o = finish("Mardia null calibration", worst, 0.02, detail.str());
  o.passed = o.passed && ks_s > 0.05 && ks_k > 0.05;
  return o;
}

std::vector<PropertyOutcome> run_all_properties() {
  return {roundtrip_keplerian(1000, 11),   roundtrip_ast(1000, 12),        rotation_equivariance(200, 13),
          gauge_invariance(200, 14),       linear_h_degeneracy(50, 15),    mardia_affine_invariance(20, 16),
          mardia_null_calibration(500, 2000, 17)};
}

}  // namespace testsupport
