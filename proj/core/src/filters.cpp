#include "astrack/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "astrack/kepler.hpp"

namespace astrack {

namespace {

constexpr int kA3 = 2;
constexpr int kA6 = 5;

struct Linearization {
  Eigen::MatrixXd H;
  Eigen::VectorXd b;
  Eigen::MatrixXd Omega;
};

Linearization linearize_ekf(const MeasurementModel& model, const Vector6& x) {
  Linearization lin;
  lin.H = model.jacobian(x);
  lin.b = model.h(x) - lin.H * x;
  lin.Omega = Eigen::MatrixXd::Zero(lin.b.size(), lin.b.size());
  return lin;
}

Matrix6 cholesky_factor(const Matrix6& P) {
  Eigen::LLT<Matrix6> llt(enforce_spd(P));
  return llt.matrixL();
}

// Statistical linear regression of h through the scaled unscented transform of N(mean, cov).
Linearization linearize_slr(const MeasurementModel& model, const Vector6& mean, const Matrix6& cov,
                            const UpdateConfig& cfg) {
  constexpr double n = 6.0;
  const double alpha2 = cfg.ukf_alpha * cfg.ukf_alpha;
  const double lambda = alpha2 * (n + cfg.ukf_kappa) - n;
  const double gamma = std::sqrt(n + lambda);
  const Matrix6 L = cholesky_factor(cov);

  const Eigen::VectorXd z0 = model.h(mean);
  const Eigen::Index m = z0.size();
  Eigen::MatrixXd zp(m, 6);
  Eigen::MatrixXd zm(m, 6);
  for (int j = 0; j < 6; ++j) {
    zp.col(j) = model.h(mean + gamma * L.col(j));
    zm.col(j) = model.h(mean - gamma * L.col(j));
  }

  const double wm0 = lambda / (n + lambda);
  const double wc0 = wm0 + (1.0 - alpha2 + cfg.ukf_beta);
  const double wi = 1.0 / (2.0 * (n + lambda));

  // Deviations from z0 keep the sums well conditioned when wm0 is large and negative.
  Eigen::VectorXd dz_mean = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < 6; ++j) dz_mean += wi * ((zp.col(j) - z0) + (zm.col(j) - z0));
  const Eigen::VectorXd zhat = z0 + dz_mean;

  Eigen::MatrixXd Pzz = wc0 * dz_mean * dz_mean.transpose();
  for (int j = 0; j < 6; ++j) {
    const Eigen::VectorXd dp = zp.col(j) - zhat;
    const Eigen::VectorXd dm = zm.col(j) - zhat;
    Pzz += wi * (dp * dp.transpose() + dm * dm.transpose());
  }

  const Eigen::MatrixXd dZ = zp - zm;
  Linearization lin;
  const Eigen::MatrixXd Ht = L.transpose().triangularView<Eigen::Upper>().solve(dZ.transpose());
  lin.H = Ht.transpose() / (2.0 * gamma);
  lin.b = zhat - lin.H * mean;
  lin.Omega = Pzz - lin.H * cov * lin.H.transpose();
  lin.Omega = 0.5 * (lin.Omega + lin.Omega.transpose()).eval();
  return lin;
}

GaussianState kalman_step(const GaussianState& prior, const Linearization& lin, const Eigen::VectorXd& z,
                          const Eigen::MatrixXd& R) {
  const Matrix6& P0 = prior.covariance;
  const Eigen::MatrixXd S = lin.H * P0 * lin.H.transpose() + R + lin.Omega;
  const Eigen::MatrixXd PHt = P0 * lin.H.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(0.5 * (S + S.transpose()));
  if (ldlt.info() != Eigen::Success) throw NumericalError("innovation covariance factorization failed");
  const Eigen::MatrixXd K = ldlt.solve(PHt.transpose()).transpose();

  GaussianState post;
  post.time = prior.time;
  post.mean = prior.mean + K * (z - lin.H * prior.mean - lin.b);
  post.covariance = enforce_spd(P0 - K * S * K.transpose());
  return post;
}

UpdateResult iterate(const GaussianState& prior, const MeasurementModel& model, const Eigen::VectorXd& z,
                     const UpdateConfig& cfg, bool unscented) {
  UpdateResult res;
  GaussianState current = prior;
  res.converged = false;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    const Linearization lin = unscented ? linearize_slr(model, current.mean, current.covariance, cfg)
                                        : linearize_ekf(model, current.mean);
    GaussianState next = kalman_step(prior, lin, z, model.R());
    const double shift = (next.mean - current.mean).norm();
    current = next;
    res.iterations = it;
    if (shift < cfg.convergence_tol) {
      res.converged = true;
      break;
    }
  }
  res.state = current;
  return res;
}

Eigen::VectorXd aligned_observation(const MeasurementModel& model, const Vector6& x) {
  const Eigen::VectorXd pred = model.h(x);
  return pred + model.residual(pred);
}

void check_prior(const GaussianState& g) {
  if (!g.mean.allFinite() || !g.covariance.allFinite()) throw DomainError("state contains non-finite values");
}

}  // namespace

std::string_view to_string(FilterKind kind) {
  switch (kind) {
    case FilterKind::EKF: return "ekf";
    case FilterKind::UKF: return "ukf";
    case FilterKind::IEKF: return "iekf";
    case FilterKind::IUKF: return "iukf";
    case FilterKind::OCEKF: return "ocekf";
    case FilterKind::OCUKF: return "ocukf";
    case FilterKind::PF: return "pf";
  }
  return "unknown";
}

FilterKind parse_filter_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  for (FilterKind k : all_filter_kinds())
    if (to_string(k) == lower) return k;
  throw DomainError("unknown filter kind '" + std::string(name) +
                    "' (expected ekf, ukf, iekf, iukf, ocekf, ocukf or pf)");
}

const std::vector<FilterKind>& all_filter_kinds() {
  static const std::vector<FilterKind> kinds{FilterKind::EKF,   FilterKind::UKF,   FilterKind::IEKF,
                                             FilterKind::IUKF,  FilterKind::OCEKF, FilterKind::OCUKF,
                                             FilterKind::PF};
  return kinds;
}

void UpdateConfig::validate() const {
  if (pf_particles < 1) throw DomainError("field 'filter.pf_particles': must be at least 1");
  if (max_iterations < 1) throw DomainError("field 'filter.max_iterations': must be at least 1");
  if (!(convergence_tol > 0.0)) throw DomainError("field 'filter.convergence_tol': must be positive");
  if (!(ukf_alpha > 0.0)) throw DomainError("field 'filter.ukf_alpha': must be positive");
  if (!(6.0 + ukf_kappa > 0.0)) throw DomainError("field 'filter.ukf_kappa': must exceed -6");
}

TrackError::TrackError(std::size_t step, const std::string& what)
    : Error("step " + std::to_string(step) + ": " + what), step_(step) {}

Eigen::MatrixXd MeasurementModel::jacobian(const Vector6& x) const { return numerical_jacobian(*this, x); }

Eigen::VectorXd MeasurementModel::residual(const Eigen::VectorXd& predicted) const { return z() - predicted; }

ObservationCenter MeasurementModel::observation_center(const GaussianState& prior) const {
  return {prior.mean, prior.covariance};
}

LinearMeasurementModel::LinearMeasurementModel(Eigen::MatrixXd H, Eigen::VectorXd z, Eigen::MatrixXd R,
                                               Eigen::VectorXd offset)
    : H_(std::move(H)), z_(std::move(z)), R_(std::move(R)), offset_(std::move(offset)) {
  if (H_.cols() != 6 || H_.rows() != z_.size() || R_.rows() != z_.size() || R_.cols() != z_.size())
    throw DomainError("inconsistent linear measurement model dimensions");
  if (offset_.size() == 0) offset_ = Eigen::VectorXd::Zero(z_.size());
}

Eigen::VectorXd LinearMeasurementModel::h(const Vector6& x) const { return H_ * x + offset_; }

AnglesMeasurementModel::AnglesMeasurementModel(const AnglesOnlyMeasurement& m) : m_(m), z_(2), R_(2, 2) {
  if (!(m.sigma_long > 0.0) || !(m.sigma_lat > 0.0))
    throw DomainError("measurement standard deviations must be positive");
  z_ << m.longitude, m.latitude;
  R_.setZero();
  R_(0, 0) = m.sigma_long * m.sigma_long;
  R_(1, 1) = m.sigma_lat * m.sigma_lat;
}

Eigen::VectorXd AnglesMeasurementModel::h(const Vector6& x) const {
  const AnglePair p = predict_angles_unwrapped({x, m_.time});
  Eigen::VectorXd out(2);
  out << p.longitude, p.latitude;
  return out;
}

Eigen::VectorXd AnglesMeasurementModel::residual(const Eigen::VectorXd& predicted) const {
  Eigen::VectorXd r = z_ - predicted;
  r[0] = wrap_pi(r[0]);
  return r;
}

ObservationCenter AnglesMeasurementModel::observation_center(const GaussianState& prior) const {
  const Vector6& x = prior.mean;
  const kepler::Eccentricity e(std::hypot(x[3], x[4]));
  const double theta_p = std::atan2(x[4], x[3]);
  const double phi_p = kepler::true_to_mean(theta_p, e);
  const double t_obs = m_.longitude - theta_p;
  const double phi_obs = phi_p + kepler::true_to_mean(t_obs, e);

  ObservationCenter c{prior.mean, prior.covariance};
  c.mean[kA3] = nearest_branch(phi_obs, x[kA3]);

  const double sd_old = std::sqrt(prior.covariance(kA3, kA3));
  const double sd_new = m_.sigma_long * kepler::true_to_mean_derivative(t_obs, e);
  if (sd_old > 0.0) {
    const double s = sd_new / sd_old;
    c.covariance.row(kA3) *= s;
    c.covariance.col(kA3) *= s;
  }
  return c;
}

Matrix6 enforce_spd(const Matrix6& P) {
  Matrix6 S = 0.5 * (P + P.transpose());
  if (!S.allFinite()) throw NumericalError("covariance has non-finite entries");
  Eigen::LLT<Matrix6> llt(S);
  if (llt.info() == Eigen::Success) return S;
  const double jitter = 1e-12 * S.trace() / 6.0;
  S.diagonal().array() += jitter;
  llt.compute(S);
  if (llt.info() == Eigen::Success) return S;
  Eigen::SelfAdjointEigenSolver<Matrix6> eig(S);
  std::ostringstream msg;
  msg << "covariance is not positive definite after jitter " << jitter
      << " (smallest eigenvalue " << eig.eigenvalues().minCoeff() << ")";
  throw NumericalError(msg.str());
}

Eigen::MatrixXd numerical_jacobian(const MeasurementModel& model, const Vector6& x) {
  const Eigen::VectorXd h0 = model.h(x);
  Eigen::MatrixXd J(h0.size(), 6);
  for (int j = 0; j < 6; ++j) {
    const double step = 1e-4 * std::max(std::abs(x[j]), 1e-2);
    const auto at = [&](double k) {
      Vector6 xk = x;
      xk[j] += k * step;
      return model.h(xk);
    };
    J.col(j) = (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * step);
  }
  return J;
}

GaussianState predict(const GaussianState& g, double dt) {
  if (!std::isfinite(dt)) throw DomainError("prediction interval must be finite");
  if (dt == 0.0) return g;
  Matrix6 F = Matrix6::Identity();
  F(kA3, kA6) = dt;
  GaussianState out;
  out.mean = g.mean;
  out.mean[kA3] += g.mean[kA6] * dt;
  out.covariance = F * g.covariance * F.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  out.time = g.time + dt;
  return out;
}

UpdateResult update(const GaussianState& g, const MeasurementModel& model, const UpdateConfig& cfg) {
  cfg.validate();
  check_prior(g);
  const Eigen::VectorXd z = aligned_observation(model, g.mean);
  UpdateResult res;
  switch (cfg.kind) {
    case FilterKind::EKF:
      res.state = kalman_step(g, linearize_ekf(model, g.mean), z, model.R());
      break;
    case FilterKind::UKF:
      res.state = kalman_step(g, linearize_slr(model, g.mean, g.covariance, cfg), z, model.R());
      break;
    case FilterKind::IEKF:
      res = iterate(g, model, z, cfg, false);
      break;
    case FilterKind::IUKF:
      res = iterate(g, model, z, cfg, true);
      break;
    case FilterKind::OCEKF: {
      const ObservationCenter c = model.observation_center(g);
      res.state = kalman_step(g, linearize_ekf(model, c.mean), z, model.R());
      break;
    }
    case FilterKind::OCUKF: {
      const ObservationCenter c = model.observation_center(g);
      res.state = kalman_step(g, linearize_slr(model, c.mean, c.covariance, cfg), z, model.R());
      break;
    }
    case FilterKind::PF: {
      const ParticleResult pf = update_pf(g, model, cfg);
      res.state.mean = pf.mean;
      res.state.covariance = enforce_spd(pf.covariance);
      break;
    }
  }
  res.state.time = g.time;
  return res;
}

UpdateResult update(const GaussianState& g, const AnglesOnlyMeasurement& m, const UpdateConfig& cfg) {
  return update(g, AnglesMeasurementModel(m), cfg);
}

std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, double u0) {
  if (!(u0 >= 0.0 && u0 < 1.0)) throw DomainError("systematic resampling offset must lie in [0, 1)");
  const std::size_t n = weights.size();
  std::vector<std::size_t> idx(n);
  double cumulative = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double target = (static_cast<double>(i) + u0) / static_cast<double>(n);
    while (j + 1 < n && cumulative + weights[j] <= target) cumulative += weights[j++];
    idx[i] = j;
  }
  return idx;
}

TrackRecord run_track(const GaussianState& initial, const CentralState& c,
                      const std::vector<AnglesOnlyMeasurement>& measurements, const UpdateConfig& cfg,
                      const std::vector<AstCoordinates>& truth) {
  if (!truth.empty() && truth.size() != measurements.size())
    throw DomainError("truth sequence length does not match the measurement count");
  TrackRecord rec;
  rec.steps.reserve(measurements.size());
  const Matrix3 to_crtn = c.rotation().transpose();
  GaussianState g = initial;
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const AnglesOnlyMeasurement& m = measurements[k];
    if (m.time < g.time) throw TrackError(k, "measurements are not time ordered");
    try {
      GaussianState prior = predict(g, m.time - g.time);
      const Vector6& x = prior.mean;
      if (!(std::hypot(x[3], x[4]) < 1.0) || !(x[kA6] > 0.0))
        throw DomainError("propagated mean is not a bound orbit");
      const AnglesMeasurementModel model(rotate_measurement(m, to_crtn));
      UpdateResult res = update(prior, model, cfg);

      TrackStep step;
      step.residual = model.residual(model.h(prior.mean));
      step.posterior = res.state;
      step.iterations = res.iterations;
      step.converged = res.converged;
      if (!truth.empty()) step.abs_error = (truth[k].values - res.state.mean).cwiseAbs();
      rec.steps.push_back(step);
      g = res.state;
    } catch (const TrackError&) {
      throw;
    } catch (const Error& ex) {
      throw TrackError(k, ex.what());
    }
  }
  return rec;
}

}  // namespace astrack
