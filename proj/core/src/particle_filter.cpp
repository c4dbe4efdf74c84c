#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "astrack/filters.hpp"

namespace astrack {

namespace {

constexpr double kMinEffectiveSampleSize = 10.0;

}  // namespace

ParticleResult update_pf(const GaussianState& g, const MeasurementModel& model, const UpdateConfig& cfg) {
  cfg.validate();
  const std::size_t n = cfg.pf_particles;
  const Eigen::LLT<Matrix6> llt(enforce_spd(g.covariance));
  const Matrix6 L = llt.matrixL();
  const Eigen::LLT<Eigen::MatrixXd> rllt(model.R());
  if (rllt.info() != Eigen::Success) throw DomainError("measurement noise covariance is not positive definite");

  std::mt19937_64 rng(cfg.rng_seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<Vector6> particles(n);
  std::vector<double> logw(n);
  double max_logw = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    Vector6 xi;
    for (int k = 0; k < 6; ++k) xi[k] = normal(rng);
    particles[i] = g.mean + L * xi;
    double lw = -std::numeric_limits<double>::infinity();
    try {
      const Eigen::VectorXd r = model.residual(model.h(particles[i]));
      lw = -0.5 * rllt.matrixL().solve(r).squaredNorm();
    } catch (const DomainError&) {
      // Samples outside the bound-orbit domain carry no likelihood.
    }
    logw[i] = lw;
    max_logw = std::max(max_logw, lw);
  }
  if (!std::isfinite(max_logw)) throw DegeneracyError("every particle has zero likelihood");

  double sum = 0.0;
  for (double& w : logw) {
    w = std::exp(w - max_logw);
    sum += w;
  }
  double sum_sq = 0.0;
  Vector6 mean = Vector6::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    logw[i] /= sum;
    sum_sq += logw[i] * logw[i];
    mean += logw[i] * particles[i];
  }
  const double ess = 1.0 / sum_sq;
  if (ess < kMinEffectiveSampleSize) {
    std::ostringstream msg;
    msg << "particle weights degenerate: effective sample size " << ess << " of " << n;
    throw DegeneracyError(msg.str());
  }

  Matrix6 cov = Matrix6::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vector6 d = particles[i] - mean;
    cov += logw[i] * d * d.transpose();
  }

  ParticleResult out;
  out.mean = mean;
  out.covariance = 0.5 * (cov + cov.transpose());
  out.effective_sample_size = ess;
  out.particles = n;
  return out;
}

ParticleResult update_pf(const GaussianState& g, const AnglesOnlyMeasurement& m, const UpdateConfig& cfg) {
  return update_pf(g, AnglesMeasurementModel(m), cfg);
}

}  // namespace astrack
