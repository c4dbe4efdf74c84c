#pragma once

#include <Eigen/Dense>

namespace oracle {

struct KalmanPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Conjugate Gaussian posterior for z = H x + v, v ~ N(0, R), written in information form
/// so it shares nothing with the gain-based update under test.
inline KalmanPosterior analytic_posterior(const Eigen::VectorXd& m0, const Eigen::MatrixXd& P0,
                                          const Eigen::MatrixXd& H, const Eigen::VectorXd& z,
                                          const Eigen::MatrixXd& R) {
  const Eigen::MatrixXd P0inv = P0.inverse();
  const Eigen::MatrixXd Rinv = R.inverse();
  const Eigen::MatrixXd info = P0inv + H.transpose() * Rinv * H;
  KalmanPosterior out;
  out.cov = info.inverse();
  out.mean = out.cov * (P0inv * m0 + H.transpose() * Rinv * z);
  return out;
}

}  // namespace oracle
