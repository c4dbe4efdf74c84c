#include "astrack/stats.hpp"

#include <cmath>
#include <random>

#include <boost/math/special_functions/gamma.hpp>

namespace astrack {

PointCloud sample_cloud(const Vector6& mean, const Matrix6& cov, Eigen::Index n, std::uint64_t seed,
                        std::string system) {
  if (n < 2) throw DomainError("a point cloud needs at least two points");
  const Matrix6 sym = 0.5 * (cov + cov.transpose());
  Eigen::LLT<Matrix6> llt(sym);
  if (llt.info() != Eigen::Success) throw DomainError("cloud covariance is not positive definite");
  const Matrix6 L = llt.matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  PointCloud c;
  c.system = std::move(system);
  c.points.resize(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector6 xi;
    for (int k = 0; k < 6; ++k) xi[k] = normal(rng);
    c.points.row(i) = (mean + L * xi).transpose();
  }
  return c;
}

double chi_square_sf(double x, double dof) {
  if (!(x > 0.0)) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

double normal_two_sided_p(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

NormalityResult mardia_tests(const PointCloud& c) {
  constexpr double d = 6.0;
  const Eigen::Index N = c.n_points();
  if (N <= 7) throw DomainError("Mardia tests need more than d + 1 points");
  if (!c.points.allFinite()) throw DomainError("point cloud has non-finite entries");

  const Eigen::RowVectorXd mu = c.points.colwise().mean();
  const Eigen::MatrixXd X = c.points.rowwise() - mu;
  const Matrix6 S = (X.transpose() * X) / static_cast<double>(N);
  Eigen::LLT<Matrix6> llt(S);
  const Matrix6 L = llt.matrixL();
  if (llt.info() != Eigen::Success || L.diagonal().minCoeff() <= 1e-14 * L.diagonal().maxCoeff())
    throw RankError("sample covariance of the point cloud is singular");

  // Rows of Y are whitened points, so g_ij = y_i . y_j.
  const Eigen::MatrixXd Y = L.triangularView<Eigen::Lower>().solve(X.transpose()).transpose();

  double sum_cubes = 0.0;
  double sum_sq_diag = 0.0;
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::VectorXd g = Y * Y.row(i).transpose();
    sum_cubes += g.array().cube().sum();
    sum_sq_diag += g[i] * g[i];
  }

  const double n = static_cast<double>(N);
  NormalityResult r;
  r.b1 = sum_cubes / (n * n);
  r.b2 = sum_sq_diag / n;
  r.skewness_stat = n * r.b1 / 6.0;
  r.p_skewness = chi_square_sf(r.skewness_stat, d * (d + 1.0) * (d + 2.0) / 6.0);
  r.kurtosis_stat = (r.b2 - d * (d + 2.0)) / std::sqrt(8.0 * d * (d + 2.0) / n);
  r.p_kurtosis = normal_two_sided_p(r.kurtosis_stat);
  return r;
}

}  // namespace astrack
