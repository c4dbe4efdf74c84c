#pragma once

#include <cstdint>
#include <string>

#include "astrack/types.hpp"

namespace astrack {

using CloudMatrix = Eigen::Matrix<double, Eigen::Dynamic, 6>;

struct PointCloud {
  CloudMatrix points;
  std::string system;  ///< coordinate-system tag, e.g. "eci", "equinoctial", "ast"

  Eigen::Index n_points() const { return points.rows(); }
};

struct NormalityResult {
  double b1 = 0.0;  ///< multivariate skewness
  double b2 = 0.0;  ///< multivariate kurtosis
  double skewness_stat = 0.0;  ///< N b1 / 6, chi-square with 56 degrees of freedom
  double kurtosis_stat = 0.0;  ///< standardized b2
  double p_skewness = 1.0;
  double p_kurtosis = 1.0;
};

/// Sample covariance is singular.
class RankError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// N draws from N(mean, cov); identical for identical seeds.
PointCloud sample_cloud(const Vector6& mean, const Matrix6& cov, Eigen::Index n, std::uint64_t seed,
                        std::string system = "eci");

/// Mardia skewness and kurtosis tests with asymptotic p-values.
NormalityResult mardia_tests(const PointCloud& c);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, double dof);

/// Two-sided standard-normal tail probability.
double normal_two_sided_p(double z);

}  // namespace astrack
