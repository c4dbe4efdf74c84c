#include <doctest.h>

#include <cmath>

#include "astrack/stats.hpp"
#include "support/properties.hpp"

using namespace astrack;

TEST_CASE("sampled clouds match their moments") {
  Vector6 mean;
  mean << 1, -2, 3, 0.5, 0, 10;
  Matrix6 A = Matrix6::Identity();
  A(1, 0) = 0.5;
  A(5, 2) = -0.3;
  const Matrix6 cov = A * A.transpose();
  const PointCloud c = sample_cloud(mean, cov, 100000, 42);
  const Eigen::RowVectorXd m = c.points.colwise().mean();
  CHECK((m.transpose() - mean).cwiseAbs().maxCoeff() < 0.02);
  const Eigen::MatrixXd X = c.points.rowwise() - m;
  const Eigen::MatrixXd S = X.transpose() * X / 99999.0;
  CHECK((S - cov).cwiseAbs().maxCoeff() < 0.03);
  CHECK(c.system == "eci");

  const PointCloud tiny = sample_cloud(mean, cov * 1e-20, 10, 1);
  CHECK((tiny.points.rowwise() - mean.transpose()).cwiseAbs().maxCoeff() < 1e-8);

  const PointCloud a = sample_cloud(mean, cov, 50, 5);
  const PointCloud b = sample_cloud(mean, cov, 50, 5);
  CHECK(a.points == b.points);

  Matrix6 bad = Matrix6::Identity();
  bad(0, 0) = -1.0;
  CHECK_THROWS_AS(sample_cloud(mean, bad, 10, 1), DomainError);
}

TEST_CASE("tail probabilities") {
  CHECK(chi_square_sf(0.0, 56) == 1.0);
  CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(chi_square_sf(56.0, 56) == doctest::Approx(0.4749).epsilon(1e-3));
  CHECK(normal_two_sided_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("Mardia statistics") {
  const PointCloud c = sample_cloud(Vector6::Zero(), Matrix6::Identity(), 4000, 3);
  const NormalityResult r = mardia_tests(c);
  CHECK(r.b2 == doctest::Approx(48.0).epsilon(0.03));
  CHECK(r.b1 < 0.2);
  CHECK(r.skewness_stat == doctest::Approx(4000.0 * r.b1 / 6.0));

  PointCloud skewed = c;
  skewed.points.col(0) = skewed.points.col(0).array().exp().matrix();
  const NormalityResult s = mardia_tests(skewed);
  CHECK(s.p_skewness < 1e-10);

  PointCloud singular = c;
  singular.points.col(5) = singular.points.col(4);
  CHECK_THROWS_AS(mardia_tests(singular), RankError);

  PointCloud few;
  few.points = c.points.topRows(7);
  CHECK_THROWS_AS(mardia_tests(few), DomainError);
}

TEST_CASE("Mardia affine invariance") {
  const auto o = testsupport::mardia_affine_invariance(10, 41);
  CAPTURE(o.worst);
  CHECK(o.passed);
}

TEST_CASE("Mardia calibration under the null" * doctest::timeout(300)) {
  const auto o = testsupport::mardia_null_calibration(500, 2000, 17);
  INFO(o.detail);
  CHECK(o.passed);
}
