#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "astrack/coords.hpp"
#include "astrack/measurement.hpp"
#include "astrack/types.hpp"

namespace astrack {

enum class FilterKind { EKF, UKF, IEKF, IUKF, OCEKF, OCUKF, PF };

std::string_view to_string(FilterKind kind);
/// Case-insensitive; throws DomainError on an unknown name.
FilterKind parse_filter_kind(std::string_view name);
const std::vector<FilterKind>& all_filter_kinds();

/// Gaussian belief over AST coordinates.
struct GaussianState {
  Vector6 mean = Vector6::Zero();
  Matrix6 covariance = Matrix6::Identity();
  double time = 0.0;
};

struct UpdateConfig {
  FilterKind kind = FilterKind::IUKF;
  double ukf_alpha = 0.1;
  double ukf_beta = 2.0;
  double ukf_kappa = 0.0;
  int max_iterations = 50;
  double convergence_tol = 1e-10;
  std::size_t pf_particles = 1000000;
  std::uint64_t rng_seed = 0;

  void validate() const;
};

/// Raised when the particle weights collapse onto too few particles.
class DegeneracyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised by run_track with the index of the failing step.
class TrackError : public Error {
 public:
  TrackError(std::size_t step, const std::string& what);
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Linearization centre used by the observation-centred filters.
struct ObservationCenter {
  Vector6 mean = Vector6::Zero();
  Matrix6 covariance = Matrix6::Identity();
};

/// Measurement function, observation and noise seen by the update routines.
class MeasurementModel {
 public:
  virtual ~MeasurementModel() = default;

  virtual Eigen::VectorXd h(const Vector6& x) const = 0;
  /// dh/dx at x; numerical unless the model knows it.
  virtual Eigen::MatrixXd jacobian(const Vector6& x) const;
  virtual const Eigen::VectorXd& z() const = 0;
  virtual const Eigen::MatrixXd& R() const = 0;
  /// z - predicted, with any periodic components reduced to their principal branch.
  virtual Eigen::VectorXd residual(const Eigen::VectorXd& predicted) const;
  /// Defaults to the prior itself.
  virtual ObservationCenter observation_center(const GaussianState& prior) const;
};

/// h(x) = H x + offset.
class LinearMeasurementModel : public MeasurementModel {
 public:
  LinearMeasurementModel(Eigen::MatrixXd H, Eigen::VectorXd z, Eigen::MatrixXd R,
                         Eigen::VectorXd offset = {});

  Eigen::VectorXd h(const Vector6& x) const override;
  Eigen::MatrixXd jacobian(const Vector6&) const override { return H_; }
  const Eigen::VectorXd& z() const override { return z_; }
  const Eigen::MatrixXd& R() const override { return R_; }

 private:
  Eigen::MatrixXd H_;
  Eigen::VectorXd z_;
  Eigen::MatrixXd R_;
  Eigen::VectorXd offset_;
};

/// Longitude/latitude of an AST state on the CRTN sphere.
class AnglesMeasurementModel : public MeasurementModel {
 public:
  explicit AnglesMeasurementModel(const AnglesOnlyMeasurement& m);

  Eigen::VectorXd h(const Vector6& x) const override;
  const Eigen::VectorXd& z() const override { return z_; }
  const Eigen::MatrixXd& R() const override { return R_; }
  Eigen::VectorXd residual(const Eigen::VectorXd& predicted) const override;
  /// Prior mean with a3 moved to the mean-scale angle implied by the observed longitude,
  /// and the a3 spread replaced by the one implied by the longitude noise.
  ObservationCenter observation_center(const GaussianState& prior) const override;

 private:
  AnglesOnlyMeasurement m_;
  Eigen::VectorXd z_;
  Eigen::MatrixXd R_;
};

struct UpdateResult {
  GaussianState state;
  int iterations = 1;
  bool converged = true;
};

struct ParticleResult {
  Vector6 mean = Vector6::Zero();
  Matrix6 covariance = Matrix6::Zero();
  double effective_sample_size = 0.0;
  std::size_t particles = 0;
};

/// Exact linear propagation: a3 += a6 dt, P = F P F^T.
GaussianState predict(const GaussianState& g, double dt);

UpdateResult update(const GaussianState& g, const MeasurementModel& model, const UpdateConfig& cfg);
UpdateResult update(const GaussianState& g, const AnglesOnlyMeasurement& m, const UpdateConfig& cfg);

/// Importance sampling from the prior, weighted by the measurement likelihood.
ParticleResult update_pf(const GaussianState& g, const MeasurementModel& model, const UpdateConfig& cfg);
ParticleResult update_pf(const GaussianState& g, const AnglesOnlyMeasurement& m, const UpdateConfig& cfg);

/// Indices drawn by systematic resampling; weights must be normalized.
std::vector<std::size_t> systematic_resample(const std::vector<double>& weights, double u0);

/// Symmetrizes and checks positive definiteness, adding jitter once if needed.
Matrix6 enforce_spd(const Matrix6& P);

/// Fourth-order central differences of model.h.
Eigen::MatrixXd numerical_jacobian(const MeasurementModel& model, const Vector6& x);

struct TrackStep {
  GaussianState posterior;
  Vector2 residual = Vector2::Zero();  ///< observed minus predicted at the prior mean
  Vector6 abs_error = Vector6::Constant(std::numeric_limits<double>::quiet_NaN());
  int iterations = 1;
  bool converged = true;
};

struct TrackRecord {
  std::vector<TrackStep> steps;
};

/// Propagate, update and advance for each measurement; the CRTN frame stays fixed.
/// Measurements are inertial-frame angles and are rotated into CRTN before each update.
/// `truth` is optional; when given it must hold one AST state per measurement.
TrackRecord run_track(const GaussianState& initial, const CentralState& c,
                      const std::vector<AnglesOnlyMeasurement>& measurements, const UpdateConfig& cfg,
                      const std::vector<AstCoordinates>& truth = {});

}  // namespace astrack
