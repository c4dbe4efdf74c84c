#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "astrack/coords.hpp"
#include "astrack/filters.hpp"
#include "astrack/stats.hpp"
#include "astrack/types.hpp"

namespace astrack {

enum class UnitMode { Standardized, Physical };

/// How the one-step prior is built.
enum class PriorMode {
  Marginal,    ///< a3 ~ N(mean, sd); the other five components held near-deterministic at the central values
  Propagated,  ///< J Sigma0 J^T predicted until sd(a3) reaches the requested value, mean a3 overridden
};

struct OneStepSpec {
  double prior_a3_mean = 0.0;  ///< rad
  double prior_a3_sd = 0.0;    ///< rad
  double prior_other_sd = 1e-8;
  PriorMode prior_mode = PriorMode::Marginal;
  double obs_longitude = 0.0;  ///< rad
  double obs_latitude = 0.0;   ///< rad
  double obs_sigma = 0.0;      ///< rad, both angles
};

struct TrackingSpec {
  int n_obs = 200;
  double cadence = 3600.0;  ///< seconds in physical mode, time units otherwise
  double sigma_long = 0.0;  ///< rad
  double sigma_lat = 0.0;   ///< rad
  int fit_first_step = 20;  ///< 1-based index of the first step used in slope fits
};

struct Scenario {
  std::string name;
  double e = 0.0;
  double true_anomaly0 = 0.0;  ///< rad
  double inclination = 0.0;    ///< rad, rotation of the orbital plane about the x axis
  double p_sigma = 0.0;        ///< percent
  double p_tau = 0.0;          ///< percent
  int n_points = 2000;
  double propagation_periods = 0.0;
  std::uint64_t seed = 0;
  UnitMode units = UnitMode::Standardized;
  double mu = 1.0;
  double period = kTwoPi;  ///< central period; only read in physical mode
  std::optional<OneStepSpec> one_step;
  std::optional<TrackingSpec> tracking;
  UpdateConfig filter;

  void validate() const;
};

struct Sigmas {
  double sigma = 0.0;  ///< position
  double tau = 0.0;    ///< velocity
};

/// sigma = P_sigma/100 sqrt(1-e^2), tau = P_tau/100 in standardized units.
Sigmas standardized_sigmas(double e, double p_sigma, double p_tau);

/// Central state, frame and initial inertial covariance implied by a scenario.
struct ScenarioSetup {
  double mu = 1.0;
  double a = 1.0;
  Sigmas sigmas;
  StateVector central_state;
  CentralState central;
  Matrix6 eci_covariance = Matrix6::Identity();
};

/// In-plane state with the given e and true anomaly, then rotated about x by the inclination.
StateVector central_state_for(double e, double true_anomaly0, double inclination, double mu, double a);

ScenarioSetup make_setup(const Scenario& s);

struct LinearityPanel {
  int ast_index = 0;  ///< 0..5 for A1..A6
  int eci_index = 0;  ///< 0..5 for eps1..eps3, delta1..delta3
  std::array<double, 7> deviations{};
  std::array<double, 7> values{};  ///< exact AST values, NaN where the deviated orbit is unbound
  double central_value = 0.0;
  double slope = 0.0;  ///< analytic J entry
  double r2 = 0.0;     ///< squared correlation of (deviation, value)
  double r2_tangent = 0.0;  ///< R^2 of the values against the tangent line through the central value
  bool evaluable = true;
  bool flat = false;  ///< J entry is zero up to rounding
};

struct LinearityReport {
  std::vector<LinearityPanel> panels;  ///< 36 panels, AST-major
  double min_r2 = 1.0;  ///< over evaluable panels with non-zero J
  int min_ast_index = -1;
  int min_eci_index = -1;
  int unevaluable = 0;
};

LinearityReport run_linearity(const Scenario& s);

/// Thrown when cloud samples are unbound and the caller did not allow dropping them.
class RejectedSampleError : public Error {
 public:
  RejectedSampleError(std::size_t count, std::size_t total);
  std::size_t count() const { return count_; }

 private:
  std::size_t count_;
};

struct CloudStudy {
  PointCloud eci;
  PointCloud equinoctial;
  PointCloud ast;
  NormalityResult eci_normality;
  NormalityResult equinoctial_normality;
  NormalityResult ast_normality;
  std::size_t rejected = 0;
  double propagation_time = 0.0;
};

/// With drop_unbound = false any unbound sample raises RejectedSampleError.
CloudStudy run_cloud_study(const Scenario& s, bool drop_unbound = false);

struct OneStepRow {
  FilterKind kind = FilterKind::EKF;
  double mean_a3 = 0.0;  ///< rad
  double sd_a3 = 0.0;    ///< rad
  int iterations = 0;
  bool converged = true;
  double effective_sample_size = 0.0;
  std::string error;  ///< empty on success
};

struct OneStepReport {
  GaussianState prior;
  AnglesOnlyMeasurement measurement;
  double phi_obs = 0.0;  ///< mean-scale angle implied by the observed longitude
  double prior_time = 0.0;
  std::vector<OneStepRow> rows;
};

OneStepReport run_one_step(const Scenario& s, const std::vector<FilterKind>& kinds = all_filter_kinds());

struct DecaySlopes {
  std::array<double, 6> variance{};
  std::array<double, 6> abs_error{};
};

struct TrackingReport {
  TrackRecord record;
  std::vector<double> times;  ///< elapsed since the first epoch
  std::vector<AstCoordinates> truth;
  std::vector<AnglesOnlyMeasurement> measurements;  ///< inertial frame
  GaussianState initial;
  DecaySlopes slopes;
  /// log(var_j t) for j < 5, log(var_6 t^2).
  std::vector<std::array<double, 6>> log_scaled_variance;
  /// log(D_j sqrt(t)) for j < 5, log(D_6 t).
  std::vector<std::array<double, 6>> log_scaled_error;
};

TrackingReport run_tracking(const Scenario& s, int n_obs, double cadence, const AngleSigmas& sigmas,
                            const UpdateConfig& cfg);
/// Uses the scenario's tracking block and filter settings.
TrackingReport run_tracking(const Scenario& s);

/// Ordinary least-squares slope of y on x.
double ols_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Squared Pearson correlation; 1 when either series is constant.
double squared_correlation(const std::vector<double>& x, const std::vector<double>& y);

/// Example configurations used by the bundled scenario files and the acceptance suite.
Scenario example1();
Scenario example2();
Scenario example3();
Scenario example4();

}  // namespace astrack
