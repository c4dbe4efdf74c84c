#include "astrack/harness.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "astrack/kepler.hpp"
#include "astrack/measurement.hpp"

namespace astrack {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxTruthDraws = 10000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Matrix3 rotation_about_x(double angle) {
  Matrix3 r;
  r << 1.0, 0.0, 0.0, 0.0, std::cos(angle), -std::sin(angle), 0.0, std::sin(angle), std::cos(angle);
  return r;
}

StateVector deviated_state(const CentralState& c, const Vector6& crtn_deviation) {
  StateVector y{Vector3(c.A(), 0.0, 0.0), Vector3(c.B(), c.C(), 0.0), c.epoch()};
  y.position += crtn_deviation.head<3>();
  y.velocity += crtn_deviation.tail<3>();
  return c.from_crtn(y);
}

bool is_bound(const StateVector& s, double mu) {
  try {
    orbital_features(s, mu);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

void Scenario::validate() const {
  if (!std::isfinite(e) || e < 0.0 || e >= 1.0) throw DomainError("field 'e': eccentricity must lie in [0, 1)");
  if (!(p_sigma > 0.0)) throw DomainError("field 'p_sigma': must be positive");
  if (!(p_tau > 0.0)) throw DomainError("field 'p_tau': must be positive");
  if (n_points < 8) throw DomainError("field 'n_points': need at least 8 points");
  if (!std::isfinite(propagation_periods)) throw DomainError("field 'propagation_periods': must be finite");
  if (!(mu > 0.0)) throw DomainError("field 'mu': must be positive");
  if (units == UnitMode::Physical && !(period > 0.0)) throw DomainError("field 'period_hours': must be positive");
  if (!std::isfinite(true_anomaly0)) throw DomainError("field 'true_anomaly0_deg': must be finite");
  if (!std::isfinite(inclination) || inclination < 0.0 || inclination > kPi)
    throw DomainError("field 'inclination_deg': must lie in [0, 180]");
  if (one_step) {
    if (!(one_step->prior_a3_sd > 0.0)) throw DomainError("field 'update.prior_a3_sd_deg': must be positive");
    if (!(one_step->prior_other_sd > 0.0)) throw DomainError("field 'update.prior_other_sd': must be positive");
    if (!(one_step->obs_sigma > 0.0)) throw DomainError("field 'update.obs_sigma_deg': must be positive");
  }
  if (tracking) {
    if (tracking->n_obs < 0) throw DomainError("field 'tracking.n_obs': must be non-negative");
    if (!(tracking->cadence > 0.0)) throw DomainError("field 'tracking.cadence': must be positive");
    if (!(tracking->sigma_long > 0.0)) throw DomainError("field 'tracking.sigma_long_deg': must be positive");
    if (!(tracking->sigma_lat > 0.0)) throw DomainError("field 'tracking.sigma_lat_deg': must be positive");
  }
  filter.validate();
}

Sigmas standardized_sigmas(double e, double p_sigma, double p_tau) {
  const kepler::Eccentricity ecc(e);
  return {p_sigma / 100.0 * std::sqrt(1.0 - ecc * ecc), p_tau / 100.0};
}

StateVector central_state_for(double e, double true_anomaly0, double inclination, double mu, double a) {
  const kepler::Eccentricity ecc(e);
  const double h = std::sqrt(mu * a * (1.0 - e * e));
  const double A = (h * h / mu) / (1.0 + e * std::cos(true_anomaly0));
  const double C = h / A;
  const double B = (mu / h) * e * std::sin(true_anomaly0);
  const Matrix3 r = rotation_about_x(inclination);
  return {r * Vector3(A, 0.0, 0.0), r * Vector3(B, C, 0.0), 0.0};
}

ScenarioSetup make_setup(const Scenario& s) {
  s.validate();
  const double mu = (s.units == UnitMode::Standardized) ? 1.0 : s.mu;
  double a = 1.0;
  if (s.units == UnitMode::Physical) {
    const double n = kTwoPi / s.period;
    a = std::cbrt(mu / (n * n));
  }
  const Sigmas unit = standardized_sigmas(s.e, s.p_sigma, s.p_tau);
  const Sigmas sig{unit.sigma * a, unit.tau * std::sqrt(mu / a)};
  const StateVector x0 = central_state_for(s.e, s.true_anomaly0, s.inclination, mu, a);
  Matrix6 cov = Matrix6::Zero();
  cov.diagonal() << Vector3::Constant(sig.sigma * sig.sigma), Vector3::Constant(sig.tau * sig.tau);
  return ScenarioSetup{mu, a, sig, x0, CentralState(x0, mu), cov};
}

double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more paired points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double squared_correlation(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  // Spread at rounding level counts as constant.
  const double floor = 1e-14 * std::max(std::abs(my), 1e-300);
  if (sxx <= 0.0 || syy <= n * floor * floor) return 1.0;
  return sxy * sxy / (sxx * syy);
}

LinearityReport run_linearity(const Scenario& s) {
  if (s.units != UnitMode::Standardized) throw DomainError("the linearity study runs in standardized units");
  const ScenarioSetup setup = make_setup(s);
  const CentralState& c = setup.central;
  const AstJacobian J = ast_jacobian(c);
  const AstCoordinates central = eci_to_ast(c.state(), c);

  LinearityReport rep;
  rep.panels.reserve(36);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      LinearityPanel p;
      p.ast_index = i;
      p.eci_index = j;
      p.central_value = central[i];
      p.slope = J.j(i, j);
      rep.panels.push_back(p);
    }
  }

  for (int j = 0; j < 6; ++j) {
    const double scale = (j < 3) ? setup.sigmas.sigma : setup.sigmas.tau;
    for (int i = 0; i < 6; ++i) {
      LinearityPanel& p = rep.panels[i * 6 + j];
      p.flat = std::abs(p.slope) * scale <= 1e-12 * std::max(1.0, std::abs(p.central_value));
    }
    std::array<std::optional<AstCoordinates>, 7> values;
    for (int k = 0; k < 7; ++k) {
      Vector6 dev = Vector6::Zero();
      dev[j] = (-2.0 + 4.0 * k / 6.0) * scale;
      const StateVector x = deviated_state(c, dev);
      try {
        values[k] = eci_to_ast(x, c);
      } catch (const Error&) {
        values[k].reset();
      }
      for (int i = 0; i < 6; ++i) {
        LinearityPanel& p = rep.panels[i * 6 + j];
        p.deviations[k] = dev[j];
        p.values[k] = values[k] ? (*values[k])[i] : kNaN;
        if (!values[k]) p.evaluable = false;
      }
    }
  }

  for (LinearityPanel& p : rep.panels) {
    if (!p.evaluable) {
      p.r2 = kNaN;
      p.r2_tangent = kNaN;
      ++rep.unevaluable;
      continue;
    }
    const std::vector<double> x(p.deviations.begin(), p.deviations.end());
    const std::vector<double> y(p.values.begin(), p.values.end());
    p.r2 = squared_correlation(x, y);
    double mean = 0.0;
    for (double v : y) mean += v / 7.0;
    double ss_tot = 0.0;
    double ss_res = 0.0;
    for (int k = 0; k < 7; ++k) {
      ss_tot += (y[k] - mean) * (y[k] - mean);
      const double r = y[k] - (p.central_value + p.slope * x[k]);
      ss_res += r * r;
    }
    p.r2_tangent = (ss_tot <= 1e-300) ? 1.0 : 1.0 - ss_res / ss_tot;
    if (!p.flat && p.r2 < rep.min_r2) {
      rep.min_r2 = p.r2;
      rep.min_ast_index = p.ast_index;
      rep.min_eci_index = p.eci_index;
    }
  }
  return rep;
}

RejectedSampleError::RejectedSampleError(std::size_t count, std::size_t total)
    : Error(std::to_string(count) + " of " + std::to_string(total) +
            " cloud samples are unbound (e >= 1) or degenerate"),
      count_(count) {}

CloudStudy run_cloud_study(const Scenario& s, bool drop_unbound) {
  const ScenarioSetup setup = make_setup(s);
  const CentralState& c = setup.central;
  const double mu = setup.mu;
  const double dt = s.propagation_periods * c.features().period;

  const PointCloud initial =
      sample_cloud(setup.central_state.stacked(), setup.eci_covariance, s.n_points, s.seed, "eci");

  const StateVector central_t = propagate(c.state(), c.features(), dt);
  const double central_e3 = eci_to_equinoctial(central_t, RtnBasis::standard(), mu).values[2];

  std::vector<Vector6> eci;
  std::vector<Vector6> equi;
  std::vector<Vector6> ast;
  std::size_t rejected = 0;
  for (Eigen::Index k = 0; k < initial.n_points(); ++k) {
    const StateVector x0 = StateVector::from_stacked(initial.points.row(k).transpose(), c.epoch());
    try {
      const StateVector xt = propagate(x0, orbital_features(x0, mu), dt);
      Vector6 q = eci_to_equinoctial(xt, RtnBasis::standard(), mu).values;
      q[2] = nearest_branch(q[2], central_e3);
      const AstCoordinates a = eci_to_ast(xt, c);
      eci.push_back(xt.stacked());
      equi.push_back(q);
      ast.push_back(a.values);
    } catch (const Error&) {
      ++rejected;
    }
  }
  if (rejected > 0 && !drop_unbound)
    throw RejectedSampleError(rejected, static_cast<std::size_t>(initial.n_points()));

  auto to_cloud = [](const std::vector<Vector6>& rows, const char* tag) {
    PointCloud pc;
    pc.system = tag;
    pc.points.resize(static_cast<Eigen::Index>(rows.size()), 6);
    for (std::size_t r = 0; r < rows.size(); ++r) pc.points.row(static_cast<Eigen::Index>(r)) = rows[r].transpose();
    return pc;
  };

  CloudStudy out;
  out.eci = to_cloud(eci, "eci");
  out.equinoctial = to_cloud(equi, "equinoctial");
  out.ast = to_cloud(ast, "ast");
  out.rejected = rejected;
  out.propagation_time = dt;
  out.eci_normality = mardia_tests(out.eci);
  out.equinoctial_normality = mardia_tests(out.equinoctial);
  out.ast_normality = mardia_tests(out.ast);
  return out;
}

OneStepReport run_one_step(const Scenario& s, const std::vector<FilterKind>& kinds) {
  if (!s.one_step) throw DomainError("scenario has no 'update' block");
  const OneStepSpec& req = *s.one_step;
  const ScenarioSetup setup = make_setup(s);
  const CentralState& c = setup.central;
  const AstCoordinates central = eci_to_ast(c.state(), c);

  OneStepReport rep;
  GaussianState prior;
  if (req.prior_mode == PriorMode::Marginal) {
    prior.mean = central.values;
    prior.covariance = Matrix6::Zero();
    prior.covariance.diagonal().setConstant(req.prior_other_sd * req.prior_other_sd);
    prior.covariance(2, 2) = req.prior_a3_sd * req.prior_a3_sd;
    prior.time = 0.0;
  } else {
    const Matrix6 J = ast_jacobian(c).j;
    GaussianState g0{central.values, J * setup.eci_covariance * J.transpose(), 0.0};
    const double p33 = g0.covariance(2, 2);
    const double p36 = g0.covariance(2, 5);
    const double p66 = g0.covariance(5, 5);
    const double target = req.prior_a3_sd * req.prior_a3_sd;
    const double disc = p36 * p36 - p66 * (p33 - target);
    if (!(p66 > 0.0) || disc < 0.0) throw DomainError("requested a3 spread is unreachable by propagation");
    const double t1 = (-p36 + std::sqrt(disc)) / p66;
    prior = predict(g0, t1);
  }
  prior.mean[2] = req.prior_a3_mean;
  rep.prior = prior;
  rep.prior_time = prior.time;

  AnglesOnlyMeasurement m;
  m.longitude = wrap_pi(req.obs_longitude);
  m.latitude = req.obs_latitude;
  m.sigma_long = req.obs_sigma;
  m.sigma_lat = req.obs_sigma;
  m.time = prior.time;
  rep.measurement = m;

  const AnglesMeasurementModel model(m);
  rep.phi_obs = model.observation_center(prior).mean[2];

  for (FilterKind kind : kinds) {
    OneStepRow row;
    row.kind = kind;
    UpdateConfig cfg = s.filter;
    cfg.kind = kind;
    try {
      if (kind == FilterKind::PF) {
        const ParticleResult pf = update_pf(prior, model, cfg);
        row.mean_a3 = pf.mean[2];
        row.sd_a3 = std::sqrt(pf.covariance(2, 2));
        row.effective_sample_size = pf.effective_sample_size;
      } else {
        const UpdateResult res = update(prior, model, cfg);
        row.mean_a3 = res.state.mean[2];
        row.sd_a3 = std::sqrt(res.state.covariance(2, 2));
        row.iterations = res.iterations;
        row.converged = res.converged;
      }
    } catch (const Error& ex) {
      row.mean_a3 = kNaN;
      row.sd_a3 = kNaN;
      row.error = ex.what();
    }
    rep.rows.push_back(row);
  }
  return rep;
}

TrackingReport run_tracking(const Scenario& s, int n_obs, double cadence, const AngleSigmas& sigmas,
                            const UpdateConfig& cfg) {
  if (n_obs < 0) throw DomainError("number of observations must be non-negative");
  if (!(cadence > 0.0)) throw DomainError("observation cadence must be positive");
  const ScenarioSetup setup = make_setup(s);
  const CentralState& c = setup.central;
  const double mu = setup.mu;
  const Matrix3& R = c.rotation();

  TrackingReport rep;
  const Matrix6 J = ast_jacobian(c).j;
  rep.initial.mean = eci_to_ast(c.state(), c).values;
  rep.initial.covariance = enforce_spd(J * setup.eci_covariance * J.transpose());
  rep.initial.time = c.epoch();

  // Truth: one draw from the initial inertial distribution, redrawn until it is a usable orbit.
  std::mt19937_64 rng(s.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const Eigen::LLT<Matrix6> llt(setup.eci_covariance);
  const Matrix6 L = llt.matrixL();
  std::optional<StateVector> truth0;
  for (int draw = 0; draw < kMaxTruthDraws && !truth0; ++draw) {
    Vector6 xi;
    for (int k = 0; k < 6; ++k) xi[k] = normal(rng);
    const Vector6 dev = L * xi;
    const StateVector x{c.state().position + dev.head<3>(), c.state().velocity + dev.tail<3>(), c.epoch()};
    if (!is_bound(x, mu)) continue;
    try {
      eci_to_ast(x, c);
      truth0 = x;
    } catch (const Error&) {
    }
  }
  if (!truth0) throw DomainError("could not draw a bound truth state");
  const OrbitalFeatures truth_features = orbital_features(*truth0, mu);

  for (int k = 1; k <= n_obs; ++k) {
    const double t = cadence * k;
    const StateVector xt = propagate(*truth0, truth_features, t);
    rep.truth.push_back(eci_to_ast(xt, c));
    const AnglesOnlyMeasurement m_crtn =
        simulate_measurement(xt, c, sigmas, splitmix64(s.seed ^ static_cast<std::uint64_t>(k)));
    rep.measurements.push_back(rotate_measurement(m_crtn, R));
    rep.times.push_back(t);
  }

  rep.record = run_track(rep.initial, c, rep.measurements, cfg, rep.truth);

  const int first = s.tracking ? s.tracking->fit_first_step : 20;
  std::array<std::vector<double>, 6> lv;
  std::array<std::vector<double>, 6> ld;
  std::vector<double> lt;
  for (std::size_t k = 0; k < rep.record.steps.size(); ++k) {
    const TrackStep& st = rep.record.steps[k];
    const double t = rep.times[k];
    std::array<double, 6> sv{};
    std::array<double, 6> se{};
    for (int j = 0; j < 6; ++j) {
      const double var = st.posterior.covariance(j, j);
      const double d = st.abs_error[j];
      sv[j] = std::log(var * (j < 5 ? t : t * t));
      se[j] = std::log(d * (j < 5 ? std::sqrt(t) : t));
    }
    rep.log_scaled_variance.push_back(sv);
    rep.log_scaled_error.push_back(se);
    if (static_cast<int>(k) + 1 >= first) {
      lt.push_back(std::log(t));
      for (int j = 0; j < 6; ++j) {
        lv[j].push_back(std::log(st.posterior.covariance(j, j)));
        ld[j].push_back(std::log(st.abs_error[j]));
      }
    }
  }
  for (int j = 0; j < 6; ++j) {
    rep.slopes.variance[j] = lt.size() >= 2 ? ols_slope(lt, lv[j]) : kNaN;
    rep.slopes.abs_error[j] = lt.size() >= 2 ? ols_slope(lt, ld[j]) : kNaN;
  }
  return rep;
}

TrackingReport run_tracking(const Scenario& s) {
  if (!s.tracking) throw DomainError("scenario has no 'tracking' block");
  const TrackingSpec& t = *s.tracking;
  return run_tracking(s, t.n_obs, t.cadence, {t.sigma_long, t.sigma_lat}, s.filter);
}

Scenario example1() {
  Scenario s;
  s.name = "example1";
  s.e = 0.7;
  s.true_anomaly0 = deg2rad(45.0);
  s.inclination = 0.0;
  s.p_sigma = 2.5;
  s.p_tau = 20.0;
  s.units = UnitMode::Standardized;
  s.mu = 1.0;
  s.seed = 1;
  return s;
}

Scenario example2() {
  Scenario s = example1();
  s.name = "example2";
  s.inclination = deg2rad(158.0);
  s.n_points = 2000;
  s.propagation_periods = 0.5;
  s.units = UnitMode::Physical;
  s.mu = kEarthMu;
  s.period = 12.0 * 3600.0;
  s.seed = 2;
  return s;
}

Scenario example3() {
  Scenario s = example1();
  s.name = "example3";
  s.true_anomaly0 = 0.0;
  s.seed = 3;
  OneStepSpec u;
  u.prior_a3_mean = deg2rad(260.0);
  u.prior_a3_sd = deg2rad(25.0);
  u.prior_other_sd = 1e-8;
  u.obs_longitude = deg2rad(225.5);
  u.obs_latitude = 0.0;
  u.obs_sigma = deg2rad(5.5e-4);
  s.one_step = u;
  s.filter.pf_particles = 1000000;
  s.filter.rng_seed = 3;
  return s;
}

Scenario example4() {
  Scenario s = example2();
  s.name = "example4";
  s.seed = 4;
  TrackingSpec t;
  t.n_obs = 200;
  t.cadence = 3600.0;
  t.sigma_long = deg2rad(0.1);
  t.sigma_lat = deg2rad(0.1);
  t.fit_first_step = 20;
  s.tracking = t;
  s.filter.kind = FilterKind::IUKF;
  return s;
}

}  // namespace astrack
