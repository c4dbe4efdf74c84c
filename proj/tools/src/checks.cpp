#include "astrack_cli/checks.hpp"

#include <cmath>
#include <cstdio>

namespace astrack::cli {

namespace {

std::string fmt(const char* format, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c);
  return buf;
}

CheckItem item(std::string name, bool passed, std::string detail) {
  return {std::move(name), passed, std::move(detail)};
}

/// Angle difference in degrees on the branch nearest the target.
double angle_gap_deg(double value_rad, double target_deg) {
  return rad2deg(wrap_pi(value_rad - deg2rad(target_deg)));
}

}  // namespace

bool all_passed(const std::vector<CheckItem>& items) {
  for (const CheckItem& i : items)
    if (!i.passed) return false;
  return true;
}

std::vector<CheckItem> check_linearity(const LinearityReport& r) {
  std::vector<CheckItem> out;
  out.push_back(item("all 36 panels evaluable", r.unevaluable == 0,
                     fmt("%.0f panels have an unbound deviated orbit", r.unevaluable)));
  out.push_back(item("minimum R^2 = 0.977 +- 0.005", std::abs(r.min_r2 - 0.977) <= 0.005,
                     fmt("min R^2 = %.6f at (A%.0f, eci %.0f)", r.min_r2, r.min_ast_index + 1.0,
                         r.min_eci_index + 1.0)));
  bool above = true;
  int flat_below = 0;
  for (const LinearityPanel& p : r.panels) {
    if (!p.evaluable || !(p.r2 < r.min_r2)) continue;
    if (p.flat)
      ++flat_below;
    else
      above = false;
  }
  out.push_back(item("no first-order panel below the minimum", above,
                     fmt("%.0f panels with a zero Jacobian entry vary only at second order and are not ranked",
                         flat_below)));
  return out;
}

std::vector<CheckItem> check_cloud(const CloudStudy& c) {
  std::vector<CheckItem> out;
  out.push_back(item("no rejected samples", c.rejected == 0, fmt("%.0f rejected", static_cast<double>(c.rejected))));
  const auto small = [&](const char* name, const NormalityResult& n) {
    out.push_back(item(std::string(name) + " p-values < 1e-10", n.p_skewness < 1e-10 && n.p_kurtosis < 1e-10,
                       fmt("p_skew = %.3g, p_kurt = %.3g", n.p_skewness, n.p_kurtosis)));
  };
  small("ECI", c.eci_normality);
  small("equinoctial", c.equinoctial_normality);
  const NormalityResult& a = c.ast_normality;
  out.push_back(item("AST p-values > 0.05", a.p_skewness > 0.05 && a.p_kurtosis > 0.05,
                     fmt("p_skew = %.3g, p_kurt = %.3g", a.p_skewness, a.p_kurtosis)));
  return out;
}

std::vector<CheckItem> check_one_step(const OneStepReport& r) {
  std::vector<CheckItem> out;
  for (const OneStepRow& row : r.rows) {
    const std::string name(to_string(row.kind));
    if (!row.error.empty()) {
      out.push_back(item(name + " ran", false, row.error));
      continue;
    }
    const double sd = rad2deg(row.sd_a3);
    const double mean = rad2deg(row.mean_a3);
    switch (row.kind) {
      case FilterKind::IUKF:
      case FilterKind::IEKF:
      case FilterKind::OCEKF:
      case FilterKind::OCUKF:
        out.push_back(item(name + " mean 310 +- 0.1 deg", std::abs(angle_gap_deg(row.mean_a3, 310.0)) <= 0.1,
                           fmt("mean = %.6f deg", mean)));
        out.push_back(item(name + " sd in [2.5e-2, 4.0e-2] deg", sd >= 2.5e-2 && sd <= 4.0e-2,
                           fmt("sd = %.4g deg", sd)));
        break;
      case FilterKind::EKF:
      case FilterKind::UKF: {
        const double target = row.kind == FilterKind::EKF ? 329.8 : 327.1;
        out.push_back(item(name + fmt(" mean %.1f +- 1.5 deg", target),
                           std::abs(angle_gap_deg(row.mean_a3, target)) <= 1.5, fmt("mean = %.6f deg", mean)));
        out.push_back(item(name + " sd < 1e-3 deg", sd < 1e-3, fmt("sd = %.4g deg", sd)));
        break;
      }
      case FilterKind::PF:
        out.push_back(item(name + " mean 310 +- 0.01 deg", std::abs(angle_gap_deg(row.mean_a3, 310.0)) <= 0.01,
                           fmt("mean = %.6f deg, ESS = %.1f", mean, row.effective_sample_size)));
        out.push_back(item(name + " sd 3.2e-2 deg +- 10%", std::abs(sd - 3.2e-2) <= 3.2e-3, fmt("sd = %.4g deg", sd)));
        break;
    }
  }
  return out;
}

std::vector<CheckItem> check_tracking(const TrackingReport& r) {
  std::vector<CheckItem> out;
  for (int j = 0; j < 6; ++j) {
    const double var_target = j < 5 ? -1.0 : -2.0;
    const double err_target = j < 5 ? -0.5 : -1.0;
    const double sv = r.slopes.variance[j];
    const double se = r.slopes.abs_error[j];
    out.push_back(item(fmt("A%.0f variance slope %.1f +- 0.3", j + 1.0, var_target),
                       std::abs(sv - var_target) <= 0.3, fmt("slope = %.4f", sv)));
    out.push_back(item(fmt("A%.0f abs-error slope %.1f +- 0.3", j + 1.0, err_target),
                       std::abs(se - err_target) <= 0.3, fmt("slope = %.4f", se)));
  }
  return out;
}

std::vector<CheckItem> check_propagation(const ScenarioSetup& setup, double t) {
  const CentralState& c = setup.central;
  const StateVector xt = propagate(c.state(), c.features(), t);
  const OrbitalFeatures ft = orbital_features(xt, setup.mu);
  const OrbitalFeatures& f0 = c.features();
  std::vector<CheckItem> out;
  const double dh = (ft.h_vec - f0.h_vec).norm() / f0.h;
  const double de = (ft.e_vec - f0.e_vec).norm();
  out.push_back(item("angular momentum conserved", dh < 1e-10, fmt("relative change %.3g", dh)));
  out.push_back(item("eccentricity vector conserved", de < 1e-10, fmt("change %.3g", de)));
  const AstCoordinates exact = eci_to_ast(xt, c);
  const AstCoordinates linear = propagate_ast(eci_to_ast(c.state(), c), t);
  const double gap = (exact.values - linear.values).cwiseAbs().maxCoeff();
  out.push_back(item("AST propagation is linear", gap < 1e-9, fmt("max gap %.3g", gap)));
  return out;
}

}  // namespace astrack::cli
