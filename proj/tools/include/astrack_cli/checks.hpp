#pragma once

#include <string>
#include <vector>

#include "astrack/harness.hpp"

namespace astrack::cli {

struct CheckItem {
  std::string name;
  bool passed = false;
  std::string detail;
};

bool all_passed(const std::vector<CheckItem>& items);

/// Minimum R^2 of 0.977 +- 0.005, every panel evaluable and none below the minimum.
std::vector<CheckItem> check_linearity(const LinearityReport& r);

/// ECI and equinoctial p-values below 1e-10, AST p-values above 0.05, no rejected samples.
std::vector<CheckItem> check_cloud(const CloudStudy& c);

/// Per-filter posterior mean and spread bands for the one-step update.
std::vector<CheckItem> check_one_step(const OneStepReport& r);

/// Log-log decay slopes of the posterior variances and absolute errors.
std::vector<CheckItem> check_tracking(const TrackingReport& r);

/// Conservation and exact-linearity checks on a propagated state.
std::vector<CheckItem> check_propagation(const ScenarioSetup& setup, double t);

}  // namespace astrack::cli
