#pragma once

#include <stdexcept>
#include <string>

#include "astrack/harness.hpp"

namespace astrack::cli {

/// Malformed scenario file. The message carries the file, line and field where known.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses scenario JSON text. `source` only labels diagnostics.
Scenario parse_scenario(const std::string& text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

/// Inverse of parse_scenario, used for the bundled example files.
std::string scenario_to_json(const Scenario& s);

}  // namespace astrack::cli
