#include "astrack_cli/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace astrack::cli {

namespace {

using nlohmann::json;

/// Line of the last key in a dotted path, found by scanning for each key in turn. 0 if absent.
int line_of(const std::string& text, const std::string& dotted) {
  std::size_t pos = 0;
  std::stringstream ss(dotted);
  std::string key;
  while (std::getline(ss, key, '.')) {
    const std::size_t found = text.find('"' + key + '"', pos);
    if (found == std::string::npos) return 0;
    pos = found + key.size() + 2;
  }
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Reader {
 public:
  Reader(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::ostringstream msg;
    msg << source_;
    if (const int line = line_of(text_, field); line > 0) msg << ':' << line;
    msg << ": field '" << field << "': " << what;
    throw ScenarioError(msg.str());
  }

  void reject_unknown(const json& obj, const std::string& prefix, const std::set<std::string>& allowed) const {
    for (const auto& item : obj.items()) {
      if (allowed.count(item.key()) == 0) fail(prefix + item.key(), "unknown field");
    }
  }

  const json& object(const json& parent, const std::string& prefix, const std::string& key) const {
    const json& v = parent.at(key);
    if (!v.is_object()) fail(prefix + key, "expected an object");
    return v;
  }

  double number(const json& obj, const std::string& prefix, const std::string& key) const {
    if (!obj.contains(key)) fail(prefix + key, "missing required field");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(prefix + key, "expected a number");
    return v.get<double>();
  }

  double number_or(const json& obj, const std::string& prefix, const std::string& key, double fallback) const {
    return obj.contains(key) ? number(obj, prefix, key) : fallback;
  }

  std::uint64_t unsigned_int(const json& obj, const std::string& prefix, const std::string& key) const {
    if (!obj.contains(key)) fail(prefix + key, "missing required field");
    const json& v = obj.at(key);
    if (!v.is_number_unsigned()) fail(prefix + key, "expected a non-negative integer");
    return v.get<std::uint64_t>();
  }

  std::uint64_t unsigned_or(const json& obj, const std::string& prefix, const std::string& key,
                            std::uint64_t fallback) const {
    return obj.contains(key) ? unsigned_int(obj, prefix, key) : fallback;
  }

  int integer_or(const json& obj, const std::string& prefix, const std::string& key, int fallback) const {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(prefix + key, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) fail(prefix + key, "out of range");
    return static_cast<int>(x);
  }

  int integer(const json& obj, const std::string& prefix, const std::string& key) const {
    if (!obj.contains(key)) fail(prefix + key, "missing required field");
    return integer_or(obj, prefix, key, 0);
  }

  std::string string(const json& obj, const std::string& prefix, const std::string& key) const {
    if (!obj.contains(key)) fail(prefix + key, "missing required field");
    const json& v = obj.at(key);
    if (!v.is_string()) fail(prefix + key, "expected a string");
    return v.get<std::string>();
  }

  const std::string& text() const { return text_; }
  const std::string& source() const { return source_; }

 private:
  const std::string& text_;
  std::string source_;
};

/// Pulls the quoted field path out of a validation message, e.g. "field 'e': ...".
std::string field_in(const std::string& message) {
  const std::size_t a = message.find("field '");
  if (a == std::string::npos) return {};
  const std::size_t b = message.find('\'', a + 7);
  return b == std::string::npos ? std::string{} : message.substr(a + 7, b - a - 7);
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& ex) {
    const std::size_t byte = std::min<std::size_t>(ex.byte, text.size());
    const auto upto = text.begin() + static_cast<std::ptrdiff_t>(byte > 0 ? byte - 1 : 0);
    const int line = 1 + static_cast<int>(std::count(text.begin(), upto, '\n'));
    const std::size_t nl = text.rfind('\n', byte > 0 ? byte - 1 : 0);
    const std::size_t col = (nl == std::string::npos || byte == 0) ? byte : byte - 1 - nl;
    std::ostringstream msg;
    msg << source << ':' << line << ':' << col << ": invalid JSON (" << ex.what() << ')';
    throw ScenarioError(msg.str());
  }
  const Reader r(text, source);
  if (!root.is_object()) throw ScenarioError(source + ":1: scenario must be a JSON object");

  r.reject_unknown(root, "",
                   {"name", "units", "mu", "period_hours", "e", "true_anomaly0_deg", "inclination_deg", "p_sigma",
                    "p_tau", "n_points", "propagation_periods", "seed", "update", "tracking", "filter"});

  Scenario s;
  s.name = root.contains("name") ? r.string(root, "", "name") : std::string("scenario");
  const std::string units = r.string(root, "", "units");
  if (units == "standardized") {
    s.units = UnitMode::Standardized;
    s.mu = 1.0;
    if (root.contains("mu") || root.contains("period_hours"))
      r.fail(root.contains("mu") ? "mu" : "period_hours", "only allowed with physical units");
  } else if (units == "physical") {
    s.units = UnitMode::Physical;
    s.mu = r.number_or(root, "", "mu", kEarthMu);
    s.period = r.number(root, "", "period_hours") * 3600.0;
  } else {
    r.fail("units", "expected \"standardized\" or \"physical\"");
  }
  s.e = r.number(root, "", "e");
  s.true_anomaly0 = deg2rad(r.number(root, "", "true_anomaly0_deg"));
  s.inclination = deg2rad(r.number_or(root, "", "inclination_deg", 0.0));
  s.p_sigma = r.number(root, "", "p_sigma");
  s.p_tau = r.number(root, "", "p_tau");
  s.n_points = r.integer_or(root, "", "n_points", s.n_points);
  s.propagation_periods = r.number_or(root, "", "propagation_periods", 0.0);
  s.seed = r.unsigned_int(root, "", "seed");

  if (root.contains("update")) {
    const json& u = r.object(root, "", "update");
    const std::string p = "update.";
    r.reject_unknown(u, p,
                     {"prior_a3_mean_deg", "prior_a3_sd_deg", "prior_other_sd", "prior_mode", "obs_longitude_deg",
                      "obs_latitude_deg", "obs_sigma_deg"});
    OneStepSpec o;
    o.prior_a3_mean = deg2rad(r.number(u, p, "prior_a3_mean_deg"));
    o.prior_a3_sd = deg2rad(r.number(u, p, "prior_a3_sd_deg"));
    o.prior_other_sd = r.number_or(u, p, "prior_other_sd", o.prior_other_sd);
    if (u.contains("prior_mode")) {
      const std::string mode = r.string(u, p, "prior_mode");
      if (mode == "marginal")
        o.prior_mode = PriorMode::Marginal;
      else if (mode == "propagated")
        o.prior_mode = PriorMode::Propagated;
      else
        r.fail(p + "prior_mode", "expected \"marginal\" or \"propagated\"");
    }
    o.obs_longitude = deg2rad(r.number(u, p, "obs_longitude_deg"));
    o.obs_latitude = deg2rad(r.number_or(u, p, "obs_latitude_deg", 0.0));
    o.obs_sigma = deg2rad(r.number(u, p, "obs_sigma_deg"));
    s.one_step = o;
  }

  if (root.contains("tracking")) {
    const json& t = r.object(root, "", "tracking");
    const std::string p = "tracking.";
    r.reject_unknown(t, p, {"n_obs", "cadence", "sigma_long_deg", "sigma_lat_deg", "fit_first_step"});
    TrackingSpec ts;
    ts.n_obs = r.integer(t, p, "n_obs");
    ts.cadence = r.number(t, p, "cadence");
    ts.sigma_long = deg2rad(r.number(t, p, "sigma_long_deg"));
    ts.sigma_lat = deg2rad(r.number(t, p, "sigma_lat_deg"));
    ts.fit_first_step = r.integer_or(t, p, "fit_first_step", ts.fit_first_step);
    s.tracking = ts;
  }

  if (root.contains("filter")) {
    const json& f = r.object(root, "", "filter");
    const std::string p = "filter.";
    r.reject_unknown(f, p,
                     {"kind", "ukf_alpha", "ukf_beta", "ukf_kappa", "max_iterations", "convergence_tol",
                      "pf_particles", "rng_seed"});
    UpdateConfig& c = s.filter;
    if (f.contains("kind")) {
      try {
        c.kind = parse_filter_kind(r.string(f, p, "kind"));
      } catch (const DomainError& ex) {
        r.fail(p + "kind", ex.what());
      }
    }
    c.ukf_alpha = r.number_or(f, p, "ukf_alpha", c.ukf_alpha);
    c.ukf_beta = r.number_or(f, p, "ukf_beta", c.ukf_beta);
    c.ukf_kappa = r.number_or(f, p, "ukf_kappa", c.ukf_kappa);
    c.max_iterations = r.integer_or(f, p, "max_iterations", c.max_iterations);
    c.convergence_tol = r.number_or(f, p, "convergence_tol", c.convergence_tol);
    c.pf_particles = r.unsigned_or(f, p, "pf_particles", c.pf_particles);
    c.rng_seed = r.unsigned_or(f, p, "rng_seed", c.rng_seed);
  }

  try {
    s.validate();
  } catch (const DomainError& ex) {
    const std::string field = field_in(ex.what());
    if (field.empty()) throw ScenarioError(source + ": " + ex.what());
    const std::string msg = ex.what();
    r.fail(field, msg.substr(msg.find("': ") + 3));
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string scenario_to_json(const Scenario& s) {
  json j = json::object();
  j["name"] = s.name;
  j["units"] = s.units == UnitMode::Standardized ? "standardized" : "physical";
  if (s.units == UnitMode::Physical) {
    j["mu"] = s.mu;
    j["period_hours"] = s.period / 3600.0;
  }
  j["e"] = s.e;
  j["true_anomaly0_deg"] = rad2deg(s.true_anomaly0);
  j["inclination_deg"] = rad2deg(s.inclination);
  j["p_sigma"] = s.p_sigma;
  j["p_tau"] = s.p_tau;
  j["n_points"] = s.n_points;
  j["propagation_periods"] = s.propagation_periods;
  j["seed"] = s.seed;
  if (s.one_step) {
    const OneStepSpec& o = *s.one_step;
    j["update"] = {{"prior_a3_mean_deg", rad2deg(o.prior_a3_mean)},
                   {"prior_a3_sd_deg", rad2deg(o.prior_a3_sd)},
                   {"prior_other_sd", o.prior_other_sd},
                   {"prior_mode", o.prior_mode == PriorMode::Marginal ? "marginal" : "propagated"},
                   {"obs_longitude_deg", rad2deg(o.obs_longitude)},
                   {"obs_latitude_deg", rad2deg(o.obs_latitude)},
                   {"obs_sigma_deg", rad2deg(o.obs_sigma)}};
  }
  if (s.tracking) {
    const TrackingSpec& t = *s.tracking;
    j["tracking"] = {{"n_obs", t.n_obs},
                     {"cadence", t.cadence},
                     {"sigma_long_deg", rad2deg(t.sigma_long)},
                     {"sigma_lat_deg", rad2deg(t.sigma_lat)},
                     {"fit_first_step", t.fit_first_step}};
  }
  const UpdateConfig& c = s.filter;
  j["filter"] = {{"kind", std::string(to_string(c.kind))},
                 {"ukf_alpha", c.ukf_alpha},
                 {"ukf_beta", c.ukf_beta},
                 {"ukf_kappa", c.ukf_kappa},
                 {"max_iterations", c.max_iterations},
                 {"convergence_tol", c.convergence_tol},
                 {"pf_particles", c.pf_particles},
                 {"rng_seed", c.rng_seed}};
  return j.dump(2) + "\n";
}

}  // namespace astrack::cli
