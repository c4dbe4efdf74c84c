#include "astrack_cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "astrack_cli/checks.hpp"
#include "astrack_cli/scenario_io.hpp"

#ifndef ASTRACK_VERSION
#define ASTRACK_VERSION "0.0.0"
#endif

namespace astrack::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out = "astrack-out";
  std::optional<std::string> filter;
  bool check = false;
  std::optional<std::size_t> particles;
  std::optional<double> time;
  bool drop_unbound = false;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON has no NaN; those become null.
json jnum(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) buf_ << (i ? "," : "") << header[i];
    buf_ << '\n';
  }
  Csv& cell(const std::string& s) {
    buf_ << (first_ ? "" : ",") << s;
    first_ = false;
    return *this;
  }
  Csv& cell(double x) { return cell(num(x)); }
  Csv& cell(long long x) { return cell(std::to_string(x)); }
  void end() {
    buf_ << '\n';
    first_ = true;
  }
  std::string str() const { return buf_.str(); }

 private:
  std::ostringstream buf_;
  bool first_ = true;
};

std::vector<std::string> numbered(const std::string& stem, int n) {
  std::vector<std::string> v;
  for (int k = 1; k <= n; ++k) v.push_back(stem + std::to_string(k));
  return v;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

json check_json(const std::vector<CheckItem>& items) {
  json arr = json::array();
  for (const CheckItem& i : items) arr.push_back({{"name", i.name}, {"passed", i.passed}, {"detail", i.detail}});
  return {{"passed", all_passed(items)}, {"items", arr}};
}

json normality_json(const NormalityResult& n) {
  return {{"b1", jnum(n.b1)},
          {"b2", jnum(n.b2)},
          {"skewness_stat", jnum(n.skewness_stat)},
          {"kurtosis_stat", jnum(n.kurtosis_stat)},
          {"p_skewness", jnum(n.p_skewness)},
          {"p_kurtosis", jnum(n.p_kurtosis)}};
}

/// Files produced by one command, keyed by name inside the output directory.
struct Outputs {
  std::vector<std::pair<std::string, std::string>> files;
  std::vector<CheckItem> checks;
};

Outputs cmd_propagate(const Scenario& s, const Options& o) {
  const ScenarioSetup setup = make_setup(s);
  const CentralState& c = setup.central;
  const double t = o.time.value_or(s.propagation_periods * c.features().period);
  const StateVector x0 = c.state();
  const StateVector xt = propagate(x0, c.features(), t);

  Csv csv(concat({"representation", "time"}, numbered("c", 6)));
  const auto row = [&](const std::string& name, double time, const Vector6& v) {
    csv.cell(name).cell(time);
    for (int k = 0; k < 6; ++k) csv.cell(v[k]);
    csv.end();
  };
  row("eci_initial", 0.0, x0.stacked());
  row("eci", t, xt.stacked());
  row("crtn", t, c.to_crtn(xt).stacked());
  const KeplerianElements k = eci_to_keplerian(xt, RtnBasis::standard(), setup.mu);
  Vector6 kv;
  kv << k.i, k.raan, k.e, k.argp, k.a, k.true_anomaly;
  row("keplerian", t, kv);
  row("equinoctial", t, eci_to_equinoctial(xt, RtnBasis::standard(), setup.mu).values);
  row("ast_initial", 0.0, eci_to_ast(x0, c).values);
  row("ast", t, eci_to_ast(xt, c).values);

  const OrbitalFeatures& f = c.features();
  json summary = {{"command", "propagate"},
                  {"scenario", s.name},
                  {"time", jnum(t)},
                  {"mu", jnum(setup.mu)},
                  {"semi_major_axis", jnum(f.a)},
                  {"eccentricity", jnum(f.e)},
                  {"mean_motion", jnum(f.n)},
                  {"period", jnum(f.period)},
                  {"sigma_position", jnum(setup.sigmas.sigma)},
                  {"tau_velocity", jnum(setup.sigmas.tau)}};
  Outputs out;
  out.checks = check_propagation(setup, t);
  summary["check"] = check_json(out.checks);
  out.files = {{"propagate.csv", csv.str()}, {"summary.json", summary.dump(2) + "\n"}};
  return out;
}

Outputs cmd_linearity(const Scenario& s, const Options&) {
  const LinearityReport r = run_linearity(s);
  Csv csv(concat(concat({"ast_index", "eci_index", "slope", "central_value", "r2", "r2_tangent", "evaluable", "flat"},
                        numbered("deviation_", 7)),
                 numbered("value_", 7)));
  json table = json::array();
  for (int i = 0; i < 6; ++i) table.push_back(json::array());
  for (const LinearityPanel& p : r.panels) {
    csv.cell(static_cast<long long>(p.ast_index + 1)).cell(static_cast<long long>(p.eci_index + 1));
    csv.cell(p.slope).cell(p.central_value).cell(p.r2).cell(p.r2_tangent);
    csv.cell(static_cast<long long>(p.evaluable)).cell(static_cast<long long>(p.flat));
    for (double d : p.deviations) csv.cell(d);
    for (double v : p.values) csv.cell(v);
    csv.end();
    table[static_cast<std::size_t>(p.ast_index)].push_back(jnum(p.r2));
  }
  Outputs out;
  out.checks = check_linearity(r);
  json summary = {{"command", "linearity"},
                  {"scenario", s.name},
                  {"r2_table", table},
                  {"min_r2", jnum(r.min_r2)},
                  {"min_panel", {r.min_ast_index + 1, r.min_eci_index + 1}},
                  {"unevaluable_panels", r.unevaluable},
                  {"check", check_json(out.checks)}};
  out.files = {{"linearity.csv", csv.str()}, {"summary.json", summary.dump(2) + "\n"}};
  return out;
}

Outputs cmd_cloud(const Scenario& s, const Options& o) {
  const CloudStudy c = run_cloud_study(s, o.drop_unbound);
  Csv csv(concat(concat(concat({"index"}, numbered("eci_", 6)), numbered("equinoctial_", 6)), numbered("ast_", 6)));
  for (Eigen::Index i = 0; i < c.eci.n_points(); ++i) {
    csv.cell(static_cast<long long>(i));
    for (const PointCloud* pc : {&c.eci, &c.equinoctial, &c.ast})
      for (int k = 0; k < 6; ++k) csv.cell(pc->points(i, k));
    csv.end();
  }
  Outputs out;
  out.checks = check_cloud(c);
  json summary = {{"command", "cloud"},
                  {"scenario", s.name},
                  {"n_points", s.n_points},
                  {"kept", c.eci.n_points()},
                  {"rejected", c.rejected},
                  {"propagation_time", jnum(c.propagation_time)},
                  {"eci", normality_json(c.eci_normality)},
                  {"equinoctial", normality_json(c.equinoctial_normality)},
                  {"ast", normality_json(c.ast_normality)},
                  {"check", check_json(out.checks)}};
  out.files = {{"cloud.csv", csv.str()}, {"summary.json", summary.dump(2) + "\n"}};
  return out;
}

Outputs cmd_update(const Scenario& s, const Options& o) {
  std::vector<FilterKind> kinds = all_filter_kinds();
  if (o.filter) kinds = {parse_filter_kind(*o.filter)};
  const OneStepReport r = run_one_step(s, kinds);
  Csv csv({"filter", "mean_a3_deg", "sd_a3_deg", "iterations", "converged", "effective_sample_size", "error"});
  json rows = json::array();
  for (const OneStepRow& row : r.rows) {
    const std::string name(to_string(row.kind));
    csv.cell(name).cell(rad2deg(row.mean_a3)).cell(rad2deg(row.sd_a3));
    csv.cell(static_cast<long long>(row.iterations)).cell(static_cast<long long>(row.converged));
    csv.cell(row.effective_sample_size).cell('"' + row.error + '"');
    csv.end();
    rows.push_back({{"filter", name},
                    {"mean_a3_deg", jnum(rad2deg(row.mean_a3))},
                    {"sd_a3_deg", jnum(rad2deg(row.sd_a3))},
                    {"iterations", row.iterations},
                    {"converged", row.converged},
                    {"effective_sample_size", jnum(row.effective_sample_size)},
                    {"error", row.error}});
  }
  Outputs out;
  out.checks = check_one_step(r);
  json summary = {{"command", "update"},
                  {"scenario", s.name},
                  {"prior_mean_a3_deg", jnum(rad2deg(r.prior.mean[2]))},
                  {"prior_sd_a3_deg", jnum(rad2deg(std::sqrt(r.prior.covariance(2, 2))))},
                  {"prior_time", jnum(r.prior_time)},
                  {"phi_obs_deg", jnum(rad2deg(r.phi_obs))},
                  {"pf_particles", s.filter.pf_particles},
                  {"filters", rows},
                  {"check", check_json(out.checks)}};
  out.files = {{"update.csv", csv.str()}, {"summary.json", summary.dump(2) + "\n"}};
  return out;
}

Outputs cmd_track(const Scenario& s, const Options&) {
  const TrackingReport r = run_tracking(s);
  std::vector<std::string> header{"step", "time", "obs_longitude", "obs_latitude", "residual_longitude",
                                  "residual_latitude", "iterations", "converged"};
  header = concat(header, numbered("mean_", 6));
  header = concat(header, numbered("var_", 6));
  header = concat(header, numbered("truth_", 6));
  header = concat(header, numbered("abs_error_", 6));
  header = concat(header, numbered("log_scaled_var_", 6));
  header = concat(header, numbered("log_scaled_error_", 6));
  Csv csv(header);
  for (std::size_t k = 0; k < r.record.steps.size(); ++k) {
    const TrackStep& st = r.record.steps[k];
    csv.cell(static_cast<long long>(k + 1)).cell(r.times[k]);
    csv.cell(r.measurements[k].longitude).cell(r.measurements[k].latitude);
    csv.cell(st.residual[0]).cell(st.residual[1]);
    csv.cell(static_cast<long long>(st.iterations)).cell(static_cast<long long>(st.converged));
    for (int j = 0; j < 6; ++j) csv.cell(st.posterior.mean[j]);
    for (int j = 0; j < 6; ++j) csv.cell(st.posterior.covariance(j, j));
    for (int j = 0; j < 6; ++j) csv.cell(r.truth[k][j]);
    for (int j = 0; j < 6; ++j) csv.cell(st.abs_error[j]);
    for (int j = 0; j < 6; ++j) csv.cell(r.log_scaled_variance[k][static_cast<std::size_t>(j)]);
    for (int j = 0; j < 6; ++j) csv.cell(r.log_scaled_error[k][static_cast<std::size_t>(j)]);
    csv.end();
  }
  json var = json::array();
  json err = json::array();
  for (int j = 0; j < 6; ++j) {
    var.push_back(jnum(r.slopes.variance[static_cast<std::size_t>(j)]));
    err.push_back(jnum(r.slopes.abs_error[static_cast<std::size_t>(j)]));
  }
  Outputs out;
  out.checks = check_tracking(r);
  json summary = {{"command", "track"},
                  {"scenario", s.name},
                  {"filter", std::string(to_string(s.filter.kind))},
                  {"steps", r.record.steps.size()},
                  {"fit_first_step", s.tracking->fit_first_step},
                  {"initial_covariance", "scenario inertial covariance mapped through the AST Jacobian"},
                  {"variance_slopes", var},
                  {"abs_error_slopes", err},
                  {"check", check_json(out.checks)}};
  out.files = {{"track.csv", csv.str()}, {"summary.json", summary.dump(2) + "\n"}};
  return out;
}

void write_manifest(const fs::path& dir, const std::string& command, const Options& o, std::uint64_t seed,
                    const std::vector<std::string>& files, const std::string& status, const std::string& error,
                    double seconds) {
  json m = {{"command", command},
            {"scenario", o.scenario},
            {"seed", seed},
            {"tool_version", ASTRACK_VERSION},
            {"outputs", files},
            {"status", status},
            {"duration_seconds", seconds}};
  if (!error.empty()) m["error"] = error;
  write_atomic(dir / "manifest.json", m.dump(2) + "\n");
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
  sub->add_option("--seed", o.seed, "Override the scenario seed (also seeds the particle filter)");
  sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  sub->add_flag("--check", o.check, "Exit with code 3 when a result misses its acceptance threshold");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Orbital uncertainty in AST coordinates: propagation, linearity, normality, filtering.", "astrack"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", ASTRACK_VERSION);
  Options o;

  CLI::App* propagate_cmd = app.add_subcommand("propagate", "Propagate the central state and print every coordinate form");
  add_common(propagate_cmd, o);
  propagate_cmd->add_option("--time", o.time, "Propagation time (seconds in physical units); default from the scenario");

  CLI::App* linearity_cmd = app.add_subcommand("linearity", "36-panel linearity study of the ECI to AST map");
  add_common(linearity_cmd, o);

  CLI::App* cloud_cmd = app.add_subcommand("cloud", "Propagated point cloud and Mardia normality tests");
  add_common(cloud_cmd, o);
  cloud_cmd->add_flag("--drop-unbound", o.drop_unbound, "Drop unbound samples instead of failing");

  CLI::App* update_cmd = app.add_subcommand("update", "One-step angles-only update with every filter");
  add_common(update_cmd, o);
  update_cmd->add_option("--filter", o.filter, "Run a single filter kind (ekf, ukf, iekf, iukf, ocekf, ocukf, pf)");
  update_cmd->add_option("--particles", o.particles, "Particle count for pf");

  CLI::App* track_cmd = app.add_subcommand("track", "Sequential angles-only tracking");
  add_common(track_cmd, o);
  track_cmd->add_option("--filter", o.filter, "Filter kind used for every update");
  track_cmd->add_option("--particles", o.particles, "Particle count when --filter pf");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << ASTRACK_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();

  Scenario s;
  try {
    s = load_scenario(o.scenario);
    if (o.seed) {
      s.seed = *o.seed;
      s.filter.rng_seed = *o.seed;
    }
    if (o.particles) s.filter.pf_particles = *o.particles;
    if (o.filter) {
      const FilterKind kind = parse_filter_kind(*o.filter);
      if (command == "track") s.filter.kind = kind;
    }
    if (command == "update" && !s.one_step) throw ScenarioError(o.scenario + ": field 'update': missing required field");
    if (command == "track" && !s.tracking) throw ScenarioError(o.scenario + ": field 'tracking': missing required field");
    s.validate();
  } catch (const ScenarioError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitUsage;
  }

  const auto start = std::chrono::steady_clock::now();
  const fs::path dir(o.out);
  try {
    fs::create_directories(dir);
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  Outputs result;
  try {
    if (command == "propagate")
      result = cmd_propagate(s, o);
    else if (command == "linearity")
      result = cmd_linearity(s, o);
    else if (command == "cloud")
      result = cmd_cloud(s, o);
    else if (command == "update")
      result = cmd_update(s, o);
    else
      result = cmd_track(s, o);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    if (dynamic_cast<const RejectedSampleError*>(&ex) != nullptr) err << "hint: rerun with --drop-unbound\n";
    write_manifest(dir, command, o, s.seed, {}, "error", ex.what(), elapsed());
    return kExitFailure;
  }

  std::vector<std::string> names;
  for (const auto& [name, content] : result.files) {
    write_atomic(dir / name, content);
    names.push_back(name);
  }
  const bool passed = all_passed(result.checks);
  const std::string status = (o.check && !passed) ? "check_failed" : "ok";
  write_manifest(dir, command, o, s.seed, names, status, "", elapsed());

  if (o.check) {
    for (const CheckItem& i : result.checks)
      out << (i.passed ? "PASS " : "FAIL ") << i.name << (i.detail.empty() ? "" : " (" + i.detail + ")") << '\n';
    if (!passed) return kExitCheck;
  }
  return kExitOk;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace astrack::cli
