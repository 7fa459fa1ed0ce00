#include "cusphere/cli.hpp"

#include "cusphere/io.hpp"
#include "cusphere/metrics.hpp"
#include "cusphere/solver.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace cusphere::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {"case",       "flux",  "axis",           "initial", "gamma",
                                             "steady",     "n-phi", "n-lambda-eq",    "dt",      "t-end",
                                             "threshold",  "out",   "snapshot-every", "threads", "dump-grid",
                                             "fault"};
  return keys;
}

const std::set<std::string>& custom_only_keys() {
  static const std::set<std::string> keys = {"flux", "axis", "initial", "gamma", "steady"};
  return keys;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double number_setting(const Settings& s, const std::string& key, double fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  try {
    return io::parse_double(it->second);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

long integer_setting(const Settings& s, const std::string& key, long fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  try {
    return io::parse_long(it->second);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

int int_setting(const Settings& s, const std::string& key, int fallback) {
  const long v = integer_setting(s, key, fallback);
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
    throw ConfigError("value for '" + key + "' is out of range");
  }
  return static_cast<int>(v);
}

bool bool_setting(const Settings& s, const std::string& key, bool fallback) {
  const auto it = s.find(key);
  if (it == s.end()) return fallback;
  const std::string v = lowercase(it->second);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("bad value for '" + key + "': expected true or false");
}

Point3 parse_axis(const std::string& text) {
  std::vector<double> parts;
  std::string_view rest = text;
  for (;;) {
    const auto comma = rest.find(',');
    try {
      parts.push_back(io::parse_double(rest.substr(0, comma)));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("bad value for 'axis': ") + e.what());
    }
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (parts.size() != 3) throw ConfigError("'axis' needs three comma-separated components");
  const Point3 a(parts[0], parts[1], parts[2]);
  if (!(a.norm() > 0.0) || !a.allFinite()) throw ConfigError("'axis' must be a finite nonzero vector");
  return a;
}

PointFunction initial_function(const std::string& key, double gamma) {
  using namespace initial_data;
  if (key == "single-jump-x1") return [gamma](const Point3& x) { return single_jump_x1(x, gamma); };
  if (key == "double-jump-x1") return [gamma](const Point3& x) { return double_jump_x1(x, gamma); };
  if (key == "cap-single-jump") return cap_single_jump;
  if (key == "cap-double-jump") return cap_double_jump;
  if (key == "confined-evolving") return confined_evolving;
  if (key == "confined-steady") return confined_steady;
  if (key == "constant") return [gamma](const Point3&) { return gamma; };
  throw ConfigError("unknown initial data '" + key + "'");
}

std::string join(const std::vector<std::string>& items, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (k) out += sep;
    out += items[k];
  }
  return out;
}

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

json band_layout_json(const SphereGrid& g) {
  json bands = json::array();
  for (const Band& b : g.band_layout) bands.push_back({{"phi1", b.phi1}, {"phi2", b.phi2}, {"n_lambda", b.n_lambda}});
  return bands;
}

json config_json(const RunConfig& cfg, const CaseSpec& spec, const fs::path& out_dir) {
  json c = {{"case", spec.name},
            {"flux", spec.flux},
            {"n_phi", cfg.n_phi},
            {"n_lambda_eq", cfg.n_lambda_eq},
            {"dt", cfg.dt},
            {"t_end", cfg.t_end},
            {"threshold", cfg.threshold},
            {"snapshot_every", cfg.snapshot_every},
            {"output_dir", out_dir.generic_string()}};
  if (cfg.case_name.empty()) {
    c["initial"] = cfg.initial;
    c["gamma"] = cfg.gamma;
    c["steady"] = cfg.steady;
    if (cfg.axis) c["axis"] = {cfg.axis->x(), cfg.axis->y(), cfg.axis->z()};
  } else {
    c["gamma"] = spec.gamma;
  }
  return c;
}

void write_grid_dump(const SphereGrid& g, const fs::path& path) {
  if (path.empty()) return;
  std::ostringstream dump;
  dump_grid(g, dump);
  io::write_file_atomic(path, dump.str());
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void inject_fault(SphereGrid& g, const std::string& fault) {
  if (fault.empty()) return;
  if (fault == "flip-edge") {
    for (std::size_t k = g.edges.size() / 2; k < g.edges.size(); ++k) {
      Edge& e = g.edges[k];
      if (e.degenerate()) continue;
      std::swap(e.e1, e.e2);
      return;
    }
  } else if (fault == "drop-edge") {
    Cell& c = g.cells[g.cells.size() / 2];
    c.edge_ids.pop_back();
    return;
  }
  throw ConfigError("unknown fault '" + fault + "' (expected flip-edge or drop-edge)");
}

}  // namespace

std::vector<std::string> initial_keys() {
  return {"single-jump-x1", "double-jump-x1",  "cap-single-jump", "cap-double-jump",
          "confined-evolving", "confined-steady", "constant"};
}

RunConfig resolve_config(const Settings& settings) {
  for (const auto& [key, value] : settings) {
    if (!known_keys().count(key)) throw ConfigError("unknown setting '" + key + "'");
  }
  RunConfig cfg;
  if (const auto it = settings.find("case"); it != settings.end()) {
    for (const auto& key : custom_only_keys()) {
      if (settings.count(key)) throw ConfigError("'" + key + "' cannot be combined with a catalog case");
    }
    const CaseSpec spec = find_case(it->second);
    cfg.case_name = spec.name;
    cfg.n_phi = spec.n_phi;
    cfg.n_lambda_eq = spec.n_lambda_eq;
    cfg.dt = spec.dt;
    cfg.t_end = spec.t_end;
    cfg.gamma = spec.gamma;
  } else {
    const auto flux = settings.find("flux");
    const auto initial = settings.find("initial");
    if (flux == settings.end() || initial == settings.end()) {
      throw ConfigError("either 'case' or both 'flux' and 'initial' are required");
    }
    cfg.flux = flux->second;
    cfg.initial = initial->second;
    if (const auto axis = settings.find("axis"); axis != settings.end()) cfg.axis = parse_axis(axis->second);
    if (cfg.flux == "foliated" && !cfg.axis) throw ConfigError("flux 'foliated' needs 'axis'");
    if (cfg.flux != "foliated" && cfg.axis) throw ConfigError("'axis' applies only to flux 'foliated'");
    if (cfg.flux != "foliated") make_model(cfg.flux);
    cfg.gamma = number_setting(settings, "gamma", cfg.gamma);
    initial_function(cfg.initial, cfg.gamma);
    cfg.steady = bool_setting(settings, "steady", false);
  }

  cfg.n_phi = int_setting(settings, "n-phi", cfg.n_phi);
  cfg.n_lambda_eq = int_setting(settings, "n-lambda-eq", cfg.n_lambda_eq);
  cfg.dt = number_setting(settings, "dt", cfg.dt);
  cfg.t_end = number_setting(settings, "t-end", cfg.t_end);
  cfg.threshold = number_setting(settings, "threshold", cfg.threshold);
  cfg.snapshot_every = integer_setting(settings, "snapshot-every", 0);
  cfg.threads = int_setting(settings, "threads", 1);
  if (const auto it = settings.find("out"); it != settings.end()) cfg.output_dir = it->second;
  if (const auto it = settings.find("dump-grid"); it != settings.end()) cfg.dump_grid = it->second;
  if (const auto it = settings.find("fault"); it != settings.end()) cfg.fault = it->second;

  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
  if (!(cfg.t_end >= 0.0) || !std::isfinite(cfg.t_end)) throw ConfigError("t_end must be non-negative");
  if (cfg.snapshot_every < 0) throw ConfigError("snapshot_every must be non-negative");
  if (cfg.threads < 1) throw ConfigError("threads must be at least 1");
  return cfg;
}

CaseSpec case_for(const RunConfig& cfg) {
  CaseSpec spec;
  if (!cfg.case_name.empty()) {
    spec = find_case(cfg.case_name);
  } else {
    spec.name = "custom";
    spec.flux = cfg.flux;
    spec.description = "custom run";
    spec.initial_u = initial_function(cfg.initial, cfg.gamma);
    if (cfg.steady) spec.exact_u = spec.initial_u;
    spec.gamma = cfg.gamma;
  }
  spec.n_phi = cfg.n_phi;
  spec.n_lambda_eq = cfg.n_lambda_eq;
  spec.dt = cfg.dt;
  spec.t_end = cfg.t_end;
  return spec;
}

FluxModelPtr model_for(const RunConfig& cfg) {
  if (!cfg.case_name.empty()) return make_model(find_case(cfg.case_name).flux);
  if (cfg.flux == "foliated") {
    return make_foliated({cfg.axis.value(), ScalarFunction::identity(), ScalarFunction::burgers(), "foliated"});
  }
  return make_model(cfg.flux);
}

double compat_residual(const SphereGrid& g, const FluxModel& m, int threads) {
  SolverConfig sc;
  sc.threads = threads;
  double worst = 0.0;
  for (double u_bar : {-1.0, 0.0, 0.37, 2.0}) {
    const CellField f(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(g.size()), u_bar));
    const double r = rhs(g, m, f, sc).cwiseAbs().maxCoeff();
    const double scale = max_vertex_potential(m, g, u_bar);
    worst = std::max(worst, scale > 0.0 ? r / scale : r);
  }
  return worst;
}

int cmd_list(bool as_json, std::ostream& out) {
  const auto cases = case_catalog();
  if (as_json) {
    json rows = json::array();
    for (const CaseSpec& c : cases) {
      rows.push_back({{"name", c.name},
                      {"flux", c.flux},
                      {"n_phi", c.n_phi},
                      {"n_lambda_eq", c.n_lambda_eq},
                      {"dt", c.dt},
                      {"t_end", c.t_end},
                      {"gamma", c.gamma},
                      {"steady", c.exact_u.has_value()},
                      {"description", c.description}});
    }
    out << rows.dump(2) << '\n';
    return kExitOk;
  }
  char line[256];
  std::snprintf(line, sizeof line, "%-5s %-14s %-9s %-6s %-6s %s\n", "case", "flux", "grid", "dt", "t_end",
                "description");
  out << line;
  for (const CaseSpec& c : cases) {
    const std::string grid = std::to_string(c.n_phi) + "x" + std::to_string(c.n_lambda_eq);
    std::snprintf(line, sizeof line, "%-5s %-14s %-9s %-6g %-6g %s\n", c.name.c_str(), c.flux.c_str(), grid.c_str(),
                  c.dt, c.t_end, c.description.c_str());
    out << line;
  }
  return kExitOk;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CaseSpec spec = case_for(cfg);
  const FluxModelPtr model = model_for(cfg);
  const SphereGrid g = build_grid(cfg.n_phi, cfg.n_lambda_eq, cfg.threshold);

  write_grid_dump(g, cfg.dump_grid);

  const fs::path out_dir = cfg.output_dir.empty() ? fs::path(lowercase(spec.name)) : cfg.output_dir;
  const fs::path staging = out_dir / ".staging";
  fs::create_directories(out_dir);
  fs::remove_all(staging);
  fs::create_directories(staging);

  std::vector<std::string> written;
  auto stage = [&](const std::string& name, const std::string& content) {
    io::write_file_atomic(staging / name, content);
    written.push_back(name);
  };
  auto snapshot_name = [](long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "step_%06ld.csv", step);
    return std::string(buf);
  };

  const CellField f0 = project(g, spec.initial_u);
  if (cfg.snapshot_every > 0) stage(snapshot_name(0), io::field_csv(g, f0));

  SolverConfig sc;
  sc.dt = cfg.dt;
  sc.t_end = cfg.t_end;
  sc.threads = cfg.threads;

  CellField f;
  RunReport report;
  try {
    auto observer = [&](const CellField& state, long step) {
      if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) stage(snapshot_name(step), io::field_csv(g, state));
    };
    std::tie(f, report) = integrate(g, *model, f0, sc, observer);
  } catch (const SolverError& e) {
    fs::remove_all(staging);
    err << "solver aborted at step " << e.step() << ": " << e.what() << '\n';
    return kExitSolver;
  }

  report.compat_residual = compat_residual(g, *model, cfg.threads);
  report.l2_error = spec.exact_u ? l2_error(g, f, *spec.exact_u) : std::numeric_limits<double>::quiet_NaN();

  stage("final.csv", io::field_csv(g, f));
  json doc = {{"case", spec.name},
              {"description", spec.description},
              {"l2_error", number_or_null(report.l2_error)},
              {"u_min", report.u_min},
              {"u_max", report.u_max},
              {"mass_initial", report.mass_initial},
              {"mass_final", report.mass_final},
              {"compat_residual", report.compat_residual},
              {"cfl_estimate", report.cfl_estimate},
              {"steps", report.steps},
              {"wall_seconds", report.wall_seconds},
              {"t_final", f.time},
              {"cells", g.size()},
              {"snapshots", written},
              {"config", config_json(cfg, spec, out_dir)},
              {"band_layout", band_layout_json(g)}};
  stage("report.json", doc.dump(2) + "\n");

  for (const std::string& name : written) fs::rename(staging / name, out_dir / name);
  fs::remove_all(staging);

  out << spec.name << ": steps=" << report.steps << " t=" << format("%g", f.time)
      << " l2_error=" << (std::isfinite(report.l2_error) ? format("%.3e", report.l2_error) : std::string("n/a"))
      << " range=[" << format("%.6g", report.u_min) << ", " << format("%.6g", report.u_max) << "]"
      << " mass_drift=" << format("%.2e", report.mass_final - report.mass_initial)
      << " compat=" << format("%.1e", report.compat_residual) << " cfl=" << format("%.2f", report.cfl_estimate)
      << " wall=" << format("%.2f", report.wall_seconds) << "s -> " << out_dir.generic_string() << '\n';
  return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const CaseSpec spec = case_for(cfg);
  const FluxModelPtr model = model_for(cfg);
  SphereGrid g = build_grid(cfg.n_phi, cfg.n_lambda_eq, cfg.threshold);
  inject_fault(g, cfg.fault);
  write_grid_dump(g, cfg.dump_grid);

  struct Check {
    std::string name;
    double value;
    double threshold;
  };
  std::vector<Check> checks;

  out << "grid: " << g.size() << " cells, " << g.edges.size() << " edges, " << g.band_layout.size() << " bands\n";
  const ValidationReport grid_report = validate_grid(g);
  for (std::size_t k = 0; k < grid_report.violations.size() && k < 10; ++k) {
    const Violation& v = grid_report.violations[k];
    const char* target = v.target == Violation::Target::Cell ? "cell" : v.target == Violation::Target::Edge ? "edge" : "grid";
    out << "  violation: " << target << ' ' << v.id << ": " << v.message << '\n';
  }
  checks.push_back({"grid_violations", static_cast<double>(grid_report.violations.size()), 0.0});

  double divergence = 0.0;
  for (double u_bar : {-1.0, 0.0, 0.37, 2.0}) {
    divergence = std::max(divergence, discrete_divergence_residual(*model, g, u_bar));
  }
  checks.push_back({"divergence_residual", divergence, 1e-13});
  checks.push_back({"compat_residual", compat_residual(g, *model, cfg.threads), 1e-13});

  SolverConfig sc;
  sc.threads = cfg.threads;
  const CellField f0 = project(g, spec.initial_u);
  const Eigen::VectorXd r = rhs(g, *model, f0, sc);
  double net = 0.0, gross = 0.0;
  for (const Cell& c : g.cells) {
    net += c.area * r[c.id];
    gross += c.area * std::abs(r[c.id]);
  }
  checks.push_back({"conservation", gross > 0.0 ? std::abs(net) / gross : 0.0, 1e-12});

  std::vector<std::string> failed;
  for (const Check& c : checks) {
    const bool pass = c.value <= c.threshold;
    if (!pass) failed.push_back(c.name);
    char line[160];
    std::snprintf(line, sizeof line, "%s %-20s %.3e <= %.0e\n", pass ? "PASS" : "FAIL", c.name.c_str(), c.value,
                  c.threshold);
    out << line;
  }
  if (!failed.empty()) {
    err << "validate: failed checks: " << join(failed, ", ") << '\n';
    return kExitCheckFailed;
  }
  out << "validate: all checks passed\n";
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Central-upwind finite-volume solver for scalar conservation laws on the sphere", "cusphere"};
  app.require_subcommand(1);

  CLI::App* run = app.add_subcommand("run", "Integrate a case and write snapshots and a report");
  CLI::App* list = app.add_subcommand("list", "Print the case catalog");
  CLI::App* validate = app.add_subcommand("validate", "Check grid, compatibility and conservation without stepping");

  bool list_json = false;
  list->add_flag("--json", list_json, "Machine-readable output");

  struct Bound {
    std::string key;
    CLI::Option* option;
  };
  std::map<std::string, std::string> raw;
  std::string config_path;
  std::vector<Bound> bound;
  static const std::vector<std::pair<std::string, std::string>> options = {
      {"case", "Catalog case T1..T8"},
      {"flux", "Custom run: flux model key"},
      {"axis", "Custom foliated flux: direction a as x,y,z"},
      {"initial", "Custom run: initial data key"},
      {"gamma", "Custom run: amplitude of the initial data"},
      {"steady", "Custom run: initial data is the exact solution"},
      {"n-phi", "Latitude bands"},
      {"n-lambda-eq", "Longitude cells per equatorial band"},
      {"dt", "Time step"},
      {"t-end", "Final time"},
      {"threshold", "Coarsening threshold in [0, 1]; 0 disables coarsening"},
      {"dump-grid", "Write the grid layout to PATH"}};
  for (CLI::App* sub : {run, validate}) {
    sub->add_option("--config", config_path, "key=value settings file; flags override it");
    for (const auto& [key, help] : options) bound.push_back({key, sub->add_option("--" + key, raw[key], help)});
  }
  bound.push_back({"out", run->add_option("--out", raw["out"], "Output directory (default: lowercase case name)")});
  bound.push_back({"snapshot-every", run->add_option("--snapshot-every", raw["snapshot-every"],
                                                     "Write step_NNNNNN.csv every N steps (0: final only)")});
  bound.push_back({"fault", validate->add_option("--inject-fault", raw["fault"], "Corrupt the grid: flip-edge, drop-edge")});

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  if (list->parsed()) return cmd_list(list_json, out);

  try {
    Settings settings;
    if (const char* env = std::getenv("SOLVER_THREADS"); env && *env) {
      try {
        settings["threads"] = std::to_string(std::max(1L, io::parse_long(env)));
      } catch (const std::invalid_argument&) {
        err << "ignoring SOLVER_THREADS='" << env << "'\n";
      }
    }
    if (!config_path.empty()) {
      for (const auto& [key, value] : io::read_key_value_file(config_path)) settings[key] = value;
    }
    for (const Bound& b : bound) {
      if (b.option->count() > 0) settings[b.key] = raw[b.key];
    }
    const RunConfig cfg = resolve_config(settings);
    return run->parsed() ? cmd_run(cfg, out, err) : cmd_validate(cfg, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const GeometryError& e) {
    err << "config error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitConfig;
}

}  // namespace cusphere::cli
