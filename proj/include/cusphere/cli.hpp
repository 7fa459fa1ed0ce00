#pragma once

#include "cusphere/cases.hpp"
#include "cusphere/flux_model.hpp"
#include "cusphere/grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cusphere::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Fully resolved settings for one run. Either `case_name` names a catalog
/// entry, or `flux` and `initial` describe a custom run.
struct RunConfig {
  std::string case_name;
  std::string flux;                   // registry key, or "foliated" with `axis`
  std::optional<Point3> axis;         // custom foliated direction a
  std::string initial;                // key from initial_keys()
  double gamma = 0.1;                 // amplitude of parametrized initial data
  bool steady = false;                // custom: initial data is the exact solution
  int n_phi = 96;
  int n_lambda_eq = 192;
  double dt = 0.04;
  double t_end = 5.0;
  double threshold = 0.5;
  std::filesystem::path output_dir;   // empty: lowercase case name
  long snapshot_every = 0;            // 0: final snapshot only
  int threads = 1;
  std::filesystem::path dump_grid;    // empty: no dump
  std::string fault;                  // validate only: "flip-edge" or "drop-edge"
};

/// Settings keyed like the long flags without dashes ("n-phi", "t-end", ...).
using Settings = std::map<std::string, std::string>;

/// Applies `settings` on top of the catalog defaults of its "case" entry, or
/// on top of RunConfig{} for a custom run. Throws ConfigError.
RunConfig resolve_config(const Settings& settings);

/// Initial-data keys accepted by custom runs.
std::vector<std::string> initial_keys();

/// Catalog entry, or a synthesized "custom" case for a custom run.
CaseSpec case_for(const RunConfig& cfg);
FluxModelPtr model_for(const RunConfig& cfg);

/// max over u in {-1, 0, 0.37, 2} of |rhs(constant u)|_inf / max vertex |h|.
double compat_residual(const SphereGrid& g, const FluxModel& m, int threads = 1);

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_list(bool json, std::ostream& out);
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name. SOLVER_THREADS is read from the environment.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cusphere::cli
