#include "cusphere/solver.hpp"

#include "cusphere/parallel.hpp"

#include <chrono>
#include <limits>
#include <cmath>
#include <sstream>

namespace cusphere {

namespace {

struct NeighborAverage {
  double value = 0.0;
  double phi = 0.0;
  bool present = false;
};

// Area-weighted average over the cells across one latitude side of `c`
// (north when north == true). Empty on a pole side.
NeighborAverage latitude_neighbor(const SphereGrid& g, const CellField& f, const Cell& c, bool north) {
  double area = 0.0, deviation = 0.0, phi = 0.0;
  double base = 0.0;
  bool first = true;
  for (int id : c.edge_ids) {
    const Edge& e = g.edges[id];
    if (e.kind != EdgeKind::LatitudeArc || e.degenerate()) continue;
    // The south cell owns every latitude edge.
    const bool is_north_side = (e.left_cell == c.id);
    if (is_north_side != north) continue;
    const Cell& nb = g.cells[g.neighbor(id, c.id)];
    // A coarse neighbor shows up once per fine edge; weights stay consistent
    // because every such edge references the same cell.
    if (first) {
      base = f[nb.id];
      first = false;
    }
    area += nb.area;
    deviation += nb.area * (f[nb.id] - base);
    phi += nb.area * nb.center.phi;
  }
  if (area == 0.0) return {};
  // Averaging deviations from the first value keeps equal values exact.
  return {base + deviation / area, phi / area, true};
}

void check_finite(const CellField& f, long step) {
  for (Eigen::Index j = 0; j < f.size(); ++j) {
    if (!std::isfinite(f[j])) {
      std::ostringstream msg;
      msg << "non-finite value in cell " << j;
      if (step >= 0) msg << " at step " << step;
      throw SolverError(msg.str(), step, static_cast<int>(j));
    }
  }
}

// Knuth's error-free sum: a + b == s + err exactly.
struct TwoSum {
  double s;
  double err;
};

TwoSum two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// Edge flux carried as an unevaluated sum hi + lo. The potential difference
// is split exactly, so a closed loop of constant-state fluxes cancels to
// roundoff of order eps^2 |h| instead of eps |h|.
struct SplitFlux {
  double hi = 0.0;
  double lo = 0.0;
};

SplitFlux split_numerical_flux(const FluxModel& m, const Edge& edge, double u_own, double u_nb, double epsilon_speed) {
  if (edge.degenerate()) return {};
  const EdgeSpeeds sp = local_speeds(m, edge, u_own, u_nb);
  const TwoSum h_own = two_sum(m.h(edge.e1, u_own), -m.h(edge.e2, u_own));
  const TwoSum h_nb = two_sum(m.h(edge.e1, u_nb), -m.h(edge.e2, u_nb));
  const double jump = (h_nb.s - h_own.s) + (h_nb.err - h_own.err);
  const double sum = sp.a_in + sp.a_out;
  if (sum < epsilon_speed) return {h_own.s, h_own.err + 0.5 * jump};
  // (a_in H_nb + a_out H_own) / sum, written so equal traces give H exactly.
  return {h_own.s, h_own.err + sp.a_in * jump / sum - sp.a_in * sp.a_out * edge.length * (u_nb - u_own) / sum};
}

}  // namespace

SlopeField compute_slopes(const SphereGrid& g, const CellField& f) {
  const auto n = static_cast<Eigen::Index>(g.size());
  SlopeField s{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  for (const Cell& c : g.cells) {
    const Band& band = g.band_layout[c.band];
    const int nl = band.n_lambda;
    const double dl = two_pi_v<double> / nl;
    const double u = f[c.id];
    const double uw = f[band.first_cell + (c.index_in_band + nl - 1) % nl];
    const double ue = f[band.first_cell + (c.index_in_band + 1) % nl];
    s.mu[c.id] = minmod3((ue - u) / dl, (ue - uw) / (2.0 * dl), (u - uw) / dl);

    const NeighborAverage nn = latitude_neighbor(g, f, c, true);
    const NeighborAverage sn = latitude_neighbor(g, f, c, false);
    const double phi = c.center.phi;
    if (nn.present && sn.present) {
      s.sigma[c.id] = minmod3((nn.value - u) / (nn.phi - phi), (nn.value - sn.value) / (nn.phi - sn.phi),
                              (u - sn.value) / (phi - sn.phi));
    } else if (nn.present) {
      const double k = (nn.value - u) / (nn.phi - phi);
      s.sigma[c.id] = minmod3(k, k, k);
    } else if (sn.present) {
      const double k = (u - sn.value) / (phi - sn.phi);
      s.sigma[c.id] = minmod3(k, k, k);
    }
  }
  return s;
}

double reconstruct_at(const SphereGrid& g, const CellField& f, const SlopeField& s, int cell, const Spherical& at) {
  const Cell& c = g.cells[cell];
  return f[cell] + wrap_difference(at.lambda - c.center.lambda) * s.mu[cell] + (at.phi - c.center.phi) * s.sigma[cell];
}

EdgeTraces edge_traces(const SphereGrid& g, const CellField& f, const SlopeField& s, const Edge& edge) {
  if (edge.degenerate()) return {f[edge.left_cell], f[edge.left_cell]};
  return {reconstruct_at(g, f, s, edge.left_cell, edge.midpoint), reconstruct_at(g, f, s, edge.right_cell, edge.midpoint)};
}

double edge_numerical_flux(const FluxModel& m, const Edge& edge, double u_own, double u_nb, double epsilon_speed) {
  const SplitFlux f = split_numerical_flux(m, edge, u_own, u_nb, epsilon_speed);
  return f.hi + f.lo;
}

Eigen::VectorXd rhs(const SphereGrid& g, const FluxModel& m, const CellField& f, const SolverConfig& cfg) {
  if (f.size() != static_cast<Eigen::Index>(g.size())) throw SolverError("field size does not match grid", -1, -1);
  check_finite(f, -1);
  const SlopeField s = compute_slopes(g, f);

  const std::size_t n_edges = g.edges.size();
  std::vector<SplitFlux> flux(n_edges);
  parallel_for(n_edges, cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const Edge& edge = g.edges[k];
      const EdgeTraces t = edge_traces(g, f, s, edge);
      flux[k] = split_numerical_flux(m, edge, t.u_own, t.u_nb, cfg.epsilon_speed);
    }
  });

  Eigen::VectorXd out(static_cast<Eigen::Index>(g.size()));
  parallel_for(g.size(), cfg.threads, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) {
      const Cell& c = g.cells[j];
      double acc = 0.0, carry = 0.0;
      for (int id : c.edge_ids) {
        const double sign = g.orientation(id, c.id);
        const TwoSum t = two_sum(acc, sign * flux[id].hi);
        acc = t.s;
        carry += t.err + sign * flux[id].lo;
      }
      out[static_cast<Eigen::Index>(j)] = -(acc + carry) / c.area;
    }
  });
  return out;
}

CellField ssp_rk3_step(const SphereGrid& g, const FluxModel& m, const CellField& f, const SolverConfig& cfg) {
  auto L = [&](const Eigen::VectorXd& v) { return rhs(g, m, CellField(v, f.time), cfg); };
  return CellField(ssp_rk3_step(f.values, cfg.dt, L), f.time + cfg.dt);
}

double cfl_estimate(const SphereGrid& g, const FluxModel& m, const CellField& f, double dt) {
  double speed = 0.0;
  for (const Edge& e : g.edges) {
    if (e.degenerate()) continue;
    const EdgeSpeeds sp = local_speeds(m, e, f[e.left_cell], f[e.right_cell]);
    speed = std::max({speed, sp.a_in, sp.a_out});
  }
  double spacing = std::numeric_limits<double>::infinity();
  for (const Cell& c : g.cells) {
    double perimeter = 0.0;
    for (int id : c.edge_ids) perimeter += g.edges[id].length;
    spacing = std::min(spacing, c.area / perimeter);
  }
  return speed * dt / spacing;
}

std::pair<CellField, RunReport> integrate(const SphereGrid& g, const FluxModel& m, const CellField& f0,
                                          const SolverConfig& cfg, const StepObserver& observer) {
  if (!(cfg.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(cfg.epsilon_speed > 0.0)) throw ConfigError("epsilon_speed must be positive");
  if (cfg.t_end < f0.time) throw ConfigError("t_end precedes the initial time");
  check_finite(f0, 0);

  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.mass_initial = total_mass(g, f0);
  report.cfl_estimate = cfl_estimate(g, m, f0, cfg.dt);

  const double span = cfg.t_end - f0.time;
  const double ratio = span / cfg.dt;
  const double whole = std::round(ratio);
  long full_steps = 0;
  double last_dt = 0.0;
  if (std::abs(ratio - whole) <= 1e-9 * std::max(1.0, ratio)) {
    full_steps = static_cast<long>(whole);
  } else {
    full_steps = static_cast<long>(std::floor(ratio));
    last_dt = span - full_steps * cfg.dt;
  }

  CellField f = f0;
  SolverConfig step_cfg = cfg;
  const long total = full_steps + (last_dt > 0.0 ? 1 : 0);
  for (long k = 1; k <= total; ++k) {
    step_cfg.dt = (k > full_steps) ? last_dt : cfg.dt;
    try {
      f = ssp_rk3_step(g, m, f, step_cfg);
    } catch (const SolverError& err) {
      throw SolverError(std::string(err.what()) + " during step " + std::to_string(k), k, err.cell());
    }
    f.time = (k == total) ? cfg.t_end : f0.time + k * cfg.dt;
    check_finite(f, k);
    if (observer) observer(f, k);
  }

  report.steps = total;
  report.mass_final = total_mass(g, f);
  const auto [lo, hi] = solution_range(f);
  report.u_min = lo;
  report.u_max = hi;
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(f), report};
}

}  // namespace cusphere
