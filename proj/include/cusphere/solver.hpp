#pragma once

#include "cusphere/flux_model.hpp"
#include "cusphere/grid.hpp"
#include "cusphere/metrics.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace cusphere {

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long step, int cell) : std::runtime_error(what), step_(step), cell_(cell) {}
  long step() const { return step_; }
  int cell() const { return cell_; }

 private:
  long step_;
  int cell_;
};

/// Per-cell limited slopes of the linear reconstruction
///   u(lambda, phi) = u_j + (lambda - lambda_j) mu_j + (phi - phi_j) sigma_j.
struct SlopeField {
  Eigen::VectorXd mu;     // per radian of longitude
  Eigen::VectorXd sigma;  // per radian of latitude
};

struct SolverConfig {
  double dt = 0.04;
  double t_end = 5.0;
  double epsilon_speed = 1e-8;  // a_in + a_out below this switches to the central average
  int threads = 1;              // results do not depend on this
};

/// s * min(|k1|, |k2|, |k3|) when all three share the strict sign s, else 0.
inline double minmod3(double k1, double k2, double k3) {
  if (k1 > 0.0 && k2 > 0.0 && k3 > 0.0) return std::min({k1, k2, k3});
  if (k1 < 0.0 && k2 < 0.0 && k3 < 0.0) return std::max({k1, k2, k3});
  return 0.0;
}

SlopeField compute_slopes(const SphereGrid& g, const CellField& f);

struct EdgeTraces {
  double u_own;
  double u_nb;
};

/// Reconstructed values at the edge midpoint from the left (owning) cell and
/// from the right cell. Degenerate pole edges return the owner's average twice.
EdgeTraces edge_traces(const SphereGrid& g, const CellField& f, const SlopeField& s, const Edge& edge);

/// Value of cell j's linear reconstruction at a point given in spherical coordinates.
double reconstruct_at(const SphereGrid& g, const CellField& f, const SlopeField& s, int cell, const Spherical& at);

/// Numerical flux through `edge` out of its left cell, combining the two
/// traces with the one-sided speeds.
double edge_numerical_flux(const FluxModel& m, const Edge& edge, double u_own, double u_nb, double epsilon_speed);

/// Semi-discrete right-hand side d(u_j)/dt.
Eigen::VectorXd rhs(const SphereGrid& g, const FluxModel& m, const CellField& f, const SolverConfig& cfg);

/// Shu-Osher three-stage SSP Runge-Kutta step for u' = L(u).
template <typename State, typename Operator>
State ssp_rk3_step(const State& u, double dt, Operator&& L) {
  const State u1 = u + dt * L(u);
  const State u2 = 0.75 * u + 0.25 * (u1 + dt * L(u1));
  return State((1.0 / 3.0) * u + (2.0 / 3.0) * (u2 + dt * L(u2)));
}

CellField ssp_rk3_step(const SphereGrid& g, const FluxModel& m, const CellField& f, const SolverConfig& cfg);

/// Called after every completed step with the new state and its step index.
using StepObserver = std::function<void(const CellField&, long)>;

/// Fixed-step integration from f0.time to cfg.t_end. A trailing partial step
/// is taken when the interval is not a whole number of steps. Fills the
/// mass, step count, CFL estimate and wall time of the report.
std::pair<CellField, RunReport> integrate(const SphereGrid& g, const FluxModel& m, const CellField& f0,
                                          const SolverConfig& cfg, const StepObserver& observer = {});

/// Advisory CFL number: max |speed| * dt / min_j (|C_j| / sum_k l_jk).
double cfl_estimate(const SphereGrid& g, const FluxModel& m, const CellField& f, double dt);

}  // namespace cusphere
