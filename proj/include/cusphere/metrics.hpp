#pragma once

#include "cusphere/grid.hpp"

#include <Eigen/Core>

#include <functional>
#include <utility>

namespace cusphere {

/// Cell averages of the conserved variable at time `time`, indexed by cell id.
struct CellField {
  Eigen::VectorXd values;
  double time = 0.0;

  CellField() = default;
  explicit CellField(Eigen::VectorXd v, double t = 0.0) : values(std::move(v)), time(t) {}

  Eigen::Index size() const { return values.size(); }
  double operator[](Eigen::Index j) const { return values[j]; }
  double& operator[](Eigen::Index j) { return values[j]; }
};

using PointFunction = std::function<double(const Point3&)>;

struct RunReport {
  double l2_error = 0.0;
  double u_min = 0.0;
  double u_max = 0.0;
  double mass_initial = 0.0;
  double mass_final = 0.0;
  double compat_residual = 0.0;
  double cfl_estimate = 0.0;  // advisory only
  long steps = 0;
  double wall_seconds = 0.0;
};

/// Cell values sampled at the reconstruction points G_j.
CellField project(const SphereGrid& g, const PointFunction& u0, double time = 0.0);

/// Area-weighted RMS difference against `exact` sampled at the cell centers.
double l2_error(const SphereGrid& g, const CellField& f, const PointFunction& exact);

/// (min, max) over the cells.
std::pair<double, double> solution_range(const CellField& f);

/// Sum of |C_j| u_j.
double total_mass(const SphereGrid& g, const CellField& f);

}  // namespace cusphere
