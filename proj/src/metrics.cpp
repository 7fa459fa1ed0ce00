#include "cusphere/metrics.hpp"

#include <cmath>

namespace cusphere {

CellField project(const SphereGrid& g, const PointFunction& u0, double time) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(g.size()));
  for (const Cell& c : g.cells) v[c.id] = u0(c.center_xyz);
  return CellField(std::move(v), time);
}

double l2_error(const SphereGrid& g, const CellField& f, const PointFunction& exact) {
  double num = 0.0, den = 0.0;
  for (const Cell& c : g.cells) {
    const double d = f[c.id] - exact(c.center_xyz);
    num += c.area * d * d;
    den += c.area;
  }
  return std::sqrt(num / den);
}

std::pair<double, double> solution_range(const CellField& f) {
  return {f.values.minCoeff(), f.values.maxCoeff()};
}

double total_mass(const SphereGrid& g, const CellField& f) {
  double m = 0.0;
  for (const Cell& c : g.cells) m += c.area * f[c.id];
  return m;
}

}  // namespace cusphere
