#include "cusphere/flux_model.hpp"

#include <cmath>
#include <stdexcept>

namespace cusphere {

namespace {
// Spatial step for the black-box tangential derivative of h.
constexpr double kSpatialStep = 1e-4;
}  // namespace

double FluxModel::normal_flux(const Point3& x, const Point3& normal, double u) const {
  // N . (n x grad h) = grad h . (N x n)
  const Point3 t = normal.cross(x.normalized());
  return (h(x + kSpatialStep * t, u) - h(x - kSpatialStep * t, u)) / (2.0 * kSpatialStep);
}

double FluxModel::normal_flux_derivative(const Point3& x, const Point3& normal, double u) const {
  const double du = kFiniteDifferenceStep;
  return (normal_flux(x, normal, u + du) - normal_flux(x, normal, u - du)) / (2.0 * du);
}

ScalarFunction ScalarFunction::identity() {
  return {[](double s) { return s; }, [](double) { return 1.0; }};
}

ScalarFunction ScalarFunction::burgers() {
  return {[](double u) { return 0.5 * u * u; }, [](double u) { return u; }};
}

double FoliatedFlux::geometric_factor(const Point3& x, const Point3& normal) const {
  const Point3 n = x.normalized();
  return spec_.phi.derivative(x.dot(spec_.a)) * normal.dot(n.cross(spec_.a));
}

double FoliatedFlux::normal_flux(const Point3& x, const Point3& normal, double u) const {
  return geometric_factor(x, normal) * spec_.f(u);
}

double FoliatedFlux::normal_flux_derivative(const Point3& x, const Point3& normal, double u) const {
  return geometric_factor(x, normal) * spec_.f.derivative(u);
}

double ConfinedX1Flux::normal_flux(const Point3& x, const Point3& normal, double u) const {
  if (x.x() > 0.0) return 0.0;
  const Point3 n = x.normalized();
  return 2.0 * x.x() * f1_(u) * normal.dot(n.cross(Point3::UnitX()));
}

double ConfinedX1Flux::normal_flux_derivative(const Point3& x, const Point3& normal, double u) const {
  if (x.x() > 0.0) return 0.0;
  const Point3 n = x.normalized();
  return 2.0 * x.x() * f1_.derivative(u) * normal.dot(n.cross(Point3::UnitX()));
}

FluxModelPtr make_foliated(FoliatedFluxSpec spec) { return std::make_shared<FoliatedFlux>(std::move(spec)); }

FluxModelPtr make_confined_x1(ScalarFunction f1) { return std::make_shared<ConfinedX1Flux>(std::move(f1)); }

FluxModelPtr make_model(const std::string& key) {
  if (key == "foliated-x1") {
    return make_foliated({Point3::UnitX(), ScalarFunction::identity(), ScalarFunction::burgers(), key});
  }
  if (key == "foliated-diag") {
    return make_foliated({Point3(1, 1, 1), ScalarFunction::identity(), ScalarFunction::burgers(), key});
  }
  if (key == "confined-x1") return make_confined_x1();
  throw ConfigError("unknown flux model '" + key + "'");
}

std::vector<std::string> model_keys() { return {"foliated-x1", "foliated-diag", "confined-x1"}; }

double max_vertex_potential(const FluxModel& m, const SphereGrid& g, double u_bar) {
  double hmax = 0.0;
  for (const Edge& e : g.edges) {
    hmax = std::max({hmax, std::abs(m.h(e.e1, u_bar)), std::abs(m.h(e.e2, u_bar))});
  }
  return hmax;
}

double discrete_divergence_residual(const FluxModel& m, const SphereGrid& g, double u_bar) {
  double worst = 0.0;
  for (const Cell& c : g.cells) {
    double sum = 0.0;
    for (int id : c.edge_ids) {
      const auto [e1, e2] = g.oriented_endpoints(id, c.id);
      sum += edge_flux_H(m, e1, e2, u_bar);
    }
    worst = std::max(worst, std::abs(sum));
  }
  return worst / std::max(1.0, max_vertex_potential(m, g, u_bar));
}

}  // namespace cusphere
