#pragma once

#include "cusphere/grid.hpp"
#include "cusphere/sphere_geometry.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cusphere {

/// Geometry-compatible flux F(x,u) = n(x) x grad h(x,u), described entirely
/// by its potential h. The normal component and its u-derivative default to
/// finite differences of h; concrete models override them analytically.
class FluxModel {
 public:
  virtual ~FluxModel() = default;

  virtual std::string name() const = 0;

  /// Potential h(x, u); x may lie anywhere in a neighborhood of the sphere.
  virtual double h(const Point3& x, double u) const = 0;

  /// N . F(x, u) for a unit tangent vector N at x.
  virtual double normal_flux(const Point3& x, const Point3& normal, double u) const;

  /// N . dF/du(x, u): the directional wave speed across an interface with
  /// normal N.
  virtual double normal_flux_derivative(const Point3& x, const Point3& normal, double u) const;

  static constexpr double kFiniteDifferenceStep = 1e-6;
};

using FluxModelPtr = std::shared_ptr<const FluxModel>;

/// Scalar function of one variable paired with its derivative.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  double operator()(double s) const { return value(s); }

  static ScalarFunction identity();
  static ScalarFunction burgers();  // u^2/2
};

/// Foliated potential h(x,u) = phi(x . a) f(u).
struct FoliatedFluxSpec {
  Point3 a;
  ScalarFunction phi;
  ScalarFunction f;
  std::string name = "foliated";
};

class FoliatedFlux final : public FluxModel {
 public:
  explicit FoliatedFlux(FoliatedFluxSpec spec) : spec_(std::move(spec)) {}

  std::string name() const override { return spec_.name; }
  double h(const Point3& x, double u) const override { return spec_.phi(x.dot(spec_.a)) * spec_.f(u); }
  double normal_flux(const Point3& x, const Point3& normal, double u) const override;
  double normal_flux_derivative(const Point3& x, const Point3& normal, double u) const override;

  const FoliatedFluxSpec& spec() const { return spec_; }

 private:
  // phi'(x.a) N.(n x a), the u-independent part of both normal quantities.
  double geometric_factor(const Point3& x, const Point3& normal) const;

  FoliatedFluxSpec spec_;
};

/// h(x,u) = x1^2 f1(u) on {x1 <= 0}, zero elsewhere. The flux vanishes
/// identically on {x1 > 0}.
class ConfinedX1Flux final : public FluxModel {
 public:
  explicit ConfinedX1Flux(ScalarFunction f1) : f1_(std::move(f1)) {}

  std::string name() const override { return "confined-x1"; }
  double h(const Point3& x, double u) const override { return x.x() <= 0.0 ? x.x() * x.x() * f1_(u) : 0.0; }
  double normal_flux(const Point3& x, const Point3& normal, double u) const override;
  double normal_flux_derivative(const Point3& x, const Point3& normal, double u) const override;

 private:
  ScalarFunction f1_;
};

FluxModelPtr make_foliated(FoliatedFluxSpec spec);
FluxModelPtr make_confined_x1(ScalarFunction f1 = ScalarFunction::burgers());

/// Built-in models: "foliated-x1", "foliated-diag", "confined-x1".
FluxModelPtr make_model(const std::string& key);
std::vector<std::string> model_keys();

/// Outward flux through an oriented interface: -(h(e2,u) - h(e1,u)).
inline double edge_flux_H(const FluxModel& m, const Point3& e1, const Point3& e2, double u) {
  return -(m.h(e2, u) - m.h(e1, u));
}

struct EdgeSpeeds {
  double a_in = 0.0;
  double a_out = 0.0;
};

/// One-sided local speeds seen from the cell owning `normal` (outward).
inline EdgeSpeeds local_speeds(const FluxModel& m, const Point3& midpoint, const Point3& normal, double u_own,
                               double u_nb) {
  const double d_own = m.normal_flux_derivative(midpoint, normal, u_own);
  const double d_nb = m.normal_flux_derivative(midpoint, normal, u_nb);
  return {-std::min({d_own, d_nb, 0.0}), std::max({d_own, d_nb, 0.0})};
}

/// Speeds for a grid edge from the viewpoint of its left cell.
inline EdgeSpeeds local_speeds(const FluxModel& m, const Edge& edge, double u_own, double u_nb) {
  return local_speeds(m, edge.midpoint_xyz, edge.normal_from_left, u_own, u_nb);
}

/// Largest per-cell closed-loop sum of H for the constant state u_bar,
/// scaled by max(1, max vertex |h|). Zero up to roundoff on a consistent grid.
double discrete_divergence_residual(const FluxModel& m, const SphereGrid& g, double u_bar);

/// Largest |h(v, u_bar)| over all grid vertices.
double max_vertex_potential(const FluxModel& m, const SphereGrid& g, double u_bar);

}  // namespace cusphere
