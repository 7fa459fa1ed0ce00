#include "cusphere/flux_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace cusphere;
using std::numbers::pi;

namespace {

// Only supplies the potential; normal flux and speed come from the base
// class finite differences.
class BlackBoxDiag final : public FluxModel {
 public:
  std::string name() const override { return "black-box"; }
  double h(const Point3& x, double u) const override { return (x.x() + x.y() + x.z()) * 0.5 * u * u; }
};

Point3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  return Point3(d(rng), d(rng), d(rng)).normalized();
}

Point3 random_tangent(const Point3& x, std::mt19937_64& rng) {
  const Point3 v = random_unit(rng);
  return (v - v.dot(x) * x).normalized();
}

double central_difference_in_u(const FluxModel& m, const Point3& x, const Point3& normal, double u) {
  const double du = 1e-5;
  return (m.normal_flux(x, normal, u + du) - m.normal_flux(x, normal, u - du)) / (2 * du);
}

}  // namespace

TEST_CASE("foliated potentials of the built-in models") {
  const auto x1 = make_model("foliated-x1");
  const auto diag = make_model("foliated-diag");
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Point3 x = random_unit(rng);
    const double u = std::uniform_real_distribution<double>(-2, 2)(rng);
    CHECK(x1->h(x, u) == doctest::Approx(x.x() * u * u / 2).epsilon(1e-15));
    CHECK(diag->h(x, u) == doctest::Approx((x.x() + x.y() + x.z()) * u * u / 2).epsilon(1e-15));
  }
  CHECK(model_keys() == std::vector<std::string>{"foliated-x1", "foliated-diag", "confined-x1"});
  CHECK_THROWS_AS(make_model("nope"), ConfigError);
}

TEST_CASE("a zero flux model has zero edge flux and zero speeds") {
  const auto zero = make_foliated({Point3(1, 2, 3), ScalarFunction::identity(),
                                   {[](double) { return 0.0; }, [](double) { return 0.0; }}, "zero"});
  const SphereGrid g = build_grid(12, 24, 0.5);
  for (const Edge& e : g.edges) {
    CHECK(edge_flux_H(*zero, e.e1, e.e2, 0.7) == 0.0);
    if (e.degenerate()) continue;
    const EdgeSpeeds s = local_speeds(*zero, e, -0.4, 1.3);
    CHECK(s.a_in == 0.0);
    CHECK(s.a_out == 0.0);
  }
}

TEST_CASE("confined potential") {
  const auto m = make_confined_x1();
  CHECK(m->h(Point3(-1, 0, 0), 1.0) == 0.5);
  CHECK(m->h(Point3(0.3, 0.9, std::sqrt(1 - 0.09 - 0.81)), 1.7) == 0.0);
  CHECK(m->h(Point3(0.3, 0.9, 0.1), -3.0) == 0.0);
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    Point3 x = random_unit(rng);
    x.x() = std::abs(x.x()) + 1e-3;
    x.normalize();
    const Point3 n = random_tangent(x, rng);
    CHECK(m->normal_flux(x, n, 0.8) == 0.0);
    CHECK(m->normal_flux_derivative(x, n, 0.8) == 0.0);
  }
  // h and its x1-derivative both vanish at x1 = 0.
  CHECK(m->h(Point3(0, 1, 0), 2.0) == 0.0);
  CHECK(m->normal_flux(Point3(0, 1, 0), Point3(0, 0, 1), 2.0) == 0.0);
}

TEST_CASE("edge flux examples") {
  const auto m = make_model("foliated-x1");
  CHECK(edge_flux_H(*m, Point3(1, 0, 0), Point3(0, 0, 1), 1.0) == doctest::Approx(0.5).epsilon(1e-15));

  for (const auto& key : model_keys()) {
    const auto model = make_model(key);
    for (double u : {-1.0, 0.0, 0.37, 2.0}) {
      CHECK(edge_flux_H(*model, Point3(0, 0, 1), Point3(0, 0, 1), u) == 0.0);
      CHECK(edge_flux_H(*model, Point3(0, 0, -1), Point3(0, 0, -1), u) == 0.0);
    }
  }

  // Meridian lambda = 0 from phi = pi/6 to pi/3, u = 2.
  const Point3 e1 = to_cartesian(Spherical(0, pi / 6));
  const Point3 e2 = to_cartesian(Spherical(0, pi / 3));
  const double H = edge_flux_H(*m, e1, e2, 2.0);
  CHECK(std::abs(H - 0.732050807568877293) <= 1e-14);

  // Outward flux integral of F = n x grad h along the arc, nu = tau x n,
  // by composite Simpson with 10^4 intervals.
  const int n = 10000;
  const double a = pi / 6, b = pi / 3, step = (b - a) / n;
  const Point3 grad_h(2.0, 0.0, 0.0);  // grad of x1 * u^2 / 2 at u = 2
  double integral = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double phi = a + k * step;
    const Point3 x = to_cartesian(Spherical(0, phi));
    const Point3 tau(-std::sin(phi), 0.0, std::cos(phi));
    const Point3 nu = tau.cross(x);
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    integral += w * x.cross(grad_h).dot(nu);
  }
  integral *= step / 3.0;
  CHECK(std::abs(integral - H) <= 1e-10);
}

TEST_CASE("edge flux is exactly antisymmetric in its endpoints") {
  std::mt19937_64 rng(9);
  for (const auto& key : model_keys()) {
    const auto m = make_model(key);
    for (int k = 0; k < 500; ++k) {
      const Point3 a = random_unit(rng), b = random_unit(rng);
      const double u = std::uniform_real_distribution<double>(-2, 2)(rng);
      CHECK(edge_flux_H(*m, a, b, u) == -edge_flux_H(*m, b, a, u));
    }
  }
}

TEST_CASE("local speeds") {
  const auto m = make_model("foliated-x1");
  // Equatorial meridian edge at lambda = pi/2 with normal i_lambda.
  const Point3 mid(0, 1, 0);
  const Point3 normal(-1, 0, 0);
  for (double u : {-1.0, 0.3, 2.0}) {
    const double d = m->normal_flux_derivative(mid, normal, u);
    // N . F(M, u) = N . (n x grad h), grad h = (u^2/2, 0, 0), written out directly.
    auto nf = [&](double v) { return normal.dot(mid.cross(Point3(0.5 * v * v, 0, 0))); };
    const double fd = (nf(u + 1e-6) - nf(u - 1e-6)) / 2e-6;
    CHECK(std::abs(d - fd) <= 1e-8);
  }

  // Opposite states on an edge with a nonzero geometric factor.
  const Point3 x = to_cartesian(Spherical(0.4, 0.3));
  const auto frame = tangent_frame(Spherical(0.4, 0.3));
  const double g = m->normal_flux_derivative(x, frame.i_phi, 1.0);
  REQUIRE(std::abs(g) > 1e-3);
  const EdgeSpeeds s = local_speeds(*m, x, frame.i_phi, 0.6, -0.6);
  CHECK(s.a_in == doctest::Approx(0.6 * std::abs(g)));
  CHECK(s.a_out == doctest::Approx(0.6 * std::abs(g)));

  std::mt19937_64 rng(13);
  for (const auto& key : model_keys()) {
    const auto model = make_model(key);
    for (int k = 0; k < 500; ++k) {
      const Point3 p = random_unit(rng);
      const Point3 t = random_tangent(p, rng);
      std::uniform_real_distribution<double> du(-2, 2);
      const EdgeSpeeds sp = local_speeds(*model, p, t, du(rng), du(rng));
      CHECK(sp.a_in >= 0.0);
      CHECK(sp.a_out >= 0.0);
    }
  }
}

TEST_CASE("analytic speed derivative agrees with finite differences in u") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> du(-2, 2);
  for (const auto& key : model_keys()) {
    const auto m = make_model(key);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const Point3 x = random_unit(rng);
      const Point3 t = random_tangent(x, rng);
      const double u = du(rng);
      worst = std::max(worst, std::abs(m->normal_flux_derivative(x, t, u) - central_difference_in_u(*m, x, t, u)));
    }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("black-box potentials fall back to finite differences") {
  const BlackBoxDiag box;
  const auto diag = make_model("foliated-diag");
  std::mt19937_64 rng(19);
  for (int k = 0; k < 300; ++k) {
    const Point3 x = random_unit(rng);
    const Point3 t = random_tangent(x, rng);
    const double u = std::uniform_real_distribution<double>(-2, 2)(rng);
    CHECK(std::abs(box.normal_flux(x, t, u) - diag->normal_flux(x, t, u)) <= 1e-7);
    CHECK(std::abs(box.normal_flux_derivative(x, t, u) - diag->normal_flux_derivative(x, t, u)) <= 1e-5);
  }
}

TEST_CASE("scalar function derivatives are consistent") {
  for (const ScalarFunction& f : {ScalarFunction::identity(), ScalarFunction::burgers()}) {
    for (double s = -2.0; s <= 2.0; s += 0.173) {
      const double fd = (f(s + 1e-5) - f(s - 1e-5)) / 2e-5;
      CHECK(std::abs(fd - f.derivative(s)) <= 1e-6);
    }
  }
}

TEST_CASE("discrete divergence residual telescopes to zero") {
  const SphereGrid g = build_grid(48, 96, 0.5);
  for (const auto& key : model_keys()) {
    const auto m = make_model(key);
    for (double u : {-1.0, 0.0, 0.37, 0.7, 2.0}) CHECK(discrete_divergence_residual(*m, g, u) <= 1e-13);
  }
  const auto custom = make_foliated({Point3(0.3, -1.2, 0.8), {[](double s) { return std::sin(s); },
                                                              [](double s) { return std::cos(s); }},
                                     ScalarFunction::burgers(), "custom"});
  CHECK(discrete_divergence_residual(*custom, g, 1.3) <= 1e-13);
}

TEST_CASE("a flipped edge breaks the discrete divergence") {
  SphereGrid g = build_grid(12, 24, 0.5);
  const auto m = make_model("foliated-x1");
  int target = -1;
  for (const Edge& e : g.edges) {
    if (!e.degenerate() && std::abs(m->h(e.e1, 1.0) - m->h(e.e2, 1.0)) > 1e-2) {
      target = e.id;
      break;
    }
  }
  REQUIRE(target >= 0);
  std::swap(g.edges[target].e1, g.edges[target].e2);
  const double r = discrete_divergence_residual(*m, g, 1.0);
  CHECK(r > 1e-3);
  CHECK(r <= 2 * max_vertex_potential(*m, g, 1.0));
}

TEST_CASE("potentials are finite at all grid vertices") {
  const SphereGrid g = build_grid(24, 48, 0.5);
  for (const auto& key : model_keys()) {
    const auto m = make_model(key);
    for (const Edge& e : g.edges) {
      CHECK(std::isfinite(m->h(e.e1, 1.5)));
      CHECK(std::isfinite(m->h(e.e2, -1.5)));
    }
  }
}

TEST_CASE("foliated steady data make h constant on level sets") {
  const Point3 a(1, 1, 1);
  const auto m = make_model("foliated-diag");
  auto u0 = [](double s) { return 0.2 + 0.3 * std::sin(2 * s); };
  const Point3 e1 = Point3(1, -1, 0).normalized();
  const Point3 e2 = a.normalized().cross(e1);
  for (double c : {-1.2, -0.3, 0.0, 0.5, 1.4}) {
    const Point3 base = (c / 3.0) * a;
    const double r = std::sqrt(1.0 - c * c / 3.0);
    const Point3 x0 = base + r * e1;
    const double h0 = m->h(x0, u0(x0.dot(a)));
    for (int k = 1; k < 64; ++k) {
      const double t = 2 * pi * k / 64;
      const Point3 x = base + r * (std::cos(t) * e1 + std::sin(t) * e2);
      CHECK(std::abs(m->h(x, u0(x.dot(a))) - h0) <= 1e-13);
    }
  }
}
