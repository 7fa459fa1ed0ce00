#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cusphere {

template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;

/// Cartesian point on (or near) the unit sphere.
using Point3 = Vector3<double>;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
constexpr Scalar two_pi_v = Scalar(2) * std::numbers::pi_v<Scalar>;
template <typename Scalar>
constexpr Scalar half_pi_v = std::numbers::pi_v<Scalar> / Scalar(2);

/// Maps any longitude into [0, 2pi).
template <typename Scalar>
Scalar normalize_longitude(Scalar lambda) {
  Scalar r = std::fmod(lambda, two_pi_v<Scalar>);
  if (r < Scalar(0)) r += two_pi_v<Scalar>;
  if (r >= two_pi_v<Scalar>) r = Scalar(0);
  return r;
}

/// Signed longitude difference wrapped into (-pi, pi].
template <typename Scalar>
Scalar wrap_difference(Scalar d) {
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  Scalar r = std::fmod(d + pi, two_pi_v<Scalar>);
  if (r <= Scalar(0)) r += two_pi_v<Scalar>;
  return r - pi;
}

/// Longitude/latitude pair. Longitude is kept in [0, 2pi), latitude is
/// clamped to the closed interval [-pi/2, pi/2].
template <typename Scalar>
struct SphericalCoord {
  Scalar lambda{0};
  Scalar phi{0};

  SphericalCoord() = default;
  SphericalCoord(Scalar lon, Scalar lat) : lambda(normalize_longitude(lon)), phi(lat) {
    if (!(phi >= -half_pi_v<Scalar> && phi <= half_pi_v<Scalar>)) {
      throw GeometryError("latitude out of range: " + std::to_string(double(phi)));
    }
  }

  bool at_pole() const { return std::abs(phi) == half_pi_v<Scalar>; }
};

using Spherical = SphericalCoord<double>;

/// Position on the unit sphere; this is also the outward unit normal n(x).
/// Pole coordinates map to the exact axis points.
template <typename Scalar>
Vector3<Scalar> to_cartesian(const SphericalCoord<Scalar>& c) {
  if (c.at_pole()) return Vector3<Scalar>(0, 0, c.phi > 0 ? 1 : -1);
  const Scalar cp = std::cos(c.phi);
  return Vector3<Scalar>(cp * std::cos(c.lambda), cp * std::sin(c.lambda), std::sin(c.phi));
}

/// Inverse of to_cartesian for points on the sphere (pole -> lambda = 0).
template <typename Scalar>
SphericalCoord<Scalar> to_spherical(const Vector3<Scalar>& x) {
  const Scalar r = x.norm();
  const Scalar z = std::clamp(x.z() / r, Scalar(-1), Scalar(1));
  if (x.x() == Scalar(0) && x.y() == Scalar(0)) return {Scalar(0), z > 0 ? half_pi_v<Scalar> : -half_pi_v<Scalar>};
  return {std::atan2(x.y(), x.x()), std::asin(z)};
}

template <typename Scalar>
struct TangentFrame {
  Vector3<Scalar> i_lambda;  // east
  Vector3<Scalar> i_phi;     // north
  Vector3<Scalar> n;         // outward normal
};

/// Local east/north/up frame. Singular at the poles.
template <typename Scalar>
TangentFrame<Scalar> tangent_frame(const SphericalCoord<Scalar>& c) {
  if (c.at_pole()) throw GeometryError("tangent frame is singular at the poles");
  const Scalar sl = std::sin(c.lambda), cl = std::cos(c.lambda);
  const Scalar sp = std::sin(c.phi), cp = std::cos(c.phi);
  return {Vector3<Scalar>(-sl, cl, 0), Vector3<Scalar>(-sp * cl, -sp * sl, cp), Vector3<Scalar>(cp * cl, cp * sl, sp)};
}

template <typename Derived1, typename Derived2>
auto cross(const Eigen::MatrixBase<Derived1>& a, const Eigen::MatrixBase<Derived2>& b) {
  return a.cross(b).eval();
}

}  // namespace cusphere
