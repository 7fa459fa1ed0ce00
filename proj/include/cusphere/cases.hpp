#pragma once

#include "cusphere/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cusphere {

/// One reproducible experiment: flux, initial data, grid and time stepping.
struct CaseSpec {
  std::string name;  // "T1" ... "T8"
  std::string flux;  // model registry key
  std::string description;
  PointFunction initial_u;
  std::optional<PointFunction> exact_u;  // steady cases only
  int n_phi = 96;
  int n_lambda_eq = 192;
  double dt = 0.04;
  double t_end = 5.0;
  double gamma = 0.0;  // amplitude, 0 when the case has none
};

namespace initial_data {

/// gamma x1^3 on [-1, 0.5], -gamma x1^2 / (2 x1 + 1) on (0.5, 1].
double single_jump_x1(const Point3& x, double gamma);
/// gamma x1^4, 0.5 gamma x1^3, -0.25 gamma x1^2 on three x1 ranges.
double double_jump_x1(const Point3& x, double gamma);
/// +-0.1 / (theta + 2) split at theta = x1 + x2 + x3 = 0.
double cap_single_jump(const Point3& x);
/// 0.2 theta^3, -0.025, 0.1 theta^2 split at theta = +-0.5.
double cap_double_jump(const Point3& x);
/// 0.1 (1 + x2^2) x1 on {x1 <= 0}, zero elsewhere.
double confined_evolving(const Point3& x);
/// 0.1 x1 on {x1 <= 0}, zero elsewhere.
double confined_steady(const Point3& x);

}  // namespace initial_data

std::vector<CaseSpec> case_catalog();

/// Case by name, case-insensitive ("t3" == "T3").
CaseSpec find_case(const std::string& name);

}  // namespace cusphere
