#include "cusphere/cases.hpp"

#include "cusphere/grid.hpp"

#include <algorithm>
#include <cctype>

namespace cusphere {

namespace initial_data {

double single_jump_x1(const Point3& x, double gamma) {
  const double x1 = x.x();
  if (x1 <= 0.5) return gamma * x1 * x1 * x1;
  return -gamma * x1 * x1 / (2.0 * x1 + 1.0);
}

double double_jump_x1(const Point3& x, double gamma) {
  const double x1 = x.x();
  if (x1 <= -0.5) return gamma * x1 * x1 * x1 * x1;
  if (x1 < 0.5) return 0.5 * gamma * x1 * x1 * x1;
  return -0.25 * gamma * x1 * x1;
}

double cap_single_jump(const Point3& x) {
  const double theta = x.sum();
  return (theta >= 0.0 ? 0.1 : -0.1) / (theta + 2.0);
}

double cap_double_jump(const Point3& x) {
  const double theta = x.sum();
  if (theta >= 0.5) return 0.2 * theta * theta * theta;
  if (theta <= -0.5) return 0.1 * theta * theta;
  return -0.025;
}

double confined_evolving(const Point3& x) {
  return x.x() <= 0.0 ? 0.1 * (1.0 + x.y() * x.y()) * x.x() : 0.0;
}

double confined_steady(const Point3& x) { return x.x() <= 0.0 ? 0.1 * x.x() : 0.0; }

}  // namespace initial_data

std::vector<CaseSpec> case_catalog() {
  using namespace initial_data;
  std::vector<CaseSpec> cases;

  auto steady = [](PointFunction u) { return std::optional<PointFunction>(std::move(u)); };

  for (const auto& [name, gamma] : {std::pair{"T1", 0.1}, std::pair{"T2", 0.5}}) {
    const double gm = gamma;
    PointFunction u = [gm](const Point3& x) { return single_jump_x1(x, gm); };
    cases.push_back({name, "foliated-x1", "single closed discontinuity in x1", u, steady(u), 96, 192, 0.04, 5.0, gm});
  }
  for (const auto& [name, gamma] : {std::pair{"T3", 0.1}, std::pair{"T4", 0.5}}) {
    const double gm = gamma;
    PointFunction u = [gm](const Point3& x) { return double_jump_x1(x, gm); };
    cases.push_back({name, "foliated-x1", "two closed discontinuities in x1", u, steady(u), 96, 192, 0.04, 5.0, gm});
  }
  cases.push_back({"T5", "foliated-diag", "jump across theta = 0", cap_single_jump, steady(cap_single_jump), 96, 192,
                   0.02, 5.0, 0.0});
  cases.push_back({"T6", "foliated-diag", "jumps across theta = +-0.5", cap_double_jump, steady(cap_double_jump), 96,
                   192, 0.02, 5.0, 0.0});
  cases.push_back({"T7", "confined-x1", "confined, evolving inside x1 <= 0", confined_evolving, std::nullopt, 96, 192,
                   0.04, 5.0, 0.0});
  cases.push_back({"T8", "confined-x1", "confined, steady inside x1 <= 0", confined_steady, steady(confined_steady), 96,
                   192, 0.04, 5.0, 0.0});
  return cases;
}

CaseSpec find_case(const std::string& name) {
  std::string key = name;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto& c : case_catalog()) {
    if (c.name == key) return c;
  }
  throw ConfigError("unknown case '" + name + "' (expected T1..T8)");
}

}  // namespace cusphere
