#include "cusphere/grid.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace cusphere {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = two_pi_v<double>;
constexpr double kHalfPi = half_pi_v<double>;

// Latitudes of the n_phi + 1 circles bounding the bands. Computed relative
// to the equator so the layout is mirror-symmetric and the equator is exact.
std::vector<double> circle_latitudes(int n_phi) {
  const double dphi = kPi / n_phi;
  std::vector<double> phi(n_phi + 1);
  for (int c = 0; c <= n_phi; ++c) phi[c] = (c - n_phi / 2) * dphi;
  phi.front() = -kHalfPi;
  phi.back() = kHalfPi;
  return phi;
}

// Longitude of grid line i out of n. Coarse and fine bands that share a line
// evaluate to the same double: (2pi*2i)/(2n) == (2pi*i)/n exactly.
double grid_longitude(int i, int n) { return kTwoPi * static_cast<double>(((i % n) + n) % n) / n; }

Point3 vertex(const std::vector<double>& circles, int c, int i, int n) {
  if (c == 0) return Point3(0, 0, -1);
  if (c + 1 == static_cast<int>(circles.size())) return Point3(0, 0, 1);
  return to_cartesian(Spherical(grid_longitude(i, n), circles[c]));
}

std::vector<int> band_counts(int n_phi, int n_lambda_eq, double threshold) {
  const int half = n_phi / 2;
  const double dphi = kPi / n_phi;
  std::vector<int> per_level(half);  // indexed by distance from the equator
  int n = n_lambda_eq;
  for (int j = 0; j < half; ++j) {
    const bool pole_band = (j == half - 1);
    if (j > 0 && !pole_band && threshold > 0.0) {
      const double far_cos = std::cos((j + 1) * dphi);
      const double width = static_cast<double>(n_lambda_eq) / n * far_cos;
      if (width < threshold) {
        if (n % 2 != 0 || n / 2 < 2) {
          std::ostringstream msg;
          msg << "n_lambda_eq=" << n_lambda_eq << " cannot be halved again at band " << j
              << " from the equator; choose a value divisible by a larger power of two";
          throw ConfigError(msg.str());
        }
        n /= 2;
      }
    }
    per_level[j] = n;
  }
  std::vector<int> counts(n_phi);
  for (int j = 0; j < half; ++j) {
    counts[half + j] = per_level[j];
    counts[half - 1 - j] = per_level[j];
  }
  return counts;
}

}  // namespace

Spherical cell_center(double lambda1, double lambda2, double phi1, double phi2) {
  const double denom = std::sin(phi2) - std::sin(phi1);
  if (!(phi2 > phi1) || denom == 0.0) {
    throw GeometryError("degenerate cell: phi1 == phi2");
  }
  const double phi = (phi2 * std::sin(phi2) - phi1 * std::sin(phi1) + std::cos(phi2) - std::cos(phi1)) / denom;
  return Spherical(0.5 * (lambda1 + lambda2), std::clamp(phi, phi1, phi2));
}

SphereGrid build_grid(int n_phi, int n_lambda_eq, double threshold) {
  if (n_phi < 2 || n_phi % 2 != 0) throw ConfigError("n_phi must be a positive even integer");
  if (n_lambda_eq < 2) throw ConfigError("n_lambda_eq must be at least 2");
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ConfigError("coarsening threshold must lie in [0, 1]");
  }

  SphereGrid g;
  g.coarsening_threshold = threshold;
  g.n_lambda_eq = n_lambda_eq;
  const auto circles = circle_latitudes(n_phi);
  const auto counts = band_counts(n_phi, n_lambda_eq, threshold);

  int next_cell = 0;
  for (int b = 0; b < n_phi; ++b) {
    g.band_layout.push_back({circles[b], circles[b + 1], counts[b], next_cell});
    next_cell += counts[b];
  }

  g.cells.reserve(next_cell);
  for (int b = 0; b < n_phi; ++b) {
    const Band& band = g.band_layout[b];
    const double width = kTwoPi / band.n_lambda;
    for (int i = 0; i < band.n_lambda; ++i) {
      Cell c;
      c.id = static_cast<int>(g.cells.size());
      c.band = b;
      c.index_in_band = i;
      c.lambda1 = grid_longitude(i, band.n_lambda);
      c.lambda2 = c.lambda1 + width;
      c.phi1 = band.phi1;
      c.phi2 = band.phi2;
      c.area = width * (std::sin(c.phi2) - std::sin(c.phi1));
      c.center = cell_center(c.lambda1, c.lambda2, c.phi1, c.phi2);
      c.center_xyz = to_cartesian(c.center);
      g.cells.push_back(std::move(c));
    }
  }

  const std::size_t n_cells = g.cells.size();
  std::vector<std::vector<int>> south_side(n_cells), north_side(n_cells);
  std::vector<int> east_side(n_cells, kNoCell), west_side(n_cells, kNoCell);

  auto add_edge = [&g](Edge e) {
    e.id = static_cast<int>(g.edges.size());
    g.edges.push_back(e);
    return e.id;
  };

  // Meridian sides; the west cell owns the edge and walks it south to north.
  for (int b = 0; b < n_phi; ++b) {
    const Band& band = g.band_layout[b];
    const int n = band.n_lambda;
    for (int i = 0; i < n; ++i) {
      const int west = band.first_cell + (i + n - 1) % n;
      const int east = band.first_cell + i;
      Edge e{};
      e.kind = EdgeKind::MeridianArc;
      e.e1 = vertex(circles, b, i, n);
      e.e2 = vertex(circles, b + 1, i, n);
      e.midpoint = Spherical(grid_longitude(i, n), 0.5 * (band.phi1 + band.phi2));
      e.midpoint_xyz = to_cartesian(e.midpoint);
      e.length = band.phi2 - band.phi1;
      e.left_cell = west;
      e.right_cell = east;
      e.normal_from_left = tangent_frame(e.midpoint).i_lambda;
      const int id = add_edge(e);
      east_side[west] = id;
      west_side[east] = id;
    }
  }

  // Latitude sides on interior circles. One edge per segment of the finer
  // band, so a coarse cell facing two fine cells gets two edges. The south
  // cell owns the edge and walks it east to west.
  for (int c = 1; c < n_phi; ++c) {
    const Band& sb = g.band_layout[c - 1];
    const Band& nb = g.band_layout[c];
    const int nf = std::max(sb.n_lambda, nb.n_lambda);
    const double phi = circles[c];
    const double seg = kTwoPi / nf;
    for (int k = 0; k < nf; ++k) {
      const int s = sb.first_cell + static_cast<int>(static_cast<long>(k) * sb.n_lambda / nf);
      const int nn = nb.first_cell + static_cast<int>(static_cast<long>(k) * nb.n_lambda / nf);
      Edge e{};
      e.kind = EdgeKind::LatitudeArc;
      e.e1 = vertex(circles, c, k + 1, nf);
      e.e2 = vertex(circles, c, k, nf);
      e.midpoint = Spherical(kTwoPi * (k + 0.5) / nf, phi);
      e.midpoint_xyz = to_cartesian(e.midpoint);
      e.length = seg * std::cos(phi);
      e.left_cell = s;
      e.right_cell = nn;
      e.normal_from_left = tangent_frame(e.midpoint).i_phi;
      const int id = add_edge(e);
      north_side[s].push_back(id);
      south_side[nn].push_back(id);
    }
  }

  // Degenerate pole sides.
  for (const bool north : {false, true}) {
    const Band& band = g.band_layout[north ? n_phi - 1 : 0];
    const Point3 pole(0, 0, north ? 1 : -1);
    for (int i = 0; i < band.n_lambda; ++i) {
      const Cell& cell = g.cells[band.first_cell + i];
      Edge e{};
      e.kind = EdgeKind::LatitudeArc;
      e.e1 = pole;
      e.e2 = pole;
      e.midpoint = Spherical(cell.center.lambda, north ? kHalfPi : -kHalfPi);
      e.midpoint_xyz = pole;
      e.length = 0.0;
      e.left_cell = cell.id;
      e.right_cell = kNoCell;
      e.normal_from_left = Point3::Zero();
      const int id = add_edge(e);
      (north ? north_side : south_side)[cell.id].push_back(id);
    }
  }

  for (std::size_t j = 0; j < n_cells; ++j) {
    auto& ids = g.cells[j].edge_ids;
    ids = south_side[j];
    ids.push_back(east_side[j]);
    ids.insert(ids.end(), north_side[j].rbegin(), north_side[j].rend());
    ids.push_back(west_side[j]);
  }

  for (const Cell& c : g.cells) g.total_area += c.area;
  return g;
}

double relative_band_width(const SphereGrid& g, int band) {
  const Band& b = g.band_layout[band];
  const bool pole_band = (band == 0 || band + 1 == static_cast<int>(g.band_layout.size()));
  double phi = std::max(std::abs(b.phi1), std::abs(b.phi2));
  if (pole_band) phi = std::min(std::abs(b.phi1), std::abs(b.phi2));
  return static_cast<double>(g.n_lambda_eq) / b.n_lambda * std::cos(phi);
}

bool ValidationReport::mentions_edge(int id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [id](const Violation& v) { return v.target == Violation::Target::Edge && v.id == id; });
}

bool ValidationReport::mentions_cell(int id) const {
  return std::any_of(violations.begin(), violations.end(),
                     [id](const Violation& v) { return v.target == Violation::Target::Cell && v.id == id; });
}

ValidationReport validate_grid(const SphereGrid& g) {
  ValidationReport rep;
  auto fail = [&rep](Violation::Target t, int id, std::string msg) { rep.violations.push_back({t, id, std::move(msg)}); };
  using T = Violation::Target;
  const int n_cells = static_cast<int>(g.cells.size());
  const int n_edges = static_cast<int>(g.edges.size());

  double area = 0.0;
  for (const Cell& c : g.cells) area += c.area;
  if (std::abs(area - 4.0 * kPi) > 1e-12 * 4.0 * kPi) fail(T::Grid, 0, "total area differs from 4pi");
  if (std::abs(g.total_area - area) > 1e-12 * 4.0 * kPi) fail(T::Grid, 0, "stored total_area inconsistent");

  for (std::size_t b = 0; b + 1 < g.band_layout.size(); ++b) {
    const int n0 = g.band_layout[b].n_lambda, n1 = g.band_layout[b + 1].n_lambda;
    const int lo = std::min(n0, n1), hi = std::max(n0, n1);
    if (hi != lo && hi != 2 * lo) fail(T::Grid, static_cast<int>(b), "band count does not change by exactly 2");
  }

  // Occurrence count of every edge across all cell lists.
  std::vector<std::vector<int>> owners(n_edges);
  for (const Cell& c : g.cells) {
    for (int e : c.edge_ids) {
      if (e < 0 || e >= n_edges) {
        fail(T::Cell, c.id, "edge id out of range");
        continue;
      }
      owners[e].push_back(c.id);
    }
  }

  for (const Cell& c : g.cells) {
    if (!(c.lambda1 < c.lambda2) || !(c.phi1 < c.phi2)) fail(T::Cell, c.id, "inverted bounds");
    const double a = (c.lambda2 - c.lambda1) * (std::sin(c.phi2) - std::sin(c.phi1));
    if (std::abs(a - c.area) > 1e-14 * std::abs(a)) fail(T::Cell, c.id, "area mismatch");
    try {
      const Spherical ctr = cell_center(c);
      if (std::abs(wrap_difference(ctr.lambda - c.center.lambda)) > 1e-14 || std::abs(ctr.phi - c.center.phi) > 1e-14) {
        fail(T::Cell, c.id, "center mismatch");
      }
    } catch (const GeometryError&) {
      fail(T::Cell, c.id, "degenerate latitude bounds");
    }
    if (c.edge_ids.size() < 3) fail(T::Cell, c.id, "fewer than three sides");
    const bool pole_cell = (std::abs(c.phi1) == kHalfPi || std::abs(c.phi2) == kHalfPi);
    int degenerate = 0;
    for (int e : c.edge_ids) {
      if (e >= 0 && e < n_edges && g.edges[e].degenerate()) ++degenerate;
    }
    if (degenerate != (pole_cell ? 1 : 0)) fail(T::Cell, c.id, "wrong number of degenerate pole sides");

    // The oriented sides must chain into a closed loop.
    const std::size_t m = c.edge_ids.size();
    for (std::size_t k = 0; k < m; ++k) {
      const int ea = c.edge_ids[k], eb = c.edge_ids[(k + 1) % m];
      if (ea < 0 || ea >= n_edges || eb < 0 || eb >= n_edges) continue;
      const auto [a1, a2] = g.oriented_endpoints(ea, c.id);
      const auto [b1, b2] = g.oriented_endpoints(eb, c.id);
      if ((a2 - b1).norm() > 1e-14) {
        fail(T::Cell, c.id, "boundary does not close between sides");
        fail(T::Edge, ea, "endpoint mismatch with next side of cell " + std::to_string(c.id));
      }
    }
  }

  for (const Edge& e : g.edges) {
    if (!(e.length >= 0.0)) fail(T::Edge, e.id, "negative length");
    if (e.left_cell < 0 || e.left_cell >= n_cells) {
      fail(T::Edge, e.id, "invalid left cell");
      continue;
    }
    const auto& own = owners[e.id];
    if (e.degenerate()) {
      if (e.length != 0.0 || e.e1 != e.e2) fail(T::Edge, e.id, "degenerate edge with nonzero extent");
      if (own.size() != 1 || own[0] != e.left_cell) fail(T::Edge, e.id, "degenerate edge adjacency broken");
      continue;
    }
    if (e.right_cell < 0 || e.right_cell >= n_cells || e.right_cell == e.left_cell) {
      fail(T::Edge, e.id, "edge needs two distinct adjacent cells");
      continue;
    }
    const bool adj_ok = own.size() == 2 &&
                        ((own[0] == e.left_cell && own[1] == e.right_cell) || (own[0] == e.right_cell && own[1] == e.left_cell));
    if (!adj_ok) fail(T::Edge, e.id, "adjacency not symmetric with cell edge lists");

    const Spherical s1 = to_spherical(e.e1), s2 = to_spherical(e.e2);
    double expected = 0.0;
    if (e.kind == EdgeKind::MeridianArc) {
      expected = std::abs(s2.phi - s1.phi);
    } else {
      expected = std::abs(wrap_difference(s1.lambda - s2.lambda)) * std::cos(e.midpoint.phi);
    }
    if (std::abs(expected - e.length) > 1e-13) fail(T::Edge, e.id, "length mismatch");

    const Point3& nu = e.normal_from_left;
    const Point3 chord = e.e2 - e.e1;
    if (std::abs(nu.norm() - 1.0) > 1e-13) fail(T::Edge, e.id, "normal not unit");
    if (std::abs(nu.dot(e.midpoint_xyz)) > 1e-13) fail(T::Edge, e.id, "normal not tangent");
    if (std::abs(nu.dot(chord)) > 1e-13 * chord.norm()) fail(T::Edge, e.id, "normal not orthogonal to edge");
    // Traversal tangent n x nu must point from e1 to e2.
    if (e.midpoint_xyz.cross(nu).dot(chord) <= 0.0) fail(T::Edge, e.id, "orientation reversed");
  }
  return rep;
}

void dump_grid(const SphereGrid& g, std::ostream& os) {
  os << std::setprecision(17);
  os << "# bands: band phi1 phi2 n_lambda first_cell relative_width\n";
  for (std::size_t b = 0; b < g.band_layout.size(); ++b) {
    const Band& band = g.band_layout[b];
    os << b << ' ' << band.phi1 << ' ' << band.phi2 << ' ' << band.n_lambda << ' ' << band.first_cell << ' '
       << relative_band_width(g, static_cast<int>(b)) << '\n';
  }
  os << "# cells: id band index lambda1 lambda2 phi1 phi2 area sides\n";
  for (const Cell& c : g.cells) {
    os << c.id << ' ' << c.band << ' ' << c.index_in_band << ' ' << c.lambda1 << ' ' << c.lambda2 << ' ' << c.phi1
       << ' ' << c.phi2 << ' ' << c.area << ' ' << c.edge_ids.size() << '\n';
  }
}

}  // namespace cusphere
