#pragma once

#include "cusphere/sphere_geometry.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace cusphere {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kNoCell = -1;

enum class EdgeKind { LatitudeArc, MeridianArc };

/// One latitude band of the grid: [phi1, phi2] split into n_lambda equal
/// longitude intervals starting at lambda = 0.
struct Band {
  double phi1;
  double phi2;
  int n_lambda;
  int first_cell;
};

/// Longitude-latitude rectangle (a triangle when one side sits on a pole).
/// edge_ids run counterclockwise seen from outside the sphere: south side
/// west to east, east side, north side east to west, west side.
struct Cell {
  int id;
  int band;
  int index_in_band;
  double lambda1, lambda2;  // lambda2 may equal 2pi for the last cell of a band
  double phi1, phi2;
  double area;
  Spherical center;
  Point3 center_xyz;
  std::vector<int> edge_ids;
};

/// Cell interface. e1 -> e2 follows the counterclockwise traversal of
/// left_cell; the right cell walks it backwards. Pole sides are stored as
/// degenerate edges (e1 == e2, length 0) with no right cell.
struct Edge {
  int id;
  Point3 e1, e2;
  Spherical midpoint;
  Point3 midpoint_xyz;
  double length;
  EdgeKind kind;
  int left_cell;
  int right_cell;
  Point3 normal_from_left;  // zero for degenerate edges

  bool degenerate() const { return right_cell == kNoCell; }
};

struct SphereGrid {
  std::vector<Cell> cells;
  std::vector<Edge> edges;
  std::vector<Band> band_layout;
  double total_area = 0.0;
  double coarsening_threshold = 0.0;
  int n_lambda_eq = 0;

  std::size_t size() const { return cells.size(); }
  const Cell& cell(int band, int i) const { return cells[band_layout[band].first_cell + i]; }

  /// +1 when cell_id owns the edge's orientation, -1 when it is the right cell.
  int orientation(int edge_id, int cell_id) const { return edges[edge_id].left_cell == cell_id ? 1 : -1; }

  /// Edge endpoints in the traversal sense of cell_id.
  std::pair<Point3, Point3> oriented_endpoints(int edge_id, int cell_id) const {
    const Edge& e = edges[edge_id];
    return e.left_cell == cell_id ? std::pair{e.e1, e.e2} : std::pair{e.e2, e.e1};
  }

  int neighbor(int edge_id, int cell_id) const {
    const Edge& e = edges[edge_id];
    return e.left_cell == cell_id ? e.right_cell : e.left_cell;
  }
};

/// Builds the latitude-longitude grid: n_phi uniform bands, n_lambda_eq cells
/// in the equatorial bands, halving the per-band count poleward whenever the
/// cell width at the band's poleward boundary would fall below
/// coarsening_ratio_threshold times the equatorial width. A threshold of 0
/// disables coarsening.
SphereGrid build_grid(int n_phi, int n_lambda_eq, double coarsening_ratio_threshold = 0.5);

/// Representative point of a lat-lon rectangle for the linear reconstruction.
/// The latitude is the area-weighted mean latitude of the cell.
Spherical cell_center(double lambda1, double lambda2, double phi1, double phi2);
inline Spherical cell_center(const Cell& c) { return cell_center(c.lambda1, c.lambda2, c.phi1, c.phi2); }

struct Violation {
  enum class Target { Grid, Cell, Edge } target;
  int id;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool mentions_edge(int id) const;
  bool mentions_cell(int id) const;
};

ValidationReport validate_grid(const SphereGrid& g);

/// Physical width of a band's cells at its poleward boundary (equatorward
/// boundary for pole-adjacent bands), relative to the equatorial width.
double relative_band_width(const SphereGrid& g, int band);

/// Debug listing: band layout followed by per-cell bounds.
void dump_grid(const SphereGrid& g, std::ostream& os);

}  // namespace cusphere
