#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace avsfe {

using Point2 = Eigen::Vector2d;

enum class BoundaryTag : std::uint8_t { Dirichlet = 0, Neumann = 1, Free = 2 };

enum class Diagonal { Left, Right, Crisscross };

/// Local edge convention used throughout: edge i of a cell is the one
/// opposite local vertex i, traversed from vertex (i+1)%3 to vertex (i+2)%3.
inline constexpr std::array<int, 2> kEdgeVertices[3] = {{1, 2}, {2, 0}, {0, 1}};

/// A mesh edge. `vertices` is sorted ascending. `cells[0]` is the lower-index
/// owner and `cells[1]` the higher one (-1 on the boundary). The facet normal
/// used for global H(div) orientation points out of `cells[0]`.
struct Facet {
  std::array<int, 2> vertices{};
  std::array<int, 2> cells{-1, -1};
  std::array<int, 2> local_edge{-1, -1};

  bool on_boundary() const { return cells[1] < 0; }
};

/// Boundary facet description used for construction and file I/O.
struct BoundaryFacet {
  int v0;
  int v1;
  BoundaryTag tag;
};

struct ElementGeometry {
  int cell = -1;
  std::array<Point2, 3> vertices;
  Eigen::Matrix2d jacobian;
  double det_jacobian = 0.0;
  double diameter = 0.0;
  std::array<Point2, 3> normals;       // outward unit normal of local edge i
  std::array<double, 3> edge_lengths;  // length of local edge i

  double area() const { return 0.5 * det_jacobian; }
  Point2 map(const Point2& ref) const { return vertices[0] + jacobian * ref; }
  Point2 centroid() const { return (vertices[0] + vertices[1] + vertices[2]) / 3.0; }
};

/// Conforming triangulation. Immutable once built; refinement returns a new
/// mesh.
class Mesh {
 public:
  Mesh() = default;

  /// `refinement_edge` and `generation` may be empty: refinement edges then
  /// default to the longest edge of each cell (ties broken by global vertex
  /// ids) and generations to zero. Boundary facets not listed in `boundary`
  /// receive `default_tag`. Cells are reoriented counterclockwise if needed.
  Mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> cells,
       std::vector<int> material, std::vector<BoundaryFacet> boundary = {},
       BoundaryTag default_tag = BoundaryTag::Free, std::vector<int> refinement_edge = {},
       std::vector<int> generation = {});

  int num_vertices() const { return static_cast<int>(vertices_.size()); }
  int num_cells() const { return static_cast<int>(cells_.size()); }
  int num_facets() const { return static_cast<int>(facets_.size()); }

  const std::vector<Point2>& vertices() const { return vertices_; }
  const Point2& vertex(int v) const { return vertices_[v]; }
  const std::vector<std::array<int, 3>>& cells() const { return cells_; }
  const std::array<int, 3>& cell(int c) const { return cells_[c]; }
  const std::vector<Facet>& facets() const { return facets_; }
  const Facet& facet(int f) const { return facets_[f]; }

  /// Facet index of local edge i of cell c.
  int cell_facet(int c, int local_edge) const { return cell_facets_[c][local_edge]; }
  const std::array<int, 3>& cell_facets(int c) const { return cell_facets_[c]; }

  int material(int c) const { return material_[c]; }
  const std::vector<int>& materials() const { return material_; }
  int refinement_edge(int c) const { return refinement_edge_[c]; }
  const std::vector<int>& refinement_edges() const { return refinement_edge_; }
  int generation(int c) const { return generation_[c]; }
  const std::vector<int>& generations() const { return generation_; }

  /// Tag of a boundary facet; throws for interior facets.
  BoundaryTag boundary_tag(int facet) const;
  std::vector<int> boundary_facets() const;
  std::vector<BoundaryFacet> boundary_description() const;

  Point2 facet_midpoint(int f) const;
  double facet_length(int f) const;
  /// +1 if the cell's outward normal on that local edge agrees with the facet
  /// orientation (cell is the lower-index owner), -1 otherwise.
  int facet_sign(int c, int local_edge) const;

  ElementGeometry geometry(int c) const;
  double cell_area(int c) const;
  double cell_diameter(int c) const;
  double max_diameter() const;
  double total_area() const;

  /// Same connectivity with a different set of boundary tags.
  Mesh with_boundary_tags(const std::vector<BoundaryTag>& facet_tags) const;

 private:
  void build_topology(const std::vector<BoundaryFacet>& boundary, BoundaryTag default_tag);

  std::vector<Point2> vertices_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<int> material_;
  std::vector<int> refinement_edge_;
  std::vector<int> generation_;
  std::vector<Facet> facets_;
  std::vector<std::array<int, 3>> cell_facets_;
  std::vector<BoundaryTag> facet_tag_;  // meaningful for boundary facets only
};

using PointPredicate = std::function<bool(const Point2&)>;

Mesh build_unit_square(int nx, int ny, Diagonal diagonal = Diagonal::Right);
Mesh build_rectangle(double length, double height, int nx, int ny,
                     Diagonal diagonal = Diagonal::Right);

/// Unit square with a polygonal circle of `n_segments` edges embedded in the
/// edge set (Delaunay triangulation of a graded point cloud). Cells whose
/// centroid lies inside the polygon get material 1, the rest material 0.
/// All boundary facets are Free. Throws MeshError if a polygon edge is not
/// recovered by the triangulation.
Mesh build_inclusion_mesh(const Point2& center, double radius, int n_segments, double target_h);

/// Evaluates the predicates at facet midpoints. Facets matching neither
/// become Free (zero traction). Throws if a facet matches both.
Mesh tag_boundary(const Mesh& mesh, const PointPredicate& dirichlet,
                  const PointPredicate& neumann);

/// Red refinement: each cell split into four similar children.
Mesh uniform_refine(const Mesh& mesh);

/// Newest-vertex bisection of the marked cells with recursive closure.
/// `max_depth` bounds the closure recursion.
Mesh bisect_refine(const Mesh& mesh, std::span<const int> marked, int max_depth = 256);

struct ConformityReport {
  bool ok = true;
  int facets_with_too_many_cells = 0;
  int dangling_boundary_facets = 0;  // single-owner facets off the domain boundary
  int nonpositive_cells = 0;
};

/// `on_domain_boundary` decides whether a point lies on the true domain
/// boundary; single-owner facets elsewhere reveal hanging nodes.
ConformityReport check_conformity(const Mesh& mesh, const PointPredicate& on_domain_boundary);

}  // namespace avsfe
