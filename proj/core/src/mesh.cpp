#include "avsfe/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <unordered_map>

#include "avsfe/error.hpp"

namespace avsfe {

namespace {

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint64_t>(std::min(a, b));
  const auto hi = static_cast<std::uint64_t>(std::max(a, b));
  return (lo << 32) | hi;
}

double signed_area(const Point2& a, const Point2& b, const Point2& c) {
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}

// Strict total order on edges: longer first, then by sorted vertex ids.
bool edge_precedes(const std::vector<Point2>& verts, int a0, int a1, int b0, int b1) {
  const double la = (verts[a1] - verts[a0]).squaredNorm();
  const double lb = (verts[b1] - verts[b0]).squaredNorm();
  if (la != lb) return la > lb;
  const auto ka = std::make_pair(std::min(a0, a1), std::max(a0, a1));
  const auto kb = std::make_pair(std::min(b0, b1), std::max(b0, b1));
  return ka < kb;
}

int longest_edge(const std::vector<Point2>& verts, const std::array<int, 3>& cell) {
  int best = 0;
  for (int e = 1; e < 3; ++e) {
    const auto [i0, i1] = kEdgeVertices[e];
    const auto [b0, b1] = kEdgeVertices[best];
    if (edge_precedes(verts, cell[i0], cell[i1], cell[b0], cell[b1])) best = e;
  }
  return best;
}

}  // namespace

Mesh::Mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> cells,
           std::vector<int> material, std::vector<BoundaryFacet> boundary,
           BoundaryTag default_tag, std::vector<int> refinement_edge,
           std::vector<int> generation)
    : vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      material_(std::move(material)),
      refinement_edge_(std::move(refinement_edge)),
      generation_(std::move(generation)) {
  const int nc = num_cells();
  if (material_.empty()) material_.assign(nc, 0);
  AVSFE_REQUIRE(static_cast<int>(material_.size()) == nc, MeshError,
                "material tag count does not match cell count");
  const bool have_ref = !refinement_edge_.empty();
  AVSFE_REQUIRE(!have_ref || static_cast<int>(refinement_edge_.size()) == nc, MeshError,
                "refinement edge count does not match cell count");
  if (generation_.empty()) generation_.assign(nc, 0);
  AVSFE_REQUIRE(static_cast<int>(generation_.size()) == nc, MeshError,
                "generation count does not match cell count");
  if (!have_ref) refinement_edge_.assign(nc, 0);

  for (int c = 0; c < nc; ++c) {
    auto& cell = cells_[c];
    for (int v : cell) {
      AVSFE_REQUIRE(v >= 0 && v < num_vertices(), MeshError,
                    "cell " + std::to_string(c) + " references a missing vertex");
    }
    const double area = signed_area(vertices_[cell[0]], vertices_[cell[1]], vertices_[cell[2]]);
    AVSFE_REQUIRE(area != 0.0, MeshError, "cell " + std::to_string(c) + " is degenerate");
    if (area < 0.0) {
      std::swap(cell[1], cell[2]);
      int& r = refinement_edge_[c];
      if (r == 1) r = 2;
      else if (r == 2) r = 1;
    }
    if (!have_ref) refinement_edge_[c] = longest_edge(vertices_, cell);
    AVSFE_REQUIRE(refinement_edge_[c] >= 0 && refinement_edge_[c] < 3, MeshError,
                  "invalid refinement edge index");
  }
  build_topology(boundary, default_tag);
}

void Mesh::build_topology(const std::vector<BoundaryFacet>& boundary, BoundaryTag default_tag) {
  const int nc = num_cells();
  facets_.clear();
  cell_facets_.assign(nc, {-1, -1, -1});
  std::unordered_map<std::uint64_t, int> index;
  index.reserve(static_cast<std::size_t>(nc) * 2);
  for (int c = 0; c < nc; ++c) {
    for (int e = 0; e < 3; ++e) {
      const int a = cells_[c][kEdgeVertices[e][0]];
      const int b = cells_[c][kEdgeVertices[e][1]];
      const auto key = edge_key(a, b);
      auto it = index.find(key);
      if (it == index.end()) {
        Facet f;
        f.vertices = {std::min(a, b), std::max(a, b)};
        f.cells = {c, -1};
        f.local_edge = {e, -1};
        index.emplace(key, num_facets());
        cell_facets_[c][e] = num_facets();
        facets_.push_back(f);
      } else {
        Facet& f = facets_[it->second];
        AVSFE_REQUIRE(f.cells[1] < 0, MeshError,
                      "non-manifold mesh: edge (" + std::to_string(a) + "," + std::to_string(b) +
                          ") shared by more than two cells");
        f.cells[1] = c;
        f.local_edge[1] = e;
        cell_facets_[c][e] = it->second;
      }
    }
  }

  std::unordered_map<std::uint64_t, BoundaryTag> given;
  for (const auto& b : boundary) given[edge_key(b.v0, b.v1)] = b.tag;
  facet_tag_.assign(facets_.size(), BoundaryTag::Free);
  for (int f = 0; f < num_facets(); ++f) {
    if (!facets_[f].on_boundary()) continue;
    auto it = given.find(edge_key(facets_[f].vertices[0], facets_[f].vertices[1]));
    facet_tag_[f] = it == given.end() ? default_tag : it->second;
  }
}

BoundaryTag Mesh::boundary_tag(int facet) const {
  AVSFE_REQUIRE(facets_[facet].on_boundary(), MeshError,
                "facet " + std::to_string(facet) + " is not on the boundary");
  return facet_tag_[facet];
}

std::vector<int> Mesh::boundary_facets() const {
  std::vector<int> out;
  for (int f = 0; f < num_facets(); ++f) {
    if (facets_[f].on_boundary()) out.push_back(f);
  }
  return out;
}

std::vector<BoundaryFacet> Mesh::boundary_description() const {
  std::vector<BoundaryFacet> out;
  for (int f : boundary_facets()) {
    // Keep the owner's counterclockwise direction for readability of dumps.
    const Facet& fc = facets_[f];
    const auto& cell = cells_[fc.cells[0]];
    const auto [i0, i1] = kEdgeVertices[fc.local_edge[0]];
    out.push_back({cell[i0], cell[i1], facet_tag_[f]});
  }
  return out;
}

Point2 Mesh::facet_midpoint(int f) const {
  return 0.5 * (vertices_[facets_[f].vertices[0]] + vertices_[facets_[f].vertices[1]]);
}

double Mesh::facet_length(int f) const {
  return (vertices_[facets_[f].vertices[1]] - vertices_[facets_[f].vertices[0]]).norm();
}

int Mesh::facet_sign(int c, int local_edge) const {
  return facets_[cell_facets_[c][local_edge]].cells[0] == c ? 1 : -1;
}

ElementGeometry Mesh::geometry(int c) const {
  ElementGeometry g;
  g.cell = c;
  for (int i = 0; i < 3; ++i) g.vertices[i] = vertices_[cells_[c][i]];
  g.jacobian.col(0) = g.vertices[1] - g.vertices[0];
  g.jacobian.col(1) = g.vertices[2] - g.vertices[0];
  g.det_jacobian = g.jacobian.determinant();
  g.diameter = 0.0;
  for (int e = 0; e < 3; ++e) {
    const Point2 t = g.vertices[kEdgeVertices[e][1]] - g.vertices[kEdgeVertices[e][0]];
    const double len = t.norm();
    g.edge_lengths[e] = len;
    g.diameter = std::max(g.diameter, len);
    // Counterclockwise cell: rotating the tangent clockwise points outward.
    g.normals[e] = Point2(t.y(), -t.x()) / len;
  }
  return g;
}

double Mesh::cell_area(int c) const {
  const auto& cell = cells_[c];
  return signed_area(vertices_[cell[0]], vertices_[cell[1]], vertices_[cell[2]]);
}

double Mesh::cell_diameter(int c) const {
  double d = 0.0;
  for (const auto& e : kEdgeVertices) {
    d = std::max(d, (vertices_[cells_[c][e[1]]] - vertices_[cells_[c][e[0]]]).norm());
  }
  return d;
}

double Mesh::max_diameter() const {
  double h = 0.0;
  for (int c = 0; c < num_cells(); ++c) h = std::max(h, cell_diameter(c));
  return h;
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int c = 0; c < num_cells(); ++c) a += cell_area(c);
  return a;
}

Mesh Mesh::with_boundary_tags(const std::vector<BoundaryTag>& facet_tags) const {
  AVSFE_REQUIRE(static_cast<int>(facet_tags.size()) == num_facets(), MeshError,
                "facet tag count does not match facet count");
  Mesh out = *this;
  for (int f = 0; f < num_facets(); ++f) {
    if (facets_[f].on_boundary()) out.facet_tag_[f] = facet_tags[f];
  }
  return out;
}

Mesh build_rectangle(double length, double height, int nx, int ny, Diagonal diagonal) {
  AVSFE_REQUIRE(nx >= 1 && ny >= 1, ConfigError, "mesh subdivisions must be >= 1");
  AVSFE_REQUIRE(length > 0.0 && height > 0.0, ConfigError, "rectangle sides must be positive");
  std::vector<Point2> verts;
  verts.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) + nx * ny));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      verts.emplace_back(length * i / nx, height * j / ny);
    }
  }
  auto node = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = node(i, j), v10 = node(i + 1, j);
      const int v01 = node(i, j + 1), v11 = node(i + 1, j + 1);
      switch (diagonal) {
        case Diagonal::Right:  // "/" diagonal
          cells.push_back({v00, v10, v11});
          cells.push_back({v00, v11, v01});
          break;
        case Diagonal::Left:  // "\" diagonal
          cells.push_back({v00, v10, v01});
          cells.push_back({v10, v11, v01});
          break;
        case Diagonal::Crisscross: {
          const int vc = static_cast<int>(verts.size());
          verts.emplace_back(length * (i + 0.5) / nx, height * (j + 0.5) / ny);
          cells.push_back({v00, v10, vc});
          cells.push_back({v10, v11, vc});
          cells.push_back({v11, v01, vc});
          cells.push_back({v01, v00, vc});
          break;
        }
      }
    }
  }
  std::vector<int> material(cells.size(), 0);
  return Mesh(std::move(verts), std::move(cells), std::move(material), {}, BoundaryTag::Free);
}

Mesh build_unit_square(int nx, int ny, Diagonal diagonal) {
  Mesh m = build_rectangle(1.0, 1.0, nx, ny, diagonal);
  std::vector<BoundaryTag> tags(m.num_facets(), BoundaryTag::Dirichlet);
  return m.with_boundary_tags(tags);
}

Mesh tag_boundary(const Mesh& mesh, const PointPredicate& dirichlet, const PointPredicate& neumann) {
  std::vector<BoundaryTag> tags(mesh.num_facets(), BoundaryTag::Free);
  for (int f : mesh.boundary_facets()) {
    const Point2 mid = mesh.facet_midpoint(f);
    const bool d = dirichlet && dirichlet(mid);
    const bool n = neumann && neumann(mid);
    AVSFE_REQUIRE(!(d && n), ConfigError,
                  "boundary facet at (" + std::to_string(mid.x()) + ", " +
                      std::to_string(mid.y()) + ") matches both Dirichlet and Neumann predicates");
    tags[f] = d ? BoundaryTag::Dirichlet : (n ? BoundaryTag::Neumann : BoundaryTag::Free);
  }
  return mesh.with_boundary_tags(tags);
}

Mesh uniform_refine(const Mesh& mesh) {
  std::vector<Point2> verts = mesh.vertices();
  verts.reserve(verts.size() + mesh.num_facets());
  std::vector<int> midpoint(mesh.num_facets());
  for (int f = 0; f < mesh.num_facets(); ++f) {
    midpoint[f] = static_cast<int>(verts.size());
    verts.push_back(mesh.facet_midpoint(f));
  }
  const int nc = mesh.num_cells();
  std::vector<std::array<int, 3>> cells;
  std::vector<int> material, ref, gen;
  cells.reserve(4 * nc);
  material.reserve(4 * nc);
  ref.reserve(4 * nc);
  gen.reserve(4 * nc);
  for (int c = 0; c < nc; ++c) {
    const auto& v = mesh.cell(c);
    const int m0 = midpoint[mesh.cell_facet(c, 0)];
    const int m1 = midpoint[mesh.cell_facet(c, 1)];
    const int m2 = midpoint[mesh.cell_facet(c, 2)];
    // Local edge i of every child is parallel to local edge i of the parent.
    const std::array<std::array<int, 3>, 4> children = {{
        {v[0], m2, m1}, {m2, v[1], m0}, {m1, m0, v[2]}, {m0, m1, m2}}};
    for (const auto& ch : children) {
      cells.push_back(ch);
      material.push_back(mesh.material(c));
      ref.push_back(mesh.refinement_edge(c));
      gen.push_back(mesh.generation(c) + 1);
    }
  }
  std::vector<BoundaryFacet> boundary;
  for (int f : mesh.boundary_facets()) {
    const auto& fv = mesh.facet(f).vertices;
    const BoundaryTag t = mesh.boundary_tag(f);
    boundary.push_back({fv[0], midpoint[f], t});
    boundary.push_back({midpoint[f], fv[1], t});
  }
  return Mesh(std::move(verts), std::move(cells), std::move(material), std::move(boundary),
              BoundaryTag::Free, std::move(ref), std::move(gen));
}

namespace {

// Mutable working copy for newest-vertex bisection.
class Bisector {
 public:
  Bisector(const Mesh& mesh, int max_depth) : max_depth_(max_depth) {
    verts_ = mesh.vertices();
    cells_ = mesh.cells();
    material_ = mesh.materials();
    ref_ = mesh.refinement_edges();
    gen_ = mesh.generations();
    alive_.assign(cells_.size(), true);
    for (int c = 0; c < mesh.num_cells(); ++c) attach(c);
    for (const auto& b : mesh.boundary_description()) boundary_[edge_key(b.v0, b.v1)] = b.tag;
  }

  bool alive(int c) const { return alive_[c]; }

  void bisect(int c, int depth) {
    if (depth > max_depth_) {
      throw MeshError("bisection closure exceeded depth " + std::to_string(max_depth_) +
                      " (inconsistent refinement-edge data)");
    }
    const auto [a, b] = ref_vertices(c);
    int n = neighbor(c, a, b);
    while (n >= 0) {
      const auto [na, nb] = ref_vertices(n);
      if (edge_key(na, nb) == edge_key(a, b)) break;
      bisect(n, depth + 1);
      n = neighbor(c, a, b);
    }
    const int m = static_cast<int>(verts_.size());
    verts_.push_back(0.5 * (verts_[a] + verts_[b]));
    if (auto it = boundary_.find(edge_key(a, b)); it != boundary_.end()) {
      boundary_[edge_key(a, m)] = it->second;
      boundary_[edge_key(m, b)] = it->second;
      boundary_.erase(it);
    }
    split(c, m);
    if (n >= 0) split(n, m);
  }

  Mesh finish() const {
    std::vector<std::array<int, 3>> cells;
    std::vector<int> material, ref, gen;
    for (std::size_t c = 0; c < cells_.size(); ++c) {
      if (!alive_[c]) continue;
      cells.push_back(cells_[c]);
      material.push_back(material_[c]);
      ref.push_back(ref_[c]);
      gen.push_back(gen_[c]);
    }
    std::vector<BoundaryFacet> boundary;
    boundary.reserve(boundary_.size());
    for (const auto& [key, tag] : boundary_) {
      boundary.push_back({static_cast<int>(key >> 32), static_cast<int>(key & 0xffffffffu), tag});
    }
    return Mesh(verts_, std::move(cells), std::move(material), std::move(boundary),
                BoundaryTag::Free, std::move(ref), std::move(gen));
  }

 private:
  std::pair<int, int> ref_vertices(int c) const {
    const auto [i0, i1] = kEdgeVertices[ref_[c]];
    return {cells_[c][i0], cells_[c][i1]};
  }

  int neighbor(int c, int a, int b) const {
    auto it = edge_cells_.find(edge_key(a, b));
    if (it == edge_cells_.end()) return -1;
    for (int o : it->second) {
      if (o != c) return o;
    }
    return -1;
  }

  void attach(int c) {
    for (const auto& e : kEdgeVertices) {
      edge_cells_[edge_key(cells_[c][e[0]], cells_[c][e[1]])].push_back(c);
    }
  }

  void detach(int c) {
    for (const auto& e : kEdgeVertices) {
      auto& owners = edge_cells_[edge_key(cells_[c][e[0]], cells_[c][e[1]])];
      owners.erase(std::remove(owners.begin(), owners.end(), c), owners.end());
    }
  }

  void split(int c, int m) {
    const int r = ref_[c];
    const int w0 = cells_[c][r];
    const int w1 = cells_[c][(r + 1) % 3];
    const int w2 = cells_[c][(r + 2) % 3];
    detach(c);
    alive_[c] = false;
    // Children (w0, w1, m) and (w0, m, w2); m is the newest vertex of both.
    add_cell({w0, w1, m}, 2, material_[c], gen_[c] + 1);
    add_cell({w0, m, w2}, 1, material_[c], gen_[c] + 1);
  }

  void add_cell(const std::array<int, 3>& v, int ref, int material, int gen) {
    cells_.push_back(v);
    ref_.push_back(ref);
    material_.push_back(material);
    gen_.push_back(gen);
    alive_.push_back(true);
    attach(static_cast<int>(cells_.size()) - 1);
  }

  int max_depth_;
  std::vector<Point2> verts_;
  std::vector<std::array<int, 3>> cells_;
  std::vector<int> material_, ref_, gen_;
  std::vector<bool> alive_;
  std::unordered_map<std::uint64_t, std::vector<int>> edge_cells_;
  std::map<std::uint64_t, BoundaryTag> boundary_;
};

}  // namespace

Mesh bisect_refine(const Mesh& mesh, std::span<const int> marked, int max_depth) {
  if (marked.empty()) return mesh;
  std::vector<int> order(marked.begin(), marked.end());
  for (int c : order) {
    AVSFE_REQUIRE(c >= 0 && c < mesh.num_cells(), ConfigError,
                  "marked cell " + std::to_string(c) + " out of range");
  }
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  Bisector work(mesh, max_depth);
  for (int c : order) {
    if (work.alive(c)) work.bisect(c, 0);
  }
  return work.finish();
}

ConformityReport check_conformity(const Mesh& mesh, const PointPredicate& on_domain_boundary) {
  ConformityReport r;
  std::vector<int> count(mesh.num_facets(), 0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    if (mesh.cell_area(c) <= 0.0) ++r.nonpositive_cells;
    for (int e = 0; e < 3; ++e) ++count[mesh.cell_facet(c, e)];
  }
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (count[f] > 2) ++r.facets_with_too_many_cells;
    if (count[f] == 1) {
      const auto& v = mesh.facet(f).vertices;
      if (!on_domain_boundary(mesh.vertex(v[0])) || !on_domain_boundary(mesh.vertex(v[1])) ||
          !on_domain_boundary(mesh.facet_midpoint(f))) {
        ++r.dangling_boundary_facets;
      }
    }
  }
  r.ok = r.facets_with_too_many_cells == 0 && r.dangling_boundary_facets == 0 &&
         r.nonpositive_cells == 0;
  return r;
}

}  // namespace avsfe
