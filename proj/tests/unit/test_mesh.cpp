#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "avsfe/error.hpp"
#include "avsfe/mesh.hpp"

using namespace avsfe;

namespace {

bool on_unit_square_boundary(const Point2& x) {
  return x.x() < 1e-12 || x.x() > 1 - 1e-12 || x.y() < 1e-12 || x.y() > 1 - 1e-12;
}

double tagged_area(const Mesh& m, int tag) {
  double a = 0.0;
  for (int c = 0; c < m.num_cells(); ++c) {
    if (m.material(c) == tag) a += m.cell_area(c);
  }
  return a;
}

}  // namespace

TEST(UnitSquare, TwoCellCounts) {
  const Mesh m = build_unit_square(1, 1, Diagonal::Left);
  EXPECT_EQ(m.num_cells(), 2);
  EXPECT_EQ(m.num_vertices(), 4);
  EXPECT_EQ(m.num_facets(), 5);
}

TEST(UnitSquare, AreaPartition) {
  for (Diagonal d : {Diagonal::Left, Diagonal::Right, Diagonal::Crisscross}) {
    EXPECT_NEAR(build_unit_square(2, 2, d).total_area(), 1.0, 1e-14);
  }
}

TEST(UnitSquare, AllBoundaryDirichletByDefault) {
  const Mesh m = build_unit_square(3, 2);
  for (int f : m.boundary_facets()) EXPECT_EQ(m.boundary_tag(f), BoundaryTag::Dirichlet);
}

TEST(Rectangle, BeamMesh) {
  const Mesh m = build_rectangle(2.0, 0.2, 2, 1, Diagonal::Left);
  EXPECT_EQ(m.num_cells(), 4);
  Point2 lo(1e9, 1e9), hi(-1e9, -1e9);
  for (const Point2& x : m.vertices()) {
    lo = lo.cwiseMin(x);
    hi = hi.cwiseMax(x);
  }
  EXPECT_DOUBLE_EQ(lo.x(), 0.0);
  EXPECT_DOUBLE_EQ(lo.y(), 0.0);
  EXPECT_DOUBLE_EQ(hi.x(), 2.0);
  EXPECT_DOUBLE_EQ(hi.y(), 0.2);
}

TEST(Rectangle, UnitRectangleMatchesSquareConnectivity) {
  const Mesh a = build_rectangle(1.0, 1.0, 1, 1, Diagonal::Left);
  const Mesh b = build_unit_square(1, 1, Diagonal::Left);
  EXPECT_EQ(a.cells(), b.cells());
  EXPECT_EQ(a.vertices(), b.vertices());
}

TEST(TagBoundary, LeftDirichletRightNeumann) {
  const int ny = 3;
  const Mesh m = tag_boundary(
      build_unit_square(4, ny), [](const Point2& x) { return x.x() < 1e-12; },
      [](const Point2& x) { return x.x() > 1 - 1e-12; });
  int dir = 0, neu = 0, free = 0;
  for (int f : m.boundary_facets()) {
    switch (m.boundary_tag(f)) {
      case BoundaryTag::Dirichlet: ++dir; break;
      case BoundaryTag::Neumann: ++neu; break;
      case BoundaryTag::Free: ++free; break;
    }
  }
  EXPECT_EQ(dir, ny);
  EXPECT_EQ(neu, ny);
  EXPECT_EQ(free, 2 * 4);
}

TEST(TagBoundary, EmptyPredicatesGiveFree) {
  const Mesh m = tag_boundary(build_unit_square(2, 2), {}, {});
  for (int f : m.boundary_facets()) EXPECT_EQ(m.boundary_tag(f), BoundaryTag::Free);
}

TEST(TagBoundary, OverlapRejected) {
  auto all = [](const Point2&) { return true; };
  EXPECT_THROW(tag_boundary(build_unit_square(1, 1), all, all), ConfigError);
}

TEST(UniformRefine, TwoCellSquare) {
  const Mesh m = uniform_refine(build_unit_square(1, 1, Diagonal::Left));
  EXPECT_EQ(m.num_cells(), 8);
  EXPECT_EQ(m.num_vertices(), 9);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-14);
}

TEST(UniformRefine, CountAreaAndTags) {
  Mesh m = build_inclusion_mesh({0.5, 0.5}, 0.25, 12, 0.2);
  const double a0 = tagged_area(m, 1);
  for (int round = 0; round < 3; ++round) {
    const Mesh next = uniform_refine(m);
    EXPECT_EQ(next.num_cells(), 4 * m.num_cells());
    EXPECT_NEAR(next.total_area(), m.total_area(), 1e-14);
    EXPECT_NEAR(tagged_area(next, 1), a0, 1e-13);
    m = next;
  }
  EXPECT_TRUE(check_conformity(m, on_unit_square_boundary).ok);
}

TEST(UniformRefine, BoundaryTagsInherited) {
  const Mesh m = uniform_refine(tag_boundary(
      build_unit_square(1, 1), [](const Point2& x) { return x.x() < 1e-12; }, {}));
  int dir = 0;
  for (int f : m.boundary_facets()) dir += m.boundary_tag(f) == BoundaryTag::Dirichlet;
  EXPECT_EQ(dir, 2);
}

TEST(Bisect, EmptyMarkingIsIdentity) {
  const Mesh m = build_unit_square(2, 2);
  const Mesh r = bisect_refine(m, std::vector<int>{});
  EXPECT_EQ(r.cells(), m.cells());
  EXPECT_EQ(r.vertices(), m.vertices());
}

// Longest-edge labeling makes the shared diagonal the refinement edge of
// both cells: one bisection each, four cells around the diagonal midpoint.
TEST(Bisect, TwoCellSquareCompatibleLabeling) {
  for (Diagonal d : {Diagonal::Left, Diagonal::Right}) {
    for (int marked : {0, 1}) {
      const Mesh r = bisect_refine(build_unit_square(1, 1, d), std::vector<int>{marked});
      EXPECT_EQ(r.num_cells(), 4);
      EXPECT_EQ(r.num_vertices(), 5);
      EXPECT_NEAR(r.total_area(), 1.0, 1e-15);
      EXPECT_TRUE(check_conformity(r, on_unit_square_boundary).ok);
      for (int c = 0; c < r.num_cells(); ++c) EXPECT_EQ(r.generation(c), 1);
    }
  }
}

// Neighbour labeled with a boundary refinement edge: it is bisected there
// first, then its child holding the diagonal is bisected again.
TEST(Bisect, TwoCellSquareClosureNeedsSecondBisection) {
  const Mesh m({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}}, {0, 0}, {},
               BoundaryTag::Dirichlet, {1, 0});
  const Mesh r = bisect_refine(m, std::vector<int>{0});
  EXPECT_EQ(r.num_cells(), 5);
  EXPECT_EQ(r.num_vertices(), 6);
  EXPECT_NEAR(r.total_area(), 1.0, 1e-15);
  EXPECT_TRUE(check_conformity(r, on_unit_square_boundary).ok);
}

TEST(Bisect, RandomMarkingKeepsConformity) {
  std::mt19937 rng(3);
  Mesh m = build_unit_square(3, 3, Diagonal::Crisscross);
  for (int round = 0; round < 5; ++round) {
    std::vector<int> cells(m.num_cells());
    for (int i = 0; i < m.num_cells(); ++i) cells[i] = i;
    std::shuffle(cells.begin(), cells.end(), rng);
    cells.resize(std::max(1, m.num_cells() / 10));
    std::sort(cells.begin(), cells.end());
    const Mesh next = bisect_refine(m, cells);
    EXPECT_GE(next.num_cells(), m.num_cells() + static_cast<int>(cells.size()));
    const ConformityReport rep = check_conformity(next, on_unit_square_boundary);
    EXPECT_TRUE(rep.ok);
    EXPECT_EQ(rep.nonpositive_cells, 0);
    EXPECT_NEAR(next.total_area(), 1.0, 1e-13);
    m = next;
  }
}

TEST(Bisect, MaterialTagsStable) {
  const Mesh m = build_inclusion_mesh({0.5, 0.5}, 0.25, 12, 0.2);
  std::vector<int> marked;
  for (int c = 0; c < m.num_cells(); c += 3) marked.push_back(c);
  const Mesh r = bisect_refine(m, marked);
  EXPECT_NEAR(tagged_area(r, 1), tagged_area(m, 1), 1e-14);
  EXPECT_NEAR(tagged_area(r, 0), tagged_area(m, 0), 1e-14);
}

TEST(Geometry, ReferenceCell) {
  const Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {0});
  const ElementGeometry g = m.geometry(0);
  EXPECT_DOUBLE_EQ(g.det_jacobian, 1.0);
  EXPECT_DOUBLE_EQ(g.diameter, std::sqrt(2.0));
}

TEST(Geometry, ScalingByTwo) {
  const Mesh a({{0.1, 0.2}, {0.7, 0.3}, {0.2, 0.9}}, {{0, 1, 2}}, {0});
  const Mesh b({{0.2, 0.4}, {1.4, 0.6}, {0.4, 1.8}}, {{0, 1, 2}}, {0});
  EXPECT_NEAR(b.geometry(0).det_jacobian, 4.0 * a.geometry(0).det_jacobian, 1e-14);
  EXPECT_NEAR(b.geometry(0).diameter, 2.0 * a.geometry(0).diameter, 1e-14);
}

TEST(Geometry, NormalsPointOutward) {
  const Mesh m = build_inclusion_mesh({0.5, 0.5}, 0.2, 16, 0.15);
  for (int c = 0; c < m.num_cells(); ++c) {
    const ElementGeometry g = m.geometry(c);
    for (int e = 0; e < 3; ++e) {
      const Point2 mid = 0.5 * (g.vertices[kEdgeVertices[e][0]] + g.vertices[kEdgeVertices[e][1]]);
      EXPECT_LT(g.normals[e].dot(g.centroid() - mid), 0.0);
      EXPECT_NEAR(g.normals[e].norm(), 1.0, 1e-14);
    }
  }
}

TEST(Geometry, ClockwiseInputIsReoriented) {
  const Mesh m({{0, 0}, {0, 1}, {1, 0}}, {{0, 1, 2}}, {0});
  EXPECT_GT(m.geometry(0).det_jacobian, 0.0);
}

TEST(Facets, SharedFacetOwnership) {
  const Mesh m = build_unit_square(2, 2);
  for (int f = 0; f < m.num_facets(); ++f) {
    const Facet& fc = m.facet(f);
    EXPECT_LT(fc.vertices[0], fc.vertices[1]);
    if (!fc.on_boundary()) {
      EXPECT_LT(fc.cells[0], fc.cells[1]);
      EXPECT_EQ(m.facet_sign(fc.cells[0], fc.local_edge[0]), 1);
      EXPECT_EQ(m.facet_sign(fc.cells[1], fc.local_edge[1]), -1);
    }
  }
}

TEST(InclusionMesh, CentroidsInsideAreTagged) {
  const double r = 0.15, h = 0.05;
  const Mesh m = build_inclusion_mesh({0.5, 0.5}, r, 250, h);
  for (int c = 0; c < m.num_cells(); ++c) {
    if ((m.geometry(c).centroid() - Point2(0.5, 0.5)).norm() < r - h) EXPECT_EQ(m.material(c), 1) << c;
  }
  EXPECT_TRUE(check_conformity(m, on_unit_square_boundary).ok);
  EXPECT_NEAR(m.total_area(), 1.0, 1e-12);
}

TEST(InclusionMesh, TaggedAreaNearCircle) {
  const double r = 0.15, h = 0.05;
  const Mesh m = build_inclusion_mesh({0.5, 0.5}, r, 250, h);
  const double circle = std::numbers::pi * r * r;
  EXPECT_LE(std::abs(tagged_area(m, 1) - circle), 2.0 * (2.0 * std::numbers::pi * r) * h);
  // The polygon is inscribed, so its area is the exact bound from below.
  const double polygon = 0.5 * 250 * r * r * std::sin(2.0 * std::numbers::pi / 250);
  EXPECT_NEAR(tagged_area(m, 1), polygon, 1e-12);
}

TEST(InclusionMesh, FourSegmentsGiveInscribedSquare) {
  const double r = 0.25;
  const Mesh m = build_inclusion_mesh({0.5, 0.5}, r, 4, 0.1);
  EXPECT_NEAR(tagged_area(m, 1), 2.0 * r * r, 1e-13);
}

TEST(InclusionMesh, RejectsBadInput) {
  EXPECT_THROW(build_inclusion_mesh({0.5, 0.5}, 0.6, 16, 0.1), ConfigError);
  EXPECT_THROW(build_inclusion_mesh({0.5, 0.5}, 0.2, 2, 0.1), ConfigError);
  EXPECT_THROW(build_inclusion_mesh({0.5, 0.5}, 0.2, 16, 0.0), ConfigError);
}

TEST(InclusionMesh, Deterministic) {
  const Mesh a = build_inclusion_mesh({0.5, 0.5}, 0.15, 60, 0.08);
  const Mesh b = build_inclusion_mesh({0.5, 0.5}, 0.15, 60, 0.08);
  EXPECT_EQ(a.cells(), b.cells());
  EXPECT_EQ(a.vertices(), b.vertices());
}
