#include <algorithm>
#include <random>
#include <cmath>
#include <numbers>
#include <set>
#include <string>
#include <utility>

#include "avsfe/error.hpp"
#include "avsfe/mesh.hpp"

namespace avsfe {

namespace {

struct Triangle {
  std::array<int, 3> v;  // counterclockwise
  bool alive;
};

long double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (static_cast<long double>(b.x()) - a.x()) * (static_cast<long double>(c.y()) - a.y()) -
         (static_cast<long double>(b.y()) - a.y()) * (static_cast<long double>(c.x()) - a.x());
}

// Positive when d lies strictly inside the circumcircle of the ccw triangle abc.
long double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
  const long double adx = a.x() - static_cast<long double>(d.x()), ady = a.y() - static_cast<long double>(d.y());
  const long double bdx = b.x() - static_cast<long double>(d.x()), bdy = b.y() - static_cast<long double>(d.y());
  const long double cdx = c.x() - static_cast<long double>(d.x()), cdy = c.y() - static_cast<long double>(d.y());
  return (adx * adx + ady * ady) * (bdx * cdy - cdx * bdy) -
         (bdx * bdx + bdy * bdy) * (adx * cdy - cdx * ady) +
         (cdx * cdx + cdy * cdy) * (adx * bdy - bdx * ady);
}

// Incremental Bowyer-Watson; the first three points form the enclosing
// triangle. Points are inserted in a fixed pseudo-random order so that
// cocircular rings do not degrade the cavities.
std::vector<std::array<int, 3>> delaunay(const std::vector<Point2>& pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<int> order(n - 3);
  for (int i = 0; i < n - 3; ++i) order[i] = i + 3;
  std::mt19937_64 rng(7);
  for (int i = n - 4; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

  std::vector<Triangle> tris{{{0, 1, 2}, true}};
  std::vector<int> bad;
  std::vector<std::array<int, 3>> edges;  // a, b, third vertex of the dying triangle
  for (int i : order) {
    const Point2& x = pts[i];
    bad.clear();
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const auto& v = tris[t].v;
      if (tris[t].alive && incircle(pts[v[0]], pts[v[1]], pts[v[2]], x) > 0) bad.push_back(t);
    }
    edges.clear();
    for (int t : bad) {
      const auto& v = tris[t].v;
      for (int e = 0; e < 3; ++e) edges.push_back({v[(e + 1) % 3], v[(e + 2) % 3], 0});
      tris[t].alive = false;
    }
    // A cavity edge is kept when its reverse does not occur.
    auto key = [](const std::array<int, 3>& e) {
      return std::make_pair(std::min(e[0], e[1]), std::max(e[0], e[1]));
    };
    std::sort(edges.begin(), edges.end(), [&](const auto& a, const auto& b) { return key(a) < key(b); });
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const bool shared = (k + 1 < edges.size() && key(edges[k + 1]) == key(edges[k])) ||
                          (k > 0 && key(edges[k - 1]) == key(edges[k]));
      if (shared) continue;
      const int a = edges[k][0], b = edges[k][1];
      AVSFE_REQUIRE(orient(pts[a], pts[b], x) > 0, MeshError,
                    "Delaunay insertion produced a non-star-shaped cavity");
      tris.push_back({{a, b, i}, true});
    }
    if (tris.size() > 4 * pts.size()) {
      std::erase_if(tris, [](const Triangle& t) { return !t.alive; });
    }
  }
  std::vector<std::array<int, 3>> cells;
  for (const Triangle& t : tris) {
    if (t.alive && t.v[0] >= 3 && t.v[1] >= 3 && t.v[2] >= 3) {
      cells.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
    }
  }
  return cells;
}

double segment_distance(const Point2& x, const Point2& a, const Point2& b) {
  const Point2 d = b - a;
  const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

bool inside_polygon(const Point2& x, const std::vector<Point2>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point2 &a = poly[i], &b = poly[j];
    if ((a.y() > x.y()) != (b.y() > x.y()) &&
        x.x() < (b.x() - a.x()) * (x.y() - a.y()) / (b.y() - a.y()) + a.x()) {
      in = !in;
    }
  }
  return in;
}

}  // namespace

Mesh build_inclusion_mesh(const Point2& center, double radius, int n_segments, double target_h) {
  AVSFE_REQUIRE(n_segments >= 3, ConfigError, "inclusion polygon needs at least 3 segments");
  AVSFE_REQUIRE(radius > 0.0 && target_h > 0.0, ConfigError,
                "inclusion radius and target_h must be positive");
  AVSFE_REQUIRE(center.x() - radius > 0.0 && center.x() + radius < 1.0 &&
                    center.y() - radius > 0.0 && center.y() + radius < 1.0,
                ConfigError, "inclusion must lie strictly inside the unit square");
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  std::vector<Point2> polygon(n_segments);
  for (int k = 0; k < n_segments; ++k) {
    const double t = kTwoPi * k / n_segments;
    polygon[k] = center + radius * Point2(std::cos(t), std::sin(t));
  }
  const double seg = (polygon[1] - polygon[0]).norm();

  // Slot 0..2: enclosing triangle, removed after triangulation.
  std::vector<Point2> pts{{-100.0, -100.0}, {200.0, -100.0}, {-100.0, 200.0}};
  std::vector<std::pair<int, int>> constrained;
  const int first_poly = static_cast<int>(pts.size());
  for (int k = 0; k < n_segments; ++k) {
    const Point2 &a = polygon[k], &b = polygon[(k + 1) % n_segments];
    const int pieces = std::max(1, static_cast<int>(std::ceil(seg / target_h)));
    for (int j = 0; j < pieces; ++j) pts.push_back(a + (b - a) * (static_cast<double>(j) / pieces));
  }
  const int num_poly = static_cast<int>(pts.size()) - first_poly;
  for (int i = 0; i < num_poly; ++i) {
    constrained.emplace_back(first_poly + i, first_poly + (i + 1) % num_poly);
  }

  // Rings of geometrically growing spacing between the fine polygon and the
  // background lattice.
  auto far_from_square = [](const Point2& x, double margin) {
    return x.x() > margin && x.x() < 1.0 - margin && x.y() > margin && x.y() < 1.0 - margin;
  };
  double band = 0.6 * std::min(seg, target_h);
  double spacing = std::min(seg, target_h);
  int ring = 0;
  while (spacing < target_h) {
    spacing = std::min(target_h, spacing * 1.5);
    for (double side : {-1.0, 1.0}) {
      const double rho = radius + side * (band + 0.5 * spacing);
      if (rho < spacing) continue;
      const int count = static_cast<int>(std::ceil(kTwoPi * rho / spacing));
      const double shift = 0.5 * (ring % 2);
      for (int k = 0; k < count; ++k) {
        const double t = kTwoPi * (k + shift) / count;
        const Point2 x = center + rho * Point2(std::cos(t), std::sin(t));
        if (far_from_square(x, 0.5 * spacing)) pts.push_back(x);
      }
    }
    band += spacing * 0.87;
    ++ring;
  }

  const int nb = std::max(1, static_cast<int>(std::ceil(1.0 / target_h)));
  for (int i = 0; i < nb; ++i) {
    const double s = static_cast<double>(i) / nb;
    pts.emplace_back(s, 0.0);
    pts.emplace_back(1.0, s);
    pts.emplace_back(1.0 - s, 1.0);
    pts.emplace_back(0.0, 1.0 - s);
  }

  // Background triangular lattice, kept away from the boundary and the rings.
  const double hy = target_h * std::sqrt(3.0) / 2.0;
  const double clearance = band + 0.5 * target_h;
  for (int j = 1; j * hy < 1.0; ++j) {
    const double y = j * hy;
    for (double x = (j % 2 ? 0.5 : 1.0) * target_h; x < 1.0; x += target_h) {
      const Point2 p(x, y);
      if (!far_from_square(p, 0.5 * target_h)) continue;
      double dist = 1e300;
      for (int k = 0; k < n_segments; ++k) {
        dist = std::min(dist, segment_distance(p, polygon[k], polygon[(k + 1) % n_segments]));
      }
      if (dist >= clearance) pts.push_back(p);
    }
  }

  std::vector<std::array<int, 3>> cells = delaunay(pts);
  std::vector<Point2> verts(pts.begin() + 3, pts.end());

  std::set<std::pair<int, int>> edges;
  for (auto& c : cells) {
    for (int e = 0; e < 3; ++e) {
      const int a = c[(e + 1) % 3], b = c[(e + 2) % 3];
      edges.emplace(std::min(a, b), std::max(a, b));
    }
  }
  for (auto [a, b] : constrained) {
    const int i = a - 3, j = b - 3;
    AVSFE_REQUIRE(edges.count({std::min(i, j), std::max(i, j)}), MeshError,
                  "inclusion polygon edge not recovered at target_h = " + std::to_string(target_h));
  }

  std::vector<int> material(cells.size(), 0);
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Point2 g = (verts[cells[c][0]] + verts[cells[c][1]] + verts[cells[c][2]]) / 3.0;
    if (inside_polygon(g, polygon)) material[c] = 1;
  }
  return Mesh(std::move(verts), std::move(cells), std::move(material), {}, BoundaryTag::Free);
}

}  // namespace avsfe
