#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "avsfe/elements.hpp"
#include "avsfe/error.hpp"
#include "avsfe/function_space.hpp"

using namespace avsfe;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double integrate(const QuadratureRule& q, int a, int b) {
  double s = 0.0;
  for (int i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points(i, 0), a) * std::pow(q.points(i, 1), b);
  return s;
}

PointSet random_interior(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  PointSet p(n, 2);
  for (int i = 0; i < n; ++i) {
    double x = u(rng), y = u(rng);
    if (x + y > 0.95) {
      x = 0.95 - x;
      y = 0.95 - y;
      x = std::abs(x), y = std::abs(y);
    }
    p.row(i) << x, y;
  }
  return p;
}

ElementGeometry cell_geometry(std::array<Point2, 3> v) {
  return Mesh({v[0], v[1], v[2]}, {{0, 1, 2}}, {0}).geometry(0);
}

}  // namespace

TEST(Quadrature, SimpleIntegrals) {
  EXPECT_NEAR(integrate(quadrature_rule(1), 0, 0), 0.5, 1e-15);
  EXPECT_NEAR(integrate(quadrature_rule(2), 2, 0), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(integrate(quadrature_rule(4), 2, 2), 1.0 / 180.0, 1e-15);
}

TEST(Quadrature, ExactnessTable) {
  for (int deg = 1; deg <= 12; ++deg) {
    const QuadratureRule q = quadrature_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        EXPECT_NEAR(integrate(q, a, b), exact, 1e-14 * exact) << "degree " << deg << " x^" << a << " y^" << b;
      }
    }
  }
}

TEST(Quadrature, PointsInsideTriangle) {
  for (int deg : {1, 5, 12, 20}) {
    const QuadratureRule q = quadrature_rule(deg);
    for (int i = 0; i < q.size(); ++i) {
      EXPECT_GT(q.points(i, 0), 0.0);
      EXPECT_GT(q.points(i, 1), 0.0);
      EXPECT_LT(q.points(i, 0) + q.points(i, 1), 1.0);
      EXPECT_GT(q.weights[i], 0.0);
    }
  }
}

TEST(Quadrature, LineRuleExactness) {
  for (int deg = 0; deg <= 15; ++deg) {
    const LineRule r = line_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      double s = 0.0;
      for (int i = 0; i < r.size(); ++i) s += r.weights[i] * std::pow(r.points[i], a);
      EXPECT_NEAR(s, 1.0 / (a + 1), 1e-15);
    }
  }
}

TEST(Lagrange, P1AtBarycenter) {
  PointSet c(1, 2);
  c << 1.0 / 3.0, 1.0 / 3.0;
  const BasisTabulation t = tabulate_lagrange(1, Family::LagrangeC0, c);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(t.value(0, i), 1.0 / 3.0, 1e-15);
}

TEST(Lagrange, NodalKroneckerDelta) {
  for (int p = 1; p <= 5; ++p) {
    const PointSet nodes = lagrange_nodes(p);
    const BasisTabulation t = tabulate_lagrange(p, Family::LagrangeC0, nodes);
    EXPECT_LT((t.value - Eigen::MatrixXd::Identity(nodes.rows(), nodes.rows())).cwiseAbs().maxCoeff(), 1e-11)
        << "p = " << p;
  }
}

TEST(Lagrange, PartitionOfUnity) {
  const PointSet pts = random_interior(20, 4);
  for (int p = 1; p <= 5; ++p) {
    const BasisTabulation t = tabulate_lagrange(p, Family::LagrangeC0, pts);
    for (int q = 0; q < pts.rows(); ++q) {
      EXPECT_NEAR(t.value.row(q).sum(), 1.0, 1e-12);
      EXPECT_NEAR(t.grad_x.row(q).sum(), 0.0, 1e-10);
      EXPECT_NEAR(t.grad_y.row(q).sum(), 0.0, 1e-10);
    }
  }
}

TEST(Lagrange, P3GradientsMatchFiniteDifferences) {
  const PointSet pts = random_interior(10, 9);
  const double h = 1e-5;
  const BasisTabulation t = tabulate_lagrange(3, Family::LagrangeC0, pts);
  PointSet xp = pts, xm = pts, yp = pts, ym = pts;
  xp.col(0).array() += h;
  xm.col(0).array() -= h;
  yp.col(1).array() += h;
  ym.col(1).array() -= h;
  const Eigen::MatrixXd dx = (tabulate_lagrange(3, Family::LagrangeC0, xp).value -
                              tabulate_lagrange(3, Family::LagrangeC0, xm).value) / (2 * h);
  const Eigen::MatrixXd dy = (tabulate_lagrange(3, Family::LagrangeC0, yp).value -
                              tabulate_lagrange(3, Family::LagrangeC0, ym).value) / (2 * h);
  EXPECT_LE((dx - t.grad_x).cwiseAbs().maxCoeff(), 1e-6);
  EXPECT_LE((dy - t.grad_y).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Orthonormal, GramIsIdentity) {
  for (int r = 0; r <= 6; ++r) {
    const QuadratureRule q = quadrature_rule(2 * r + 2);
    const BasisTabulation t = tabulate_orthonormal(r, q.points);
    const Eigen::MatrixXd g = t.value.transpose() * q.weights.asDiagonal() * t.value;
    EXPECT_LT((g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff(), 1e-12) << "r = " << r;
  }
}

TEST(Orthonormal, GradientsMatchFiniteDifferences) {
  PointSet pts(4, 2);
  pts << 0.2, 0.3, 0.6, 0.1, 0.05, 0.9, 0.33, 0.33;
  const double h = 1e-6;
  for (int r = 1; r <= 6; ++r) {
    const BasisTabulation t = tabulate_orthonormal(r, pts);
    PointSet xp = pts, xm = pts, yp = pts, ym = pts;
    xp.col(0).array() += h;
    xm.col(0).array() -= h;
    yp.col(1).array() += h;
    ym.col(1).array() -= h;
    const Eigen::MatrixXd dx = (tabulate_orthonormal(r, xp).value - tabulate_orthonormal(r, xm).value) / (2 * h);
    const Eigen::MatrixXd dy = (tabulate_orthonormal(r, yp).value - tabulate_orthonormal(r, ym).value) / (2 * h);
    const double scale = 1.0 + t.grad_x.cwiseAbs().maxCoeff();
    EXPECT_LE((dx - t.grad_x).cwiseAbs().maxCoeff(), 1e-5 * scale) << "r = " << r;
    EXPECT_LE((dy - t.grad_y).cwiseAbs().maxCoeff(), 1e-5 * scale) << "r = " << r;
  }
}

TEST(Orthonormal, FirstFunctionIsConstant) {
  const BasisTabulation t = tabulate_orthonormal(3, quadrature_rule(4).points);
  EXPECT_LT((t.value.col(0).array() - std::sqrt(2.0)).abs().maxCoeff(), 1e-14);
  EXPECT_LT(t.grad_x.col(0).norm() + t.grad_y.col(0).norm(), 1e-14);
}

TEST(RaviartThomas, Dimensions) {
  EXPECT_EQ(rt_dim(0), 3);
  EXPECT_EQ(rt_dim(1), 8);
  EXPECT_EQ(rt_dim(2), 15);
}

// All degrees of freedom evaluated on the tabulated basis with independent
// quadrature: edge moments against L_j, then interior moments against
// (x^a y^b, 0) and (0, x^a y^b) in graded order.
TEST(RaviartThomas, BasisIsDualToDegreesOfFreedom) {
  const Point2 normals[3] = {Point2(1, 1) / std::sqrt(2.0), Point2(-1, 0), Point2(0, -1)};
  const double lengths[3] = {std::sqrt(2.0), 1.0, 1.0};
  for (int k = 0; k <= 3; ++k) {
    const int dim = rt_dim(k);
    Eigen::MatrixXd dofs = Eigen::MatrixXd::Zero(dim, dim);
    const LineRule lr = gauss_legendre(k + 4);
    int row = 0;
    for (int e = 0; e < 3; ++e) {
      const BasisTabulation t = tabulate_rt(k, edge_points(e, lr.points));
      const Eigen::MatrixXd flux = normals[e].x() * t.value_x + normals[e].y() * t.value_y;
      for (int j = 0; j <= k; ++j, ++row)
        for (int q = 0; q < lr.size(); ++q)
          dofs.row(row) += lr.weights[q] * lengths[e] * legendre01(j, lr.points[q]) * flux.row(q);
    }
    const QuadratureRule vq = quadrature_rule(2 * k + 3);
    const BasisTabulation t = tabulate_rt(k, vq.points);
    for (int comp = 0; comp < 2; ++comp) {
      for (int deg = 0; deg < k; ++deg) {
        for (int b = 0; b <= deg; ++b, ++row) {
          for (int q = 0; q < vq.size(); ++q) {
            const double m = std::pow(vq.points(q, 0), deg - b) * std::pow(vq.points(q, 1), b);
            dofs.row(row) += vq.weights[q] * m * (comp == 0 ? t.value_x.row(q) : t.value_y.row(q));
          }
        }
      }
    }
    ASSERT_EQ(row, dim);
    EXPECT_LT((dofs - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-11) << "k " << k;
  }
}

// Moments of the mapped basis against L_j on each edge recover the identity.
TEST(RaviartThomas, EdgeMomentsOfBasis) {
  for (int k = 0; k <= 2; ++k) {
    const LineRule r = line_rule(2 * k + 2);
    const Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {0});
    const ElementGeometry g = m.geometry(0);
    for (int e = 0; e < 3; ++e) {
      const BasisTabulation t = tabulate_rt(k, edge_points(e, r.points));
      const Eigen::MatrixXd flux = g.normals[e].x() * t.value_x + g.normals[e].y() * t.value_y;
      for (int j = 0; j <= k; ++j) {
        for (int b = 0; b < rt_dim(k); ++b) {
          double moment = 0.0;
          for (int q = 0; q < r.size(); ++q) moment += r.weights[q] * g.edge_lengths[e] * flux(q, b) * legendre01(j, r.points[q]);
          EXPECT_NEAR(moment, b == e * (k + 1) + j ? 1.0 : 0.0, 1e-12)
              << "k " << k << " edge " << e << " j " << j << " basis " << b;
        }
      }
    }
  }
}

TEST(RaviartThomas, Rt0NormalTraces) {
  const Mesh m({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}, {0});
  const ElementGeometry g = m.geometry(0);
  Eigen::VectorXd s(4);
  s << 0.05, 0.3, 0.6, 0.95;
  for (int e = 0; e < 3; ++e) {
    const BasisTabulation t = tabulate_rt(0, edge_points(e, s));
    const Eigen::MatrixXd flux = g.normals[e].x() * t.value_x + g.normals[e].y() * t.value_y;
    for (int q = 0; q < s.size(); ++q) {
      for (int b = 0; b < 3; ++b) EXPECT_NEAR(flux(q, b), b == e ? 1.0 / g.edge_lengths[e] : 0.0, 1e-14);
    }
  }
}

TEST(RaviartThomas, Rt0DivergenceConstant) {
  const BasisTabulation t = tabulate_rt(0, random_interior(12, 2));
  for (int b = 0; b < 3; ++b) {
    EXPECT_LT((t.div.col(b).array() - t.div(0, b)).abs().maxCoeff(), 1e-13);
  }
}

TEST(Piola, IdentityGeometryUnchanged) {
  const ElementGeometry g = cell_geometry({Point2(0, 0), Point2(1, 0), Point2(0, 1)});
  const PointSet pts = random_interior(6, 1);
  const BasisTabulation rt = tabulate_rt(1, pts);
  const BasisTabulation prt = map_to_physical(rt, g);
  EXPECT_LT((prt.value_x - rt.value_x).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((prt.div - rt.div).cwiseAbs().maxCoeff(), 1e-15);
  const BasisTabulation lag = tabulate_lagrange(2, Family::LagrangeC0, pts);
  const BasisTabulation plag = map_to_physical(lag, g);
  EXPECT_LT((plag.grad_x - lag.grad_x).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Piola, P1GradientsHalveUnderScaling) {
  const PointSet pts = random_interior(3, 5);
  const BasisTabulation lag = tabulate_lagrange(1, Family::LagrangeC0, pts);
  const auto a = map_to_physical(lag, cell_geometry({Point2(0.1, 0.1), Point2(0.6, 0.2), Point2(0.2, 0.7)}));
  const auto b = map_to_physical(lag, cell_geometry({Point2(0.2, 0.2), Point2(1.2, 0.4), Point2(0.4, 1.4)}));
  EXPECT_LT((b.grad_x - 0.5 * a.grad_x).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((b.grad_y - 0.5 * a.grad_y).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Piola, DivergenceTheoremOnSkewedCells) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    const ElementGeometry g = cell_geometry({Point2(u(rng), u(rng)), Point2(1 + u(rng), u(rng)),
                                             Point2(u(rng), 1 + u(rng))});
    for (int k = 0; k <= 2; ++k) {
      const QuadratureRule vol = quadrature_rule(2 * k + 2);
      const BasisTabulation tv = map_to_physical(tabulate_rt(k, vol.points), g);
      const Eigen::VectorXd lhs = tv.div.transpose() * vol.weights * g.det_jacobian;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lhs.size());
      const LineRule line = line_rule(2 * k + 2);
      for (int e = 0; e < 3; ++e) {
        const BasisTabulation te = map_to_physical(tabulate_rt(k, edge_points(e, line.points)), g);
        const Eigen::MatrixXd flux = g.normals[e].x() * te.value_x + g.normals[e].y() * te.value_y;
        rhs += flux.transpose() * line.weights * g.edge_lengths[e];
      }
      EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

// The shared RT dof has the same normal trace seen from both cells.
TEST(Piola, NormalTraceContinuityAcrossFacets) {
  const Mesh m = build_unit_square(2, 2, Diagonal::Crisscross);
  for (int k = 0; k <= 2; ++k) {
    const FunctionSpace rt = FunctionSpace::raviart_thomas(m, k);
    const LineRule r = line_rule(2 * k + 2);
    for (int f = 0; f < m.num_facets(); ++f) {
      const Facet& fc = m.facet(f);
      if (fc.on_boundary()) continue;
      const Point2 a = m.vertex(fc.vertices[0]), b = m.vertex(fc.vertices[1]);
      std::array<Eigen::MatrixXd, 2> traces;
      for (int side = 0; side < 2; ++side) {
        const int c = fc.cells[side], e = fc.local_edge[side];
        const ElementGeometry g = m.geometry(c);
        // Reference points of the physical points a + s (b - a) on this cell.
        PointSet ref(r.size(), 2);
        for (int q = 0; q < r.size(); ++q) {
          const Point2 x = a + r.points[q] * (b - a);
          ref.row(q) = (g.jacobian.inverse() * (x - g.vertices[0])).transpose();
        }
        const BasisTabulation t = map_to_physical(tabulate_rt(k, ref), g);
        const Point2 n = fc.cells[0] == c ? g.normals[e] : Point2(-g.normals[e]);  // facet normal
        const auto dofs = rt.cell_dofs(c);
        const auto signs = rt.cell_signs(c);
        traces[side] = Eigen::MatrixXd::Zero(r.size(), rt.num_dofs());
        for (std::size_t j = 0; j < dofs.size(); ++j) {
          traces[side].col(dofs[j]) += signs[j] * (n.x() * t.value_x.col(j) + n.y() * t.value_y.col(j));
        }
      }
      EXPECT_LT((traces[0] - traces[1]).cwiseAbs().maxCoeff(), 1e-12) << "facet " << f << " k " << k;
    }
  }
}

TEST(FunctionSpace, DofCounts) {
  const Mesh m = build_unit_square(1, 1);
  EXPECT_EQ(FunctionSpace::lagrange(m, 1).num_dofs(), 4);
  EXPECT_EQ(FunctionSpace::lagrange(m, 2).num_dofs(), 4 + 5);
  EXPECT_EQ(FunctionSpace::lagrange(m, 3).num_dofs(), 4 + 10 + 2);
  EXPECT_EQ(FunctionSpace::raviart_thomas(m, 0).num_dofs(), 5);
  EXPECT_EQ(FunctionSpace::raviart_thomas(m, 1).num_dofs(), 10 + 2 * 2);
}

TEST(Elements, UnsupportedDegreesRejected) {
  EXPECT_THROW(rt_duality_matrix(4), ConfigError);
  EXPECT_THROW(tabulate_lagrange(0, Family::LagrangeC0, quadrature_rule(1).points), ConfigError);
}
