#include "avsfe/elements.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "avsfe/error.hpp"

namespace avsfe {

namespace {

struct Exponent {
  int a;
  int b;
};

// Graded ordering x^a y^b, a+b = 0..degree.
std::vector<Exponent> monomials(int degree) {
  std::vector<Exponent> out;
  for (int t = 0; t <= degree; ++t) {
    for (int b = 0; b <= t; ++b) out.push_back({t - b, b});
  }
  return out;
}

double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double mono(const Exponent& e, double x, double y) { return ipow(x, e.a) * ipow(y, e.b); }
double mono_dx(const Exponent& e, double x, double y) {
  return e.a == 0 ? 0.0 : e.a * ipow(x, e.a - 1) * ipow(y, e.b);
}
double mono_dy(const Exponent& e, double x, double y) {
  return e.b == 0 ? 0.0 : e.b * ipow(x, e.a) * ipow(y, e.b - 1);
}

// Monomial values and gradients at points, one column per monomial.
struct MonomialTable {
  Eigen::MatrixXd v, dx, dy;
};

MonomialTable monomial_table(const std::vector<Exponent>& ms, const PointSet& pts,
                             double cx = 0.0, double cy = 0.0) {
  const auto n = pts.rows();
  const auto m = static_cast<Eigen::Index>(ms.size());
  MonomialTable t{Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double x = pts(i, 0) - cx, y = pts(i, 1) - cy;
    for (Eigen::Index j = 0; j < m; ++j) {
      t.v(i, j) = mono(ms[j], x, y);
      t.dx(i, j) = mono_dx(ms[j], x, y);
      t.dy(i, j) = mono_dy(ms[j], x, y);
    }
  }
  return t;
}

// Dubiner basis psi_ij = P_i(a) (1 - y)^i P_j^(2i+1,0)(2y - 1), a = 2x/(1-y) - 1,
// in the graded order of `ms` (i = ms.a, j = ms.b). The factor P_i(a) (1-y)^i
// is built by its polynomial recurrence, so y = 1 needs no special case.
// The functions are L2-orthogonal on the reference triangle.
MonomialTable dubiner_table(const std::vector<Exponent>& ms, int degree, const PointSet& pts) {
  const auto n = pts.rows();
  const auto m = static_cast<Eigen::Index>(ms.size());
  MonomialTable t{Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m), Eigen::MatrixXd(n, m)};
  std::vector<double> q(degree + 1), qx(degree + 1), qy(degree + 1);
  std::vector<std::vector<double>> r(degree + 1), ry(degree + 1);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double x = pts(k, 0), y = pts(k, 1);
    const double l = 2.0 * x + y - 1.0;
    const double s = (1.0 - y) * (1.0 - y), sy = -2.0 * (1.0 - y);
    q[0] = 1.0, qx[0] = 0.0, qy[0] = 0.0;
    if (degree >= 1) q[1] = l, qx[1] = 2.0, qy[1] = 1.0;
    for (int i = 1; i < degree; ++i) {
      const double c = 2.0 * i + 1.0;
      q[i + 1] = (c * l * q[i] - i * s * q[i - 1]) / (i + 1.0);
      qx[i + 1] = (c * (2.0 * q[i] + l * qx[i]) - i * s * qx[i - 1]) / (i + 1.0);
      qy[i + 1] = (c * (q[i] + l * qy[i]) - i * (sy * q[i - 1] + s * qy[i - 1])) / (i + 1.0);
    }
    // Jacobi P_j^(alpha,0)(z), z = 2y - 1; derivatives taken in y.
    const double z = 2.0 * y - 1.0;
    for (int i = 0; i <= degree; ++i) {
      const int nj = degree - i;
      const double al = 2.0 * i + 1.0;
      auto& p = r[i];
      auto& dp = ry[i];
      p.assign(nj + 1, 1.0);
      dp.assign(nj + 1, 0.0);
      if (nj >= 1) {
        p[1] = 0.5 * ((al + 2.0) * z + al);
        dp[1] = al + 2.0;
      }
      for (int j = 2; j <= nj; ++j) {
        const double a0 = 2.0 * j * (j + al) * (2.0 * j + al - 2.0);
        const double c1 = (2.0 * j + al - 1.0) * (2.0 * j + al) * (2.0 * j + al - 2.0);
        const double a1 = c1 * z + (2.0 * j + al - 1.0) * al * al;
        const double a2 = 2.0 * (j + al - 1.0) * (j - 1.0) * (2.0 * j + al);
        p[j] = (a1 * p[j - 1] - a2 * p[j - 2]) / a0;
        dp[j] = (2.0 * c1 * p[j - 1] + a1 * dp[j - 1] - a2 * dp[j - 2]) / a0;
      }
    }
    for (Eigen::Index c = 0; c < m; ++c) {
      const int i = ms[c].a, j = ms[c].b;
      t.v(k, c) = q[i] * r[i][j];
      t.dx(k, c) = qx[i] * r[i][j];
      t.dy(k, c) = qy[i] * r[i][j] + q[i] * ry[i][j];
    }
  }
  return t;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration.
void gauss_legendre_pm1(int n, Eigen::VectorXd& x, Eigen::VectorXd& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? z : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (z * pn - pnm1) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? z : p1;
    const double pnm1 = n == 1 ? 1.0 : p0;
    dp = n * (z * pn - pnm1) / (z * z - 1.0);
    x[n - 1 - i] = z;
    w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

LineRule gauss_legendre(int n) {
  AVSFE_REQUIRE(n >= 1, ConfigError, "Gauss-Legendre rule needs at least one point");
  Eigen::VectorXd x, w;
  gauss_legendre_pm1(n, x, w);
  LineRule r;
  r.points = (x.array() + 1.0) * 0.5;
  r.weights = w * 0.5;
  return r;
}

LineRule line_rule(int degree) { return gauss_legendre(std::max(1, (degree + 2) / 2)); }

QuadratureRule quadrature_rule(int degree) {
  AVSFE_REQUIRE(degree >= 0 && degree <= kMaxQuadratureDegree, ConfigError,
                "unsupported quadrature degree " + std::to_string(degree));
  // Collapsed coordinates: x = u, y = v (1 - u), dA = (1 - u) du dv. The
  // integrand has degree degree+1 in u and degree in v.
  const int n = (degree + 2) / 2 + ((degree + 2) % 2);
  const LineRule g = gauss_legendre(std::max(1, n));
  QuadratureRule q;
  q.degree = degree;
  q.points.resize(g.size() * g.size(), 2);
  q.weights.resize(g.size() * g.size());
  int k = 0;
  for (int i = 0; i < g.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      const double u = g.points[i], v = g.points[j];
      q.points(k, 0) = u;
      q.points(k, 1) = v * (1.0 - u);
      q.weights[k] = g.weights[i] * g.weights[j] * (1.0 - u);
      ++k;
    }
  }
  return q;
}

PointSet edge_points(int edge, const Eigen::VectorXd& s) {
  static const Point2 ref[3] = {Point2(0, 0), Point2(1, 0), Point2(0, 1)};
  const Point2 a = ref[kEdgeVertices[edge][0]];
  const Point2 b = ref[kEdgeVertices[edge][1]];
  PointSet p(s.size(), 2);
  for (Eigen::Index i = 0; i < s.size(); ++i) p.row(i) = (a + s[i] * (b - a)).transpose();
  return p;
}

double legendre01(int n, double s) {
  const double z = 2.0 * s - 1.0;
  if (n == 0) return 1.0;
  double p0 = 1.0, p1 = z;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

int lagrange_dim(int degree) { return (degree + 1) * (degree + 2) / 2; }
int rt_dim(int degree) { return (degree + 1) * (degree + 3); }

PointSet lagrange_nodes(int p) {
  AVSFE_REQUIRE(p >= 1 && p <= 7, ConfigError,
                "Lagrange degree " + std::to_string(p) + " not supported");
  PointSet nodes(lagrange_dim(p), 2);
  int k = 0;
  nodes.row(k++) << 0.0, 0.0;
  nodes.row(k++) << 1.0, 0.0;
  nodes.row(k++) << 0.0, 1.0;
  for (int e = 0; e < 3; ++e) {
    Eigen::VectorXd s(p - 1);
    for (int i = 1; i < p; ++i) s[i - 1] = static_cast<double>(i) / p;
    const PointSet ep = edge_points(e, s);
    for (int i = 0; i < p - 1; ++i) nodes.row(k++) = ep.row(i);
  }
  for (int j = 1; j < p; ++j) {
    for (int i = 1; i + j < p; ++i) {
      nodes.row(k++) << static_cast<double>(i) / p, static_cast<double>(j) / p;
    }
  }
  return nodes;
}

BasisTabulation tabulate_lagrange(int degree, Family continuity, const PointSet& points) {
  AVSFE_REQUIRE(degree >= 1 && degree <= 7, ConfigError,
                "Lagrange degree " + std::to_string(degree) + " not supported");
  AVSFE_REQUIRE(continuity != Family::RaviartThomas, ConfigError,
                "tabulate_lagrange called with Raviart-Thomas family");
  const auto ms = monomials(degree);
  const PointSet nodes = lagrange_nodes(degree);
  const MonomialTable vn = monomial_table(ms, nodes);
  // phi_i = sum_j C(j, i) m_j with V C = I.
  const Eigen::MatrixXd coeff = vn.v.fullPivLu().inverse();
  const MonomialTable at = monomial_table(ms, points);
  BasisTabulation t;
  t.family = continuity;
  t.degree = degree;
  t.dim = lagrange_dim(degree);
  t.value = at.v * coeff;
  t.grad_x = at.dx * coeff;
  t.grad_y = at.dy * coeff;
  return t;
}

BasisTabulation tabulate_orthonormal(int degree, const PointSet& points) {
  AVSFE_REQUIRE(degree >= 0 && degree <= 9, ConfigError,
                "DG degree " + std::to_string(degree) + " not supported");
  const auto ms = monomials(degree);
  const QuadratureRule q = quadrature_rule(2 * degree);
  const MonomialTable mq = dubiner_table(ms, degree, q.points);
  const Eigen::MatrixXd gram = mq.v.transpose() * q.weights.asDiagonal() * mq.v;
  Eigen::LLT<Eigen::MatrixXd> llt(gram);
  AVSFE_REQUIRE(llt.info() == Eigen::Success, SolverError,
                "polynomial Gram matrix not positive definite");
  // phi = m L^{-T}: columns of coeff are the orthonormal functions.
  const Eigen::MatrixXd coeff =
      llt.matrixU().solve(Eigen::MatrixXd::Identity(gram.rows(), gram.cols()));
  const MonomialTable at = dubiner_table(ms, degree, points);
  BasisTabulation t;
  t.family = Family::LagrangeDG;
  t.degree = degree;
  t.dim = lagrange_dim(degree);
  t.value = at.v * coeff;
  t.grad_x = at.dx * coeff;
  t.grad_y = at.dy * coeff;
  return t;
}

namespace {

// Prime basis of RT_k: (m, 0), (0, m) for deg m <= k, then x m for
// homogeneous m of degree k.
struct RtPrime {
  Eigen::MatrixXd vx, vy, div;
};

RtPrime rt_prime(int k, const PointSet& pts) {
  const auto ms = monomials(k);
  const MonomialTable t = monomial_table(ms, pts);
  const auto n = pts.rows();
  const auto nm = static_cast<Eigen::Index>(ms.size());
  const Eigen::Index dim = rt_dim(k);
  RtPrime r{Eigen::MatrixXd::Zero(n, dim), Eigen::MatrixXd::Zero(n, dim),
            Eigen::MatrixXd::Zero(n, dim)};
  r.vx.leftCols(nm) = t.v;
  r.div.leftCols(nm) = t.dx;
  r.vy.middleCols(nm, nm) = t.v;
  r.div.middleCols(nm, nm) = t.dy;
  Eigen::Index col = 2 * nm;
  for (Eigen::Index j = 0; j < nm; ++j) {
    if (ms[j].a + ms[j].b != k) continue;
    for (Eigen::Index i = 0; i < n; ++i) {
      r.vx(i, col) = pts(i, 0) * t.v(i, j);
      r.vy(i, col) = pts(i, 1) * t.v(i, j);
      r.div(i, col) = (k + 2) * t.v(i, j);
    }
    ++col;
  }
  return r;
}

const Point2 kRefNormals[3] = {Point2(1.0, 1.0) / std::sqrt(2.0), Point2(-1.0, 0.0),
                               Point2(0.0, -1.0)};
const double kRefEdgeLength[3] = {std::sqrt(2.0), 1.0, 1.0};

}  // namespace

Eigen::MatrixXd rt_duality_matrix(int k) {
  AVSFE_REQUIRE(k >= 0 && k <= 3, ConfigError,
                "Raviart-Thomas degree " + std::to_string(k) + " not supported");
  const int dim = rt_dim(k);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(dim, dim);
  const LineRule lr = line_rule(2 * k + 2);
  int row = 0;
  for (int e = 0; e < 3; ++e) {
    const RtPrime pe = rt_prime(k, edge_points(e, lr.points));
    const Eigen::MatrixXd normal_trace = pe.vx * kRefNormals[e].x() + pe.vy * kRefNormals[e].y();
    for (int j = 0; j <= k; ++j) {
      for (int q = 0; q < lr.size(); ++q) {
        const double wq = lr.weights[q] * kRefEdgeLength[e] * legendre01(j, lr.points[q]);
        d.row(row) += wq * normal_trace.row(q);
      }
      ++row;
    }
  }
  if (k >= 1) {
    const QuadratureRule q = quadrature_rule(2 * k);
    const RtPrime pq = rt_prime(k, q.points);
    const auto ms = monomials(k - 1);
    const MonomialTable mt = monomial_table(ms, q.points);
    for (int comp = 0; comp < 2; ++comp) {
      const Eigen::MatrixXd& v = comp == 0 ? pq.vx : pq.vy;
      for (Eigen::Index j = 0; j < mt.v.cols(); ++j) {
        d.row(row++) = (mt.v.col(j).cwiseProduct(q.weights)).transpose() * v;
      }
    }
  }
  return d;
}

BasisTabulation tabulate_rt(int degree, const PointSet& points) {
  const Eigen::MatrixXd d = rt_duality_matrix(degree);
  const Eigen::MatrixXd coeff = d.fullPivLu().inverse();
  const RtPrime p = rt_prime(degree, points);
  BasisTabulation t;
  t.family = Family::RaviartThomas;
  t.degree = degree;
  t.dim = rt_dim(degree);
  t.value_x = p.vx * coeff;
  t.value_y = p.vy * coeff;
  t.div = p.div * coeff;
  return t;
}

BasisTabulation map_to_physical(const BasisTabulation& tab, const ElementGeometry& geom) {
  BasisTabulation out = tab;
  if (tab.family == Family::RaviartThomas) {
    const Eigen::Matrix2d& j = geom.jacobian;
    const double inv = 1.0 / geom.det_jacobian;
    out.value_x = inv * (j(0, 0) * tab.value_x + j(0, 1) * tab.value_y);
    out.value_y = inv * (j(1, 0) * tab.value_x + j(1, 1) * tab.value_y);
    out.div = inv * tab.div;
  } else {
    const Eigen::Matrix2d jit = geom.jacobian.inverse().transpose();
    out.grad_x = jit(0, 0) * tab.grad_x + jit(0, 1) * tab.grad_y;
    out.grad_y = jit(1, 0) * tab.grad_x + jit(1, 1) * tab.grad_y;
  }
  return out;
}

}  // namespace avsfe
