#pragma once

#include <vector>

#include <Eigen/Dense>

#include "avsfe/mesh.hpp"

namespace avsfe {

/// Rows are reference coordinates (xi, eta).
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, 2>;

/// Rule on the reference triangle (0,0),(1,0),(0,1); weights sum to 1/2.
struct QuadratureRule {
  int degree = 0;
  PointSet points;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre rule on [0,1].
struct LineRule {
  Eigen::VectorXd points;
  Eigen::VectorXd weights;

  int size() const { return static_cast<int>(weights.size()); }
};

inline constexpr int kMaxQuadratureDegree = 40;

/// Collapsed (Duffy) Gauss-Legendre product rule, exact to `degree`.
QuadratureRule quadrature_rule(int degree);
/// Gauss-Legendre with `n` points on [0,1].
LineRule gauss_legendre(int n);
/// Line rule exact for polynomials of `degree` on [0,1].
LineRule line_rule(int degree);

/// Points on reference edge e for parameter values s in [0,1], running from
/// local vertex kEdgeVertices[e][0] to kEdgeVertices[e][1].
PointSet edge_points(int edge, const Eigen::VectorXd& s);

enum class Family { LagrangeC0, LagrangeDG, RaviartThomas };

/// Values of a scalar or vector basis at a point set; one row per point,
/// one column per basis function. Lagrange families fill `value`, `grad_x`,
/// `grad_y`; Raviart-Thomas fills `value_x`, `value_y`, `div`.
struct BasisTabulation {
  Family family = Family::LagrangeC0;
  int degree = 0;
  int dim = 0;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad_x, grad_y;
  Eigen::MatrixXd value_x, value_y;
  Eigen::MatrixXd div;

  int num_points() const {
    return static_cast<int>(family == Family::RaviartThomas ? value_x.rows() : value.rows());
  }
};

int lagrange_dim(int degree);
int rt_dim(int degree);

/// Reference nodal points of the degree-p Lagrange element, ordered
/// vertices, edge interiors (edge 0, 1, 2 along their traversal direction),
/// then cell interior.
PointSet lagrange_nodes(int degree);

/// Nodal Lagrange basis. LagrangeDG uses the same nodal basis; the DG test
/// space uses `tabulate_orthonormal` instead.
BasisTabulation tabulate_lagrange(int degree, Family continuity, const PointSet& points);

/// Orthonormal polynomials of total degree <= r on the reference triangle:
/// the Dubiner basis in graded order, normalized through its (diagonal)
/// quadrature Gram matrix. The first function is the constant sqrt(2).
BasisTabulation tabulate_orthonormal(int degree, const PointSet& points);

/// Raviart-Thomas RT_k, dimension (k+1)(k+3). Degrees of freedom: moments of
/// the unit outward normal trace against Legendre polynomials L_0..L_k on each
/// edge (local parameter from kEdgeVertices[e][0]), then interior moments
/// against x-monomials (q, 0) and (0, q), deg q <= k-1. The basis is dual to
/// these functionals.
BasisTabulation tabulate_rt(int degree, const PointSet& points);

/// Evaluates the RT degrees of freedom of the prime basis; exposed for the
/// duality test. Returns D with D(i, j) = dof_i(basis_j).
Eigen::MatrixXd rt_duality_matrix(int degree);

/// Affine map for Lagrange gradients (J^{-T}) and contravariant Piola for
/// RT values (J v / det J) and divergences (div / det J).
BasisTabulation map_to_physical(const BasisTabulation& tab, const ElementGeometry& geom);

/// Shifted Legendre polynomial L_n on [0,1] (L_n(1) = 1).
double legendre01(int n, double s);

}  // namespace avsfe
