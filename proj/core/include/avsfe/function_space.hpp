#pragma once

#include <span>
#include <vector>

#include "avsfe/elements.hpp"
#include "avsfe/mesh.hpp"

namespace avsfe {

/// Global degree-of-freedom layout of one scalar (Lagrange) or vector (RT)
/// field. Vector-valued unknowns built from several copies of a space are
/// laid out component-major by the caller.
///
/// Lagrange C0 numbering: vertices, then p-1 nodes per facet ordered from the
/// lower to the higher global vertex id, then cell interiors.
/// Raviart-Thomas numbering: k+1 moments per facet (global normal points out
/// of the lower-index cell, edge parameter runs from the lower vertex id),
/// then k(k+1) interior moments per cell. `cell_signs` maps local to global
/// basis functions: global = sign * local.
class FunctionSpace {
 public:
  static FunctionSpace lagrange(const Mesh& mesh, int degree);
  static FunctionSpace discontinuous(const Mesh& mesh, int degree);
  static FunctionSpace raviart_thomas(const Mesh& mesh, int degree);

  Family family() const { return family_; }
  int degree() const { return degree_; }
  int num_dofs() const { return num_dofs_; }
  int dofs_per_cell() const { return dofs_per_cell_; }

  std::span<const int> cell_dofs(int c) const {
    return {dofs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }
  std::span<const double> cell_signs(int c) const {
    return {signs_.data() + static_cast<std::size_t>(c) * dofs_per_cell_,
            static_cast<std::size_t>(dofs_per_cell_)};
  }

  /// Nodal point of every dof (Lagrange families only).
  const std::vector<Point2>& dof_points() const { return points_; }

  /// Dofs supported on the closed facet: vertex and edge nodes for C0,
  /// the k+1 normal moments for RT.
  std::vector<int> facet_dofs(const Mesh& mesh, int facet) const;

 private:
  Family family_ = Family::LagrangeC0;
  int degree_ = 0;
  int num_dofs_ = 0;
  int dofs_per_cell_ = 0;
  int num_vertices_ = 0;
  std::vector<int> dofs_;
  std::vector<double> signs_;
  std::vector<Point2> points_;
};

}  // namespace avsfe
