#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "avsfe/elements.hpp"
#include "avsfe/function_space.hpp"
#include "avsfe/materials.hpp"
#include "avsfe/mesh.hpp"

namespace avsfe {

using Vector2 = Eigen::Vector2d;
using VectorField = std::function<Vector2(const Point2&)>;

enum class StressSpace { RtRows, C0Tensor };
enum class NeumannMode { Weak, Strong };

struct DiscretizationOptions {
  int p = 1;                               // displacement degree (C0 Lagrange)
  StressSpace stress = StressSpace::RtRows;
  int rt_degree = -1;                      // RT_k per stress row; default p-1
  int delta_p = 0;                         // test enrichment, r = p + delta_p
  int quadrature_degree = -1;              // default 2 max(p, r) + 2
};

/// Trial and test spaces of the mixed displacement/stress formulation.
///
/// Global trial vector layout: [u_x | u_y | stress], where stress is
/// [row 0 | row 1] of RT fields or [s_xx | s_xy | s_yx | s_yy] of C0 fields.
/// Local trial columns follow the same order per cell. Local test rows are
/// [v_x | v_y | w_xx | w_xy | w_yx | w_yy], each an orthonormal DG_r block.
class DiscreteSpacePair {
 public:
  DiscreteSpacePair(const Mesh& mesh, const DiscretizationOptions& opts);

  int p() const { return p_; }
  int rt_degree() const { return k_; }
  int r() const { return r_; }
  StressSpace stress_space() const { return stress_; }
  int quadrature_degree() const { return quad_degree_; }

  const FunctionSpace& displacement() const { return displacement_; }
  const FunctionSpace& stress() const { return stress_space_; }

  int num_displacement_dofs() const { return 2 * displacement_.num_dofs(); }
  int num_stress_dofs() const { return stress_components() * stress_space_.num_dofs(); }
  int num_trial_dofs() const { return num_displacement_dofs() + num_stress_dofs(); }
  int stress_offset() const { return num_displacement_dofs(); }
  /// Number of stress blocks: 2 RT rows or 4 scalar components.
  int stress_components() const { return stress_ == StressSpace::RtRows ? 2 : 4; }

  int test_block() const { return lagrange_dim(r_); }
  int test_dofs_per_cell() const { return 6 * test_block(); }
  int trial_dofs_per_cell() const {
    return 2 * displacement_.dofs_per_cell() + stress_components() * stress_space_.dofs_per_cell();
  }

  /// Global ids and orientation signs of the local trial columns of cell c.
  void cell_trial_dofs(int c, std::vector<int>& dofs, std::vector<double>& signs) const;

 private:
  int p_, k_, r_, quad_degree_;
  StressSpace stress_;
  FunctionSpace displacement_;
  FunctionSpace stress_space_;
};

struct PointConstraint {
  Point2 location;
  std::array<bool, 2> components{true, true};
  Vector2 value = Vector2::Zero();
};

/// Boundary data. Dirichlet-tagged facets constrain the masked displacement
/// components to `dirichlet_value` (zero when unset); unmasked components on
/// those facets are traction free. Neumann-tagged facets carry `traction`;
/// Free facets are traction free.
struct BoundaryConditions {
  std::array<bool, 2> dirichlet_components{true, true};
  VectorField dirichlet_value;
  VectorField traction;
  std::vector<PointConstraint> point_constraints;
  NeumannMode neumann_mode = NeumannMode::Weak;

  /// True when component `comp` of the displacement is prescribed on the
  /// facet (traction for that component is then unknown).
  bool essential(const Mesh& mesh, int facet, int comp) const;
  /// Prescribed traction component on a boundary facet where it is natural.
  double traction_component(const Mesh& mesh, int facet, int comp, const Point2& x) const;
};

/// Prescribed trial values, keyed by global trial dof.
struct ConstraintSet {
  std::map<int, double> values;

  bool contains(int dof) const { return values.count(dof) != 0; }
  std::size_t size() const { return values.size(); }
};

/// Per-cell data for the condensed system.
struct LocalBlocks {
  Eigen::MatrixXd gram_v;  // scalar block: h^2 grad.grad + mass, repeated for v_x, v_y
  Eigen::MatrixXd gram_w;  // scalar mass block, repeated for the 4 w components
  Eigen::MatrixXd form;    // B_m: test rows x local trial columns (global orientation)
  Eigen::VectorXd load;    // F_m
  std::vector<int> dofs;   // global trial ids of the columns
  /// Columns span the admissible v_x / v_y coefficients when the cell touches
  /// the Dirichlet boundary (test traces vanish there); empty otherwise.
  std::array<Eigen::MatrixXd, 2> test_restriction;

  /// Full block-diagonal G_m of the unrestricted test space.
  Eigen::MatrixXd gram() const;
};

/// Reference tabulations shared by every cell of a discretization.
class ElementKernel {
 public:
  explicit ElementKernel(const DiscreteSpacePair& spaces);

  const DiscreteSpacePair& spaces() const { return *spaces_; }
  const QuadratureRule& volume_rule() const { return volume_; }
  const LineRule& facet_rule() const { return facet_; }

  /// h_m^2 (grad v, grad v) + (v, v) on one scalar DG block.
  Eigen::MatrixXd gram_v(const ElementGeometry& geom) const;
  Eigen::MatrixXd gram_w(const ElementGeometry& geom) const;

  /// Element form with global orientation signs applied to the stress
  /// columns. `keep_facet[e][i]` retains the trial term -(sigma n)_i v_i on
  /// local edge e.
  Eigen::MatrixXd form(const ElementGeometry& geom, const IsotropicMaterial& mat,
                       const std::array<std::array<bool, 2>, 3>& keep_facet,
                       std::span<const double> signs) const;

  /// Body-force and traction contributions; `traction[e]` (if set) is the
  /// traction on local edge e, applied to components flagged in `apply`.
  Eigen::VectorXd load(const ElementGeometry& geom, const VectorField& body_force,
                       const std::array<std::optional<VectorField>, 3>& traction,
                       const std::array<std::array<bool, 2>, 3>& apply) const;

  /// Displacement-only stiffness (Bubnov-Galerkin) on the p Lagrange space.
  Eigen::MatrixXd stiffness(const ElementGeometry& geom, const IsotropicMaterial& mat) const;

  // Tabulations on the reference cell.
  const BasisTabulation& test_volume() const { return test_v_; }
  const BasisTabulation& lagrange_volume() const { return lag_v_; }
  const BasisTabulation& rt_volume() const { return rt_v_; }
  const BasisTabulation& test_edge(int e) const { return test_e_[e]; }
  const BasisTabulation& lagrange_edge(int e) const { return lag_e_[e]; }
  const BasisTabulation& rt_edge(int e) const { return rt_e_[e]; }

 private:
  const DiscreteSpacePair* spaces_;
  QuadratureRule volume_;
  LineRule facet_;
  BasisTabulation test_v_, lag_v_, rt_v_;
  std::array<BasisTabulation, 3> test_e_, lag_e_, rt_e_;
};

/// Full G_m of cell `cell`.
Eigen::MatrixXd local_gram(const Mesh& mesh, int cell, const ElementKernel& kernel);

/// B_m of cell `cell` with the facet treatment implied by `bc`.
Eigen::MatrixXd local_form(const Mesh& mesh, int cell, const ElementKernel& kernel,
                           const MaterialField& materials, const BoundaryConditions& bc);

/// F_m of cell `cell`. In weak Neumann mode the prescribed tractions enter
/// here; in strong mode they are imposed through constraints instead.
Eigen::VectorXd local_load(const Mesh& mesh, int cell, const ElementKernel& kernel,
                           const VectorField& body_force, const BoundaryConditions& bc);

/// Basis of the v_i test coefficients whose trace vanishes on the cell's
/// Dirichlet facets (component i essential) and at pinned vertices. Empty
/// matrix when no condition applies.
std::array<Eigen::MatrixXd, 2> test_restriction(const Mesh& mesh, int cell,
                                                const ElementKernel& kernel,
                                                const BoundaryConditions& bc);

/// All blocks of one cell, before constraint lifting.
LocalBlocks local_blocks(const Mesh& mesh, int cell, const ElementKernel& kernel,
                         const MaterialField& materials, const VectorField& body_force,
                         const BoundaryConditions& bc);

/// Moves constrained columns of B_m into F_m and zeroes them.
void apply_constraints(LocalBlocks& blocks, const ConstraintSet& constraints);

/// Displacement constraints (Dirichlet facets, pinned points) plus, in strong
/// Neumann mode, RT normal-moment constraints on natural facets.
ConstraintSet dirichlet_constraints(const Mesh& mesh, const DiscreteSpacePair& spaces,
                                    const BoundaryConditions& bc);

/// Classical displacement formulation on cell `cell`: stiffness and load.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> galerkin_local(const Mesh& mesh, int cell,
                                                           const ElementKernel& kernel,
                                                           const MaterialField& materials,
                                                           const VectorField& body_force,
                                                           const BoundaryConditions& bc);

}  // namespace avsfe
