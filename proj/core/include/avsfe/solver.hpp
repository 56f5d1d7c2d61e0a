#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "avsfe/assembly.hpp"
#include "avsfe/sparse_cholesky.hpp"

namespace avsfe {

/// Arithmetic used to form and factor the condensed matrix (Quad is
/// double-double arithmetic, about 32 digits). The condensed
/// matrix squares the element operator, so its conditioning grows like
/// (lambda/mu)^2; Auto picks the cheapest precision that keeps that product
/// with the unit roundoff below `SolverOptions::auto_precision_target`, and
/// escalates when the factorization fails or the residual stays above
/// `SolverOptions::residual_tolerance`.
enum class Precision { Auto, Double, Extended, Quad };

struct SolverOptions {
  Precision precision = Precision::Auto;
  double auto_precision_target = 1e-10;
  double residual_tolerance = 1e-10;  // Auto escalates precision above this
  int iterative_threshold = 600000;  // trial dofs above which CG is used
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 50000;
  int refinement_steps = 2;          // iterative refinement after Cholesky
  int threads = 0;                   // 0: AVSFE_THREADS or hardware concurrency
  double gram_condition_warning = 1e12;
};

/// Per-cell cached data: Cholesky factors of the Gram blocks and the
/// whitened form C_m = L_m^{-1} B_m, d_m = L_m^{-1} F_m (after lifting).
struct CellCondensation {
  std::vector<int> dofs;
  std::array<Eigen::MatrixXd, 2> chol_v;   // lower factors of the v_x, v_y blocks
  std::array<Eigen::MatrixXd, 2> v_basis;  // test restriction, empty if none
  Eigen::MatrixXd chol_w;                  // lower factor of the w-block
  Eigen::MatrixXd c;
  Eigen::VectorXd d;
};

template <class Scalar>
struct ExactSystem {
  UpperCsc<Scalar> matrix;
  std::vector<Scalar> rhs;
};

struct CondensedSystem {
  int num_dofs = 0;
  /// Full symmetric A = sum_m B_m^T G_m^{-1} B_m and b, rounded to double.
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  ConstraintSet constraints;
  std::vector<CellCondensation> cells;
  /// Upper triangle of A and b in the working precision.
  Precision precision = Precision::Double;
  std::variant<ExactSystem<double>, ExactSystem<long double>, ExactSystem<DoubleDouble>> exact;
  std::vector<std::string> warnings;
};

struct SolveStats {
  int num_dofs = 0;
  int num_cells = 0;
  std::string method;      // "cholesky" or "cg"
  std::string precision;   // "double", "extended", "quad"
  double relative_residual = 0.0;
  int iterations = 0;      // CG iterations or refinement steps
  std::size_t factor_nnz = 0;
  double assembly_seconds = 0.0;
  double solve_seconds = 0.0;
  std::vector<std::string> warnings;
};

/// Coefficients of the trial fields on a mesh; displacement-only solutions
/// have no stress block.
struct TrialSolution {
  std::shared_ptr<const Mesh> mesh;
  std::shared_ptr<const DiscreteSpacePair> spaces;
  Eigen::VectorXd coefficients;
  bool has_stress = true;
};

/// Trial fields at a fixed set of reference points, evaluated cell by cell.
struct FieldValues {
  PointSet x;                 // physical points
  Eigen::MatrixXd u;          // Q x 2
  Eigen::MatrixXd grad_u;     // Q x 4: dux/dx, dux/dy, duy/dx, duy/dy
  Eigen::MatrixXd sigma;      // Q x 4: xx, xy, yx, yy
  Eigen::MatrixXd div_sigma;  // Q x 2: row-wise divergence
};

class FieldEvaluator {
 public:
  FieldEvaluator(const TrialSolution& solution, PointSet reference_points);
  FieldValues evaluate(int cell) const;

 private:
  const TrialSolution* sol_;
  PointSet ref_;
  BasisTabulation lag_, stress_;
};

struct ErrorRepresentation {
  std::vector<Eigen::VectorXd> blocks;  // e_m over [v_x|v_y|w_xx|w_xy|w_yx|w_yy]
  std::vector<double> indicators;       // sqrt(e_m^T G_m e_m)
};

struct ProblemConfig {
  MaterialField materials;
  VectorField body_force;
  BoundaryConditions bc;
  DiscretizationOptions discretization;
  SolverOptions solver;
};

struct AvsfeResult {
  TrialSolution solution;
  ErrorRepresentation error;
  SolveStats stats;
};

/// Number of worker threads for per-cell work.
int worker_threads(const SolverOptions& opts);

/// Resolves Precision::Auto from the stiffest material ratio lambda/mu.
Precision resolve_precision(const SolverOptions& opts, const MaterialField& materials);
std::string precision_name(Precision p);

/// Factors the Gram blocks, whitens B_m and F_m, lifts constraints and
/// accumulates A and b in cell order. Throws SolverError naming the cell if a
/// Gram block is not positive definite.
CondensedSystem condense(const Mesh& mesh, std::vector<LocalBlocks> blocks,
                         const ConstraintSet& constraints, int num_dofs,
                         const SolverOptions& opts, Precision precision);

/// Re-accumulates A and b from the cached cells in another precision.
void set_precision(CondensedSystem& system, Precision precision);

/// Sparse Cholesky (or CG above the threshold). Throws SolverError on a
/// non-positive pivot.
Eigen::VectorXd solve_spd(const CondensedSystem& system, const SolverOptions& opts,
                          SolveStats* stats = nullptr);

/// e_m = G_m^{-1} (B_m x - F_m) and the indicators eta_m.
ErrorRepresentation recover_error_rep(const CondensedSystem& system, const Eigen::VectorXd& x);

AvsfeResult avsfe_solve(const ProblemConfig& config, const Mesh& mesh);

/// Classical displacement formulation with the same boundary data.
TrialSolution galerkin_solve(const ProblemConfig& config, const Mesh& mesh,
                             SolveStats* stats = nullptr);

/// Generic SPD solve of a symmetric matrix given in full (both triangles)
/// with sparse Cholesky in double; used by the Galerkin path and tests.
Eigen::VectorXd cholesky_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                               Precision precision = Precision::Double);

}  // namespace avsfe
