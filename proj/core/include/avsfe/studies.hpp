#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "avsfe/adaptivity.hpp"

namespace avsfe {

enum class StudyId { ConvergenceA, ComparisonB, Inclusion, Beam };

StudyId parse_study_id(std::string_view name);  // "convergence_a", ... ; throws ConfigError
std::string study_name(StudyId id);

/// A manufactured or physical problem ready to solve.
struct ProblemSetup {
  Mesh mesh;
  ProblemConfig config;
  std::optional<ExactSolution> exact;
};

/// Unit square, homogeneous Dirichlet everywhere, body force from `exact`.
ProblemSetup manufactured_problem(const ExactSolution& exact, Mesh mesh,
                                  const DiscretizationOptions& disc, const SolverOptions& solver);

struct InclusionParameters {
  Point2 center{0.5, 0.5};
  double radius = 0.15;
  int segments = 250;
  double target_h = 0.05;
  double clamped_fraction = 1.0;  // centred portion of the left edge that is clamped
  Vector2 traction{100.0, 0.0};   // on the right edge
  IsotropicMaterial matrix = from_engineering(1500.0, 0.49);
  IsotropicMaterial inclusion = from_engineering(10000.0, 0.3);
};

ProblemSetup inclusion_problem(const InclusionParameters& params, const DiscretizationOptions& disc,
                               const SolverOptions& solver);

struct BeamParameters {
  double length = 2.0;
  double height = 0.2;
  double youngs_modulus = 1.5;
  double poisson_ratio = 0.5 - 1e-9;
  double load = 3.33;  // downward traction on the top edge
};

/// u_x = 0 on the left edge, both components pinned at (0, 0), load on top,
/// remaining facets traction free. Mesh: 2 x 1 squares, 4 cells.
ProblemSetup beam_problem(const BeamParameters& params, const DiscretizationOptions& disc,
                          const SolverOptions& solver);

struct StudySeries {
  std::string label;  // "avsfe", "galerkin", "rt", "c0", or "p<k>"
  std::vector<StudyRecord> records;
};

struct StudyConfig {
  DiscretizationOptions discretization{.p = 0};  // p = 0 selects the study default
  std::vector<int> degrees;              // CONVERGENCE_A: empty means {discretization.p}
  int refinements = 5;
  std::optional<IsotropicMaterial> material;  // replaces the study default for single-material runs
  InclusionParameters inclusion;
  BeamParameters beam;
  AdaptOptions adapt{0.5, 12, 0.0, MarkingConvention::Squared};
  std::vector<StressSpace> inclusion_spaces{StressSpace::RtRows, StressSpace::C0Tensor};
  bool galerkin_baseline = true;  // COMPARISON_B and BEAM
  NeumannMode neumann_mode = NeumannMode::Weak;  // INCLUSION and BEAM tractions
  SolverOptions solver;
  /// Called after every AVS-FE solve (for VTK output and progress).
  std::function<void(const std::string& label, int step, const Mesh& mesh,
                     const AvsfeResult& result)>
      on_solve;
};

/// Defaults per study:
///   CONVERGENCE_A  2-cell unit square, E = 1500, nu = 0.4999, RT rows
///   COMPARISON_B   8-cell unit square, E = 1500, nu = 0.49999999, p = 1 with RT0
///   INCLUSION      adaptive, p = 2, RT1 and C0 stresses
///   BEAM           p = 2 with RT1, uniform refinements of the 4-cell beam
std::vector<StudySeries> run_study(StudyId id, const StudyConfig& config);

}  // namespace avsfe
