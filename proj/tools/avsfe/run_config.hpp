#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "avsfe/studies.hpp"

namespace avsfe::cli {

struct GeometrySpec {
  enum class Kind { Square, Rectangle, Inclusion, File } kind = Kind::Square;
  double length = 1.0;
  double height = 1.0;
  int nx = 1;
  int ny = 1;
  Diagonal diagonal = Diagonal::Right;
  std::filesystem::path path;  // Kind::File
};

/// Boundary presets name edges of the bounding rectangle [0, L] x [0, H]:
/// "left", "right", "bottom", "top", or "all".
struct BoundarySpec {
  std::vector<std::string> dirichlet_edges;
  std::array<bool, 2> dirichlet_components{true, true};
  std::optional<Vector2> dirichlet_value;  // default: zero, or the exact solution
  std::vector<std::string> neumann_edges;
  Vector2 traction = Vector2::Zero();
  std::vector<PointConstraint> points;
};

struct OutputSpec {
  std::filesystem::path csv;
  std::filesystem::path vtk_dir;
  int verbosity = 1;
  bool timing = true;
};

/// Everything a run needs. Fields not mentioned in the JSON keep the study
/// defaults; command-line flags are applied on top by the caller.
struct RunConfig {
  std::optional<StudyId> study;
  StudyConfig study_config;
  bool adaptive = false;           // single solve followed by an adapt loop
  bool refinements_given = false;  // `solve` pre-refines only when set

  GeometrySpec geometry;
  bool geometry_given = false;
  std::map<int, IsotropicMaterial> materials;
  BoundarySpec boundary;
  bool boundary_given = false;
  std::string exact;  // "", "case_a" or "case_b"
  OutputSpec output;
};

/// Throws ConfigError naming the offending key.
RunConfig parse_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies the material map to the study settings (tag 0 is the single
/// material of CONVERGENCE_A, COMPARISON_B and BEAM; tags 0 and 1 are the
/// matrix and inclusion of INCLUSION).
void apply_materials(RunConfig& config);

/// Problem of the `solve` subcommand: geometry, materials, boundary presets
/// and optional manufactured solution. Validates that every cell tag has a
/// material.
ProblemSetup build_single_problem(const RunConfig& config);

StressSpace parse_stress_space(const std::string& name);
Precision parse_precision(const std::string& name);

}  // namespace avsfe::cli
