#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "avsfe/verification.hpp"

namespace avsfe {

/// Plain-text mesh:
///   <nv>            then nv lines "x y"
///   <nc>            then nc lines "v0 v1 v2 material"
///   <nb>            then nb lines "v0 v1 tag"   (0 Dirichlet, 1 Neumann, 2 Free)
void write_mesh(std::ostream& out, const Mesh& mesh);
Mesh read_mesh(std::istream& in);
void write_mesh(const std::filesystem::path& path, const Mesh& mesh);
Mesh read_mesh(const std::filesystem::path& path);

/// Legacy ASCII VTK unstructured grid with point vectors `displacement`,
/// cell tensors `stress` (cell averages) and cell scalars `eta`. `eta` may
/// be empty, in which case zeros are written.
void write_vtk(std::ostream& out, const TrialSolution& solution, const std::vector<double>& eta);
void write_vtk(const std::filesystem::path& path, const TrialSolution& solution,
               const std::vector<double>& eta);

/// CSV with the study header; NaN becomes an empty field. With `timing`
/// off, wall_s is written as 0 so repeated runs are byte-identical.
void write_csv(std::ostream& out, const std::vector<StudyRecord>& records, bool timing = true);
void write_csv(const std::filesystem::path& path, const std::vector<StudyRecord>& records,
               bool timing = true);

}  // namespace avsfe
