#include "avsfe/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "avsfe/error.hpp"

namespace avsfe {

namespace {

template <class T>
T read_value(std::istream& in, const char* what) {
  T v{};
  AVSFE_REQUIRE(static_cast<bool>(in >> v), IoError, std::string("mesh file: cannot read ") + what);
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    AVSFE_REQUIRE(!ec, IoError, "cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path);
  AVSFE_REQUIRE(out.good(), IoError, "cannot open " + path.string() + " for writing");
  return out;
}

void check_written(const std::ofstream& out, const std::filesystem::path& path) {
  AVSFE_REQUIRE(out.good(), IoError, "write to " + path.string() + " failed");
}

}  // namespace

void write_mesh(std::ostream& out, const Mesh& mesh) {
  out << std::setprecision(17);
  out << mesh.num_vertices() << '\n';
  for (const Point2& x : mesh.vertices()) out << x.x() << ' ' << x.y() << '\n';
  out << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& v = mesh.cell(c);
    out << v[0] << ' ' << v[1] << ' ' << v[2] << ' ' << mesh.material(c) << '\n';
  }
  const auto boundary = mesh.boundary_description();
  out << boundary.size() << '\n';
  for (const BoundaryFacet& b : boundary) {
    out << b.v0 << ' ' << b.v1 << ' ' << static_cast<int>(b.tag) << '\n';
  }
}

Mesh read_mesh(std::istream& in) {
  const int nv = read_value<int>(in, "vertex count");
  AVSFE_REQUIRE(nv >= 3, IoError, "mesh file: need at least 3 vertices");
  std::vector<Point2> verts(nv);
  for (auto& x : verts) {
    x.x() = read_value<double>(in, "vertex");
    x.y() = read_value<double>(in, "vertex");
  }
  const int nc = read_value<int>(in, "cell count");
  AVSFE_REQUIRE(nc >= 1, IoError, "mesh file: need at least one cell");
  std::vector<std::array<int, 3>> cells(nc);
  std::vector<int> material(nc);
  for (int c = 0; c < nc; ++c) {
    for (int& v : cells[c]) {
      v = read_value<int>(in, "cell");
      AVSFE_REQUIRE(v >= 0 && v < nv, IoError, "mesh file: cell vertex out of range");
    }
    material[c] = read_value<int>(in, "material tag");
  }
  std::vector<BoundaryFacet> boundary;
  int nb = 0;
  if (in >> nb) {
    for (int i = 0; i < nb; ++i) {
      const int v0 = read_value<int>(in, "boundary facet");
      const int v1 = read_value<int>(in, "boundary facet");
      const int tag = read_value<int>(in, "boundary tag");
      AVSFE_REQUIRE(tag >= 0 && tag <= 2, IoError, "mesh file: boundary tag must be 0, 1 or 2");
      boundary.push_back({v0, v1, static_cast<BoundaryTag>(tag)});
    }
  }
  return Mesh(std::move(verts), std::move(cells), std::move(material), std::move(boundary));
}

void write_mesh(const std::filesystem::path& path, const Mesh& mesh) {
  std::ofstream out = open_out(path);
  write_mesh(out, mesh);
  check_written(out, path);
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  AVSFE_REQUIRE(in.good(), IoError, "cannot open " + path.string());
  try {
    return read_mesh(in);
  } catch (const Error& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

void write_vtk(std::ostream& out, const TrialSolution& solution, const std::vector<double>& eta) {
  const Mesh& mesh = *solution.mesh;
  AVSFE_REQUIRE(eta.empty() || static_cast<int>(eta.size()) == mesh.num_cells(), ConfigError,
                "eta must have one value per cell");
  PointSet corners(3, 2);
  corners << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  const FieldEvaluator eval(solution, corners);
  std::vector<Vector2> disp(mesh.num_vertices(), Vector2::Zero());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const FieldValues v = eval.evaluate(c);
    for (int i = 0; i < 3; ++i) disp[mesh.cell(c)[i]] = Vector2(v.u(i, 0), v.u(i, 1));
  }
  const std::vector<Eigen::Vector4d> sigma = cell_average_stress(solution);

  out << std::setprecision(12);
  out << "# vtk DataFile Version 3.0\navsfe solution\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Point2& x : mesh.vertices()) out << x.x() << ' ' << x.y() << " 0\n";
  out << "CELLS " << mesh.num_cells() << ' ' << 4 * mesh.num_cells() << '\n';
  for (const auto& c : mesh.cells()) out << "3 " << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  for (int c = 0; c < mesh.num_cells(); ++c) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << "\nVECTORS displacement double\n";
  for (const Vector2& u : disp) out << u.x() << ' ' << u.y() << " 0\n";
  out << "CELL_DATA " << mesh.num_cells() << "\nTENSORS stress double\n";
  for (const auto& s : sigma) {
    out << s[0] << ' ' << s[1] << " 0\n" << s[2] << ' ' << s[3] << " 0\n0 0 0\n";
  }
  out << "SCALARS eta double 1\nLOOKUP_TABLE default\n";
  for (int c = 0; c < mesh.num_cells(); ++c) out << (eta.empty() ? 0.0 : eta[c]) << '\n';
}

void write_vtk(const std::filesystem::path& path, const TrialSolution& solution,
               const std::vector<double>& eta) {
  std::ofstream out = open_out(path);
  write_vtk(out, solution, eta);
  check_written(out, path);
}

void write_csv(std::ostream& out, const std::vector<StudyRecord>& records, bool timing) {
  out << "step,h_max,ndof,l2_u,h1_u,hdiv_sig,u_norm,energy_est,strain_energy,rate_l2,rate_h1,"
         "rate_energy,wall_s\n";
  auto field = [&](double v) {
    out << ',';
    if (std::isfinite(v)) out << v;
  };
  out << std::setprecision(10);
  for (const StudyRecord& r : records) {
    out << r.step;
    field(r.h_max);
    out << ',' << r.ndof;
    field(r.l2_u);
    field(r.h1_u);
    field(r.hdiv_sigma);
    field(r.u_norm);
    field(r.energy_estimate);
    field(r.strain_energy);
    field(r.rate_l2);
    field(r.rate_h1);
    field(r.rate_energy);
    out << ',' << std::setprecision(3) << std::fixed << (timing ? r.wall_seconds : 0.0) << std::defaultfloat
        << std::setprecision(10) << '\n';
  }
}

void write_csv(const std::filesystem::path& path, const std::vector<StudyRecord>& records,
               bool timing) {
  std::ofstream out = open_out(path);
  write_csv(out, records, timing);
  check_written(out, path);
}

}  // namespace avsfe
