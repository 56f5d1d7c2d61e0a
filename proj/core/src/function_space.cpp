#include "avsfe/function_space.hpp"

#include <string>

#include "avsfe/error.hpp"

namespace avsfe {

FunctionSpace FunctionSpace::lagrange(const Mesh& mesh, int p) {
  AVSFE_REQUIRE(p >= 1 && p <= 7, ConfigError, "Lagrange degree " + std::to_string(p) + " unsupported");
  FunctionSpace s;
  s.family_ = Family::LagrangeC0;
  s.degree_ = p;
  s.num_vertices_ = mesh.num_vertices();
  const int per_edge = p - 1;
  const int per_cell = (p - 1) * (p - 2) / 2;
  const int nv = mesh.num_vertices(), nf = mesh.num_facets(), nc = mesh.num_cells();
  s.num_dofs_ = nv + nf * per_edge + nc * per_cell;
  s.dofs_per_cell_ = lagrange_dim(p);
  s.dofs_.resize(static_cast<std::size_t>(nc) * s.dofs_per_cell_);
  s.signs_.assign(s.dofs_.size(), 1.0);
  s.points_.resize(s.num_dofs_);
  const PointSet ref = lagrange_nodes(p);
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cell(c);
    const ElementGeometry g = mesh.geometry(c);
    int* d = s.dofs_.data() + static_cast<std::size_t>(c) * s.dofs_per_cell_;
    int k = 0;
    for (int i = 0; i < 3; ++i) d[k++] = cell[i];
    for (int e = 0; e < 3; ++e) {
      const int f = mesh.cell_facet(c, e);
      const bool forward = cell[kEdgeVertices[e][0]] < cell[kEdgeVertices[e][1]];
      for (int i = 0; i < per_edge; ++i) {
        d[k++] = nv + f * per_edge + (forward ? i : per_edge - 1 - i);
      }
    }
    for (int i = 0; i < per_cell; ++i) d[k++] = nv + nf * per_edge + c * per_cell + i;
    for (int i = 0; i < s.dofs_per_cell_; ++i) {
      s.points_[d[i]] = g.map(Point2(ref(i, 0), ref(i, 1)));
    }
  }
  return s;
}

FunctionSpace FunctionSpace::discontinuous(const Mesh& mesh, int p) {
  FunctionSpace s;
  s.family_ = Family::LagrangeDG;
  s.degree_ = p;
  s.dofs_per_cell_ = lagrange_dim(p);
  s.num_dofs_ = mesh.num_cells() * s.dofs_per_cell_;
  s.dofs_.resize(s.num_dofs_);
  for (int i = 0; i < s.num_dofs_; ++i) s.dofs_[i] = i;
  s.signs_.assign(s.dofs_.size(), 1.0);
  return s;
}

FunctionSpace FunctionSpace::raviart_thomas(const Mesh& mesh, int k) {
  AVSFE_REQUIRE(k >= 0 && k <= 3, ConfigError,
                "Raviart-Thomas degree " + std::to_string(k) + " unsupported");
  FunctionSpace s;
  s.family_ = Family::RaviartThomas;
  s.degree_ = k;
  const int per_edge = k + 1;
  const int per_cell = k * (k + 1);
  const int nf = mesh.num_facets(), nc = mesh.num_cells();
  s.num_dofs_ = nf * per_edge + nc * per_cell;
  s.dofs_per_cell_ = rt_dim(k);
  s.dofs_.resize(static_cast<std::size_t>(nc) * s.dofs_per_cell_);
  s.signs_.resize(s.dofs_.size());
  for (int c = 0; c < nc; ++c) {
    const auto& cell = mesh.cell(c);
    int* d = s.dofs_.data() + static_cast<std::size_t>(c) * s.dofs_per_cell_;
    double* sg = s.signs_.data() + static_cast<std::size_t>(c) * s.dofs_per_cell_;
    int idx = 0;
    for (int e = 0; e < 3; ++e) {
      const int f = mesh.cell_facet(c, e);
      const double normal_sign = mesh.facet_sign(c, e);
      const double param_sign = cell[kEdgeVertices[e][0]] < cell[kEdgeVertices[e][1]] ? 1.0 : -1.0;
      double moment_sign = 1.0;
      for (int j = 0; j < per_edge; ++j) {
        d[idx] = f * per_edge + j;
        sg[idx] = normal_sign * moment_sign;
        moment_sign *= param_sign;
        ++idx;
      }
    }
    for (int i = 0; i < per_cell; ++i) {
      d[idx] = nf * per_edge + c * per_cell + i;
      sg[idx] = 1.0;
      ++idx;
    }
  }
  return s;
}

std::vector<int> FunctionSpace::facet_dofs(const Mesh& mesh, int facet) const {
  std::vector<int> out;
  const Facet& f = mesh.facet(facet);
  switch (family_) {
    case Family::LagrangeC0: {
      out.push_back(f.vertices[0]);
      out.push_back(f.vertices[1]);
      const int per_edge = degree_ - 1;
      for (int i = 0; i < per_edge; ++i) out.push_back(num_vertices_ + facet * per_edge + i);
      break;
    }
    case Family::RaviartThomas:
      for (int j = 0; j <= degree_; ++j) out.push_back(facet * (degree_ + 1) + j);
      break;
    case Family::LagrangeDG:
      break;
  }
  return out;
}

}  // namespace avsfe
