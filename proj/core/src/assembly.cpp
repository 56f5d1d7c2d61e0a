#include "avsfe/assembly.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "avsfe/error.hpp"

namespace avsfe {

namespace {

int default_rt_degree(int p) { return std::max(p - 1, 0); }

PointSet volume_points(const ElementGeometry& geom, const QuadratureRule& rule) {
  PointSet x(rule.size(), 2);
  for (int q = 0; q < rule.size(); ++q) {
    x.row(q) = geom.map(Point2(rule.points(q, 0), rule.points(q, 1))).transpose();
  }
  return x;
}

Point2 edge_point(const ElementGeometry& geom, int e, double s) {
  const Point2& a = geom.vertices[kEdgeVertices[e][0]];
  const Point2& b = geom.vertices[kEdgeVertices[e][1]];
  return a + s * (b - a);
}

}  // namespace

DiscreteSpacePair::DiscreteSpacePair(const Mesh& mesh, const DiscretizationOptions& opts)
    : p_(opts.p),
      k_(opts.rt_degree >= 0 ? opts.rt_degree : default_rt_degree(opts.p)),
      r_(opts.p + opts.delta_p),
      quad_degree_(0),
      stress_(opts.stress) {
  AVSFE_REQUIRE(opts.p >= 1 && opts.p <= 7, ConfigError,
                "displacement degree p=" + std::to_string(opts.p) + " outside 1..7");
  AVSFE_REQUIRE(opts.delta_p >= 0 && opts.delta_p <= 2, ConfigError,
                "test enrichment delta_p=" + std::to_string(opts.delta_p) + " outside 0..2");
  quad_degree_ = opts.quadrature_degree > 0 ? opts.quadrature_degree : 2 * std::max(p_, r_) + 2;
  AVSFE_REQUIRE(quad_degree_ <= kMaxQuadratureDegree, ConfigError,
                "quadrature degree " + std::to_string(quad_degree_) + " exceeds " +
                    std::to_string(kMaxQuadratureDegree));
  displacement_ = FunctionSpace::lagrange(mesh, p_);
  if (stress_ == StressSpace::RtRows) {
    stress_space_ = FunctionSpace::raviart_thomas(mesh, k_);
  } else {
    stress_space_ = FunctionSpace::lagrange(mesh, p_);
  }
}

void DiscreteSpacePair::cell_trial_dofs(int c, std::vector<int>& dofs,
                                        std::vector<double>& signs) const {
  dofs.clear();
  signs.clear();
  const int nu = displacement_.num_dofs();
  const auto ud = displacement_.cell_dofs(c);
  for (int comp = 0; comp < 2; ++comp) {
    for (int d : ud) {
      dofs.push_back(comp * nu + d);
      signs.push_back(1.0);
    }
  }
  const int ns = stress_space_.num_dofs();
  const auto sd = stress_space_.cell_dofs(c);
  const auto ss = stress_space_.cell_signs(c);
  for (int comp = 0; comp < stress_components(); ++comp) {
    for (std::size_t i = 0; i < sd.size(); ++i) {
      dofs.push_back(stress_offset() + comp * ns + sd[i]);
      signs.push_back(ss[i]);
    }
  }
}

bool BoundaryConditions::essential(const Mesh& mesh, int facet, int comp) const {
  return mesh.boundary_tag(facet) == BoundaryTag::Dirichlet && dirichlet_components[comp];
}

double BoundaryConditions::traction_component(const Mesh& mesh, int facet, int comp,
                                              const Point2& x) const {
  if (mesh.boundary_tag(facet) != BoundaryTag::Neumann || !traction) return 0.0;
  return traction(x)[comp];
}

Eigen::MatrixXd LocalBlocks::gram() const {
  const int n = static_cast<int>(gram_v.rows());
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(6 * n, 6 * n);
  for (int b = 0; b < 2; ++b) g.block(b * n, b * n, n, n) = gram_v;
  for (int b = 2; b < 6; ++b) g.block(b * n, b * n, n, n) = gram_w;
  return g;
}

ElementKernel::ElementKernel(const DiscreteSpacePair& spaces)
    : spaces_(&spaces),
      volume_(quadrature_rule(spaces.quadrature_degree())),
      facet_(line_rule(2 * std::max(spaces.p(), spaces.r()) + 2)) {
  const int r = spaces.r();
  const int p = spaces.p();
  test_v_ = tabulate_orthonormal(r, volume_.points);
  lag_v_ = tabulate_lagrange(p, Family::LagrangeC0, volume_.points);
  const bool rt = spaces.stress_space() == StressSpace::RtRows;
  if (rt) rt_v_ = tabulate_rt(spaces.rt_degree(), volume_.points);
  for (int e = 0; e < 3; ++e) {
    const PointSet pts = edge_points(e, facet_.points);
    test_e_[e] = tabulate_orthonormal(r, pts);
    lag_e_[e] = tabulate_lagrange(p, Family::LagrangeC0, pts);
    if (rt) rt_e_[e] = tabulate_rt(spaces.rt_degree(), pts);
  }
}

Eigen::MatrixXd ElementKernel::gram_v(const ElementGeometry& geom) const {
  const BasisTabulation t = map_to_physical(test_v_, geom);
  const Eigen::VectorXd w = volume_.weights * geom.det_jacobian;
  const double h2 = geom.diameter * geom.diameter;
  return h2 * (t.grad_x.transpose() * w.asDiagonal() * t.grad_x +
               t.grad_y.transpose() * w.asDiagonal() * t.grad_y) +
         t.value.transpose() * w.asDiagonal() * t.value;
}

Eigen::MatrixXd ElementKernel::gram_w(const ElementGeometry& geom) const {
  const Eigen::VectorXd w = volume_.weights * geom.det_jacobian;
  return test_v_.value.transpose() * w.asDiagonal() * test_v_.value;
}

Eigen::MatrixXd ElementKernel::form(const ElementGeometry& geom, const IsotropicMaterial& mat,
                                    const std::array<std::array<bool, 2>, 3>& keep_facet,
                                    std::span<const double> signs) const {
  const DiscreteSpacePair& sp = *spaces_;
  const int nr = sp.test_block();
  const int np = lagrange_dim(sp.p());
  const bool rt = sp.stress_space() == StressSpace::RtRows;
  const int ns = rt ? rt_dim(sp.rt_degree()) : np;
  const int ncol = 2 * np + sp.stress_components() * ns;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(6 * nr, ncol);

  const BasisTabulation tv = map_to_physical(test_v_, geom);
  const BasisTabulation lv = map_to_physical(lag_v_, geom);
  const Eigen::VectorXd w = volume_.weights * geom.det_jacobian;
  const Eigen::MatrixXd wv = w.asDiagonal() * tv.value;  // Q x nr
  const Eigen::MatrixXd wgx = w.asDiagonal() * tv.grad_x;
  const Eigen::MatrixXd wgy = w.asDiagonal() * tv.grad_y;

  // -(E eps(u), w)
  const Eigen::MatrixXd mx = wv.transpose() * lv.grad_x;
  const Eigen::MatrixXd my = wv.transpose() * lv.grad_y;
  const double lam = mat.lambda, mu = mat.mu;
  const int wxx = 2 * nr, wxy = 3 * nr, wyx = 4 * nr, wyy = 5 * nr;
  b.block(wxx, 0, nr, np) = -(2.0 * mu + lam) * mx;
  b.block(wxx, np, nr, np) = -lam * my;
  b.block(wyy, 0, nr, np) = -lam * mx;
  b.block(wyy, np, nr, np) = -(2.0 * mu + lam) * my;
  for (int row : {wxy, wyx}) {
    b.block(row, 0, nr, np) = -mu * my;
    b.block(row, np, nr, np) = -mu * mx;
  }

  const int s0 = 2 * np;
  if (rt) {
    const BasisTabulation rv = map_to_physical(rt_v_, geom);
    const Eigen::MatrixXd wrx = wv.transpose() * rv.value_x;
    const Eigen::MatrixXd wry = wv.transpose() * rv.value_y;
    const Eigen::MatrixXd grad_term = wgx.transpose() * rv.value_x + wgy.transpose() * rv.value_y;
    for (int i = 0; i < 2; ++i) {
      const int col = s0 + i * ns;
      b.block((2 + 2 * i) * nr, col, nr, ns) = wrx;
      b.block((3 + 2 * i) * nr, col, nr, ns) = wry;
      b.block(i * nr, col, nr, ns) = grad_term;
    }
    for (int e = 0; e < 3; ++e) {
      if (!keep_facet[e][0] && !keep_facet[e][1]) continue;
      const BasisTabulation re = map_to_physical(rt_e_[e], geom);
      const Eigen::VectorXd we = facet_.weights * geom.edge_lengths[e];
      const Point2& n = geom.normals[e];
      const Eigen::MatrixXd flux = n.x() * re.value_x + n.y() * re.value_y;
      const Eigen::MatrixXd term = (we.asDiagonal() * test_e_[e].value).transpose() * flux;
      for (int i = 0; i < 2; ++i) {
        if (keep_facet[e][i]) b.block(i * nr, s0 + i * ns, nr, ns) -= term;
      }
    }
  } else {
    const Eigen::MatrixXd mass = wv.transpose() * lv.value;
    const Eigen::MatrixXd gx = wgx.transpose() * lv.value;
    const Eigen::MatrixXd gy = wgy.transpose() * lv.value;
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        const int comp = 2 * i + j;
        const int col = s0 + comp * np;
        b.block((2 + comp) * nr, col, nr, np) = mass;
        b.block(i * nr, col, nr, np) = j == 0 ? gx : gy;
      }
    }
    for (int e = 0; e < 3; ++e) {
      if (!keep_facet[e][0] && !keep_facet[e][1]) continue;
      const Eigen::VectorXd we = facet_.weights * geom.edge_lengths[e];
      const Eigen::MatrixXd term = (we.asDiagonal() * test_e_[e].value).transpose() * lag_e_[e].value;
      const Point2& n = geom.normals[e];
      for (int i = 0; i < 2; ++i) {
        if (!keep_facet[e][i]) continue;
        b.block(i * nr, s0 + (2 * i) * np, nr, np) -= n.x() * term;
        b.block(i * nr, s0 + (2 * i + 1) * np, nr, np) -= n.y() * term;
      }
    }
  }
  if (!signs.empty()) {
    for (int c = 0; c < ncol; ++c) {
      if (signs[c] != 1.0) b.col(c) *= signs[c];
    }
  }
  return b;
}

Eigen::VectorXd ElementKernel::load(const ElementGeometry& geom, const VectorField& body_force,
                                    const std::array<std::optional<VectorField>, 3>& traction,
                                    const std::array<std::array<bool, 2>, 3>& apply) const {
  const int nr = spaces_->test_block();
  Eigen::VectorXd f = Eigen::VectorXd::Zero(6 * nr);
  if (body_force) {
    const PointSet x = volume_points(geom, volume_);
    Eigen::VectorXd fx(volume_.size()), fy(volume_.size());
    for (int q = 0; q < volume_.size(); ++q) {
      const Vector2 v = body_force(x.row(q).transpose());
      fx[q] = v.x();
      fy[q] = v.y();
    }
    const Eigen::VectorXd w = volume_.weights * geom.det_jacobian;
    f.segment(0, nr) = test_v_.value.transpose() * w.cwiseProduct(fx);
    f.segment(nr, nr) = test_v_.value.transpose() * w.cwiseProduct(fy);
  }
  for (int e = 0; e < 3; ++e) {
    if (!traction[e] || !(apply[e][0] || apply[e][1])) continue;
    const Eigen::VectorXd we = facet_.weights * geom.edge_lengths[e];
    Eigen::VectorXd tx(facet_.size()), ty(facet_.size());
    for (int q = 0; q < facet_.size(); ++q) {
      const Vector2 t = (*traction[e])(edge_point(geom, e, facet_.points[q]));
      tx[q] = t.x();
      ty[q] = t.y();
    }
    if (apply[e][0]) f.segment(0, nr) += test_e_[e].value.transpose() * we.cwiseProduct(tx);
    if (apply[e][1]) f.segment(nr, nr) += test_e_[e].value.transpose() * we.cwiseProduct(ty);
  }
  return f;
}

Eigen::MatrixXd ElementKernel::stiffness(const ElementGeometry& geom,
                                         const IsotropicMaterial& mat) const {
  const BasisTabulation lv = map_to_physical(lag_v_, geom);
  const int np = lv.dim;
  const Eigen::VectorXd w = volume_.weights * geom.det_jacobian;
  const Eigen::MatrixXd xx = lv.grad_x.transpose() * w.asDiagonal() * lv.grad_x;
  const Eigen::MatrixXd yy = lv.grad_y.transpose() * w.asDiagonal() * lv.grad_y;
  const Eigen::MatrixXd xy = lv.grad_x.transpose() * w.asDiagonal() * lv.grad_y;
  const double lam = mat.lambda, mu = mat.mu;
  Eigen::MatrixXd k(2 * np, 2 * np);
  k.block(0, 0, np, np) = (2.0 * mu + lam) * xx + mu * yy;
  k.block(0, np, np, np) = lam * xy + mu * xy.transpose();
  k.block(np, 0, np, np) = k.block(0, np, np, np).transpose();
  k.block(np, np, np, np) = (2.0 * mu + lam) * yy + mu * xx;
  return k;
}

namespace {

// keep[e][i]: trial facet term retained for row i on local edge e.
// natural[e][i]: prescribed traction enters the load on local edge e.
struct FacetTreatment {
  std::array<std::array<bool, 2>, 3> keep{};
  std::array<std::array<bool, 2>, 3> natural{};
  std::array<std::optional<VectorField>, 3> traction;
};

FacetTreatment facet_treatment(const Mesh& mesh, int cell, const BoundaryConditions& bc,
                               bool strong) {
  FacetTreatment t;
  for (int e = 0; e < 3; ++e) {
    const int f = mesh.cell_facet(cell, e);
    const bool boundary = mesh.facet(f).on_boundary();
    for (int i = 0; i < 2; ++i) {
      const bool natural = boundary && !bc.essential(mesh, f, i);
      t.natural[e][i] = natural && !strong;
      t.keep[e][i] = !t.natural[e][i];
    }
    if (boundary && !strong && mesh.boundary_tag(f) == BoundaryTag::Neumann && bc.traction) {
      t.traction[e] = bc.traction;
    }
  }
  return t;
}

bool strong_mode(const DiscreteSpacePair& spaces, const BoundaryConditions& bc) {
  if (bc.neumann_mode != NeumannMode::Strong) return false;
  AVSFE_REQUIRE(spaces.stress_space() == StressSpace::RtRows, ConfigError,
                "strong traction imposition requires the Raviart-Thomas stress space");
  return true;
}

}  // namespace

Eigen::MatrixXd local_gram(const Mesh& mesh, int cell, const ElementKernel& kernel) {
  LocalBlocks b;
  const ElementGeometry g = mesh.geometry(cell);
  b.gram_v = kernel.gram_v(g);
  b.gram_w = kernel.gram_w(g);
  return b.gram();
}

Eigen::MatrixXd local_form(const Mesh& mesh, int cell, const ElementKernel& kernel,
                           const MaterialField& materials, const BoundaryConditions& bc) {
  const bool strong = strong_mode(kernel.spaces(), bc);
  const FacetTreatment t = facet_treatment(mesh, cell, bc, strong);
  std::vector<int> dofs;
  std::vector<double> signs;
  kernel.spaces().cell_trial_dofs(cell, dofs, signs);
  return kernel.form(mesh.geometry(cell), materials.at(mesh.material(cell)), t.keep, signs);
}

Eigen::VectorXd local_load(const Mesh& mesh, int cell, const ElementKernel& kernel,
                           const VectorField& body_force, const BoundaryConditions& bc) {
  const bool strong = strong_mode(kernel.spaces(), bc);
  const FacetTreatment t = facet_treatment(mesh, cell, bc, strong);
  return kernel.load(mesh.geometry(cell), body_force, t.traction, t.natural);
}

std::array<Eigen::MatrixXd, 2> test_restriction(const Mesh& mesh, int cell,
                                                const ElementKernel& kernel,
                                                const BoundaryConditions& bc) {
  const int r = kernel.spaces().r();
  std::array<std::vector<Point2>, 2> zero_at;
  Eigen::VectorXd s(r + 1);
  for (int j = 0; j <= r; ++j) s[j] = (j + 0.5) / (r + 1);
  for (int e = 0; e < 3; ++e) {
    const int f = mesh.cell_facet(cell, e);
    if (!mesh.facet(f).on_boundary()) continue;
    const PointSet pts = edge_points(e, s);
    for (int i = 0; i < 2; ++i) {
      if (!bc.essential(mesh, f, i)) continue;
      for (int q = 0; q <= r; ++q) zero_at[i].push_back(pts.row(q).transpose());
    }
  }
  if (!bc.point_constraints.empty()) {
    const double tol = 1e-8 * mesh.cell_diameter(cell);
    const Point2 ref[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    for (const PointConstraint& pc : bc.point_constraints) {
      for (int v = 0; v < 3; ++v) {
        if ((mesh.vertex(mesh.cell(cell)[v]) - pc.location).norm() > tol) continue;
        for (int i = 0; i < 2; ++i) {
          if (pc.components[i]) zero_at[i].push_back(ref[v]);
        }
      }
    }
  }
  std::array<Eigen::MatrixXd, 2> out;
  for (int i = 0; i < 2; ++i) {
    if (zero_at[i].empty()) continue;
    PointSet pts(static_cast<Eigen::Index>(zero_at[i].size()), 2);
    for (std::size_t q = 0; q < zero_at[i].size(); ++q) pts.row(q) = zero_at[i][q].transpose();
    const Eigen::MatrixXd k = tabulate_orthonormal(r, pts).value;
    // Null space of the trace conditions from the right singular vectors.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(k, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Eigen::Index j = 0; j < sv.size(); ++j) rank += sv[j] > 1e-10 * sv[0] ? 1 : 0;
    out[i] = svd.matrixV().rightCols(k.cols() - rank);
  }
  return out;
}

LocalBlocks local_blocks(const Mesh& mesh, int cell, const ElementKernel& kernel,
                         const MaterialField& materials, const VectorField& body_force,
                         const BoundaryConditions& bc) {
  const bool strong = strong_mode(kernel.spaces(), bc);
  const FacetTreatment t = facet_treatment(mesh, cell, bc, strong);
  const ElementGeometry g = mesh.geometry(cell);
  LocalBlocks b;
  std::vector<double> signs;
  kernel.spaces().cell_trial_dofs(cell, b.dofs, signs);
  b.gram_v = kernel.gram_v(g);
  b.gram_w = kernel.gram_w(g);
  b.form = kernel.form(g, materials.at(mesh.material(cell)), t.keep, signs);
  b.load = kernel.load(g, body_force, t.traction, t.natural);
  b.test_restriction = test_restriction(mesh, cell, kernel, bc);
  return b;
}

void apply_constraints(LocalBlocks& blocks, const ConstraintSet& constraints) {
  if (constraints.values.empty()) return;
  for (std::size_t c = 0; c < blocks.dofs.size(); ++c) {
    auto it = constraints.values.find(blocks.dofs[c]);
    if (it == constraints.values.end()) continue;
    if (it->second != 0.0) blocks.load -= it->second * blocks.form.col(static_cast<Eigen::Index>(c));
    blocks.form.col(static_cast<Eigen::Index>(c)).setZero();
  }
}

namespace {

void prescribe(ConstraintSet& cs, int dof, double value, const std::string& where) {
  auto [it, inserted] = cs.values.emplace(dof, value);
  if (inserted) return;
  const double tol = 1e-12 * std::max({1.0, std::abs(value), std::abs(it->second)});
  AVSFE_REQUIRE(std::abs(it->second - value) <= tol, ConfigError,
                "conflicting prescribed values at " + where + ": " + std::to_string(it->second) +
                    " vs " + std::to_string(value));
}

}  // namespace

ConstraintSet dirichlet_constraints(const Mesh& mesh, const DiscreteSpacePair& spaces,
                                    const BoundaryConditions& bc) {
  ConstraintSet cs;
  const FunctionSpace& u = spaces.displacement();
  const int nu = u.num_dofs();
  const auto& pts = u.dof_points();
  for (int f : mesh.boundary_facets()) {
    if (mesh.boundary_tag(f) != BoundaryTag::Dirichlet) continue;
    for (int d : u.facet_dofs(mesh, f)) {
      const Vector2 g = bc.dirichlet_value ? bc.dirichlet_value(pts[d]) : Vector2::Zero();
      for (int i = 0; i < 2; ++i) {
        if (bc.dirichlet_components[i]) prescribe(cs, i * nu + d, g[i], "boundary node");
      }
    }
  }
  const double tol = 1e-8 * std::max(mesh.max_diameter(), 1e-300);
  for (const PointConstraint& pc : bc.point_constraints) {
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int v = 0; v < mesh.num_vertices(); ++v) {
      const double dist = (mesh.vertex(v) - pc.location).norm();
      if (dist < best_dist) {
        best_dist = dist;
        best = v;
      }
    }
    AVSFE_REQUIRE(best >= 0 && best_dist <= tol, ConfigError,
                  "point constraint at (" + std::to_string(pc.location.x()) + ", " +
                      std::to_string(pc.location.y()) + ") does not coincide with a mesh vertex");
    for (int i = 0; i < 2; ++i) {
      if (pc.components[i]) prescribe(cs, i * nu + best, pc.value[i], "pinned vertex");
    }
  }
  if (strong_mode(spaces, bc)) {
    const FunctionSpace& s = spaces.stress();
    const int ns = s.num_dofs();
    const int k = spaces.rt_degree();
    const LineRule rule = line_rule(2 * k + 8);
    for (int f : mesh.boundary_facets()) {
      const Facet& fc = mesh.facet(f);
      const Point2& a = mesh.vertex(fc.vertices[0]);
      const Point2& b = mesh.vertex(fc.vertices[1]);
      const double len = (b - a).norm();
      const auto dofs = s.facet_dofs(mesh, f);
      for (int i = 0; i < 2; ++i) {
        if (bc.essential(mesh, f, i)) continue;
        for (int j = 0; j <= k; ++j) {
          double moment = 0.0;
          for (int q = 0; q < rule.size(); ++q) {
            const double sq = rule.points[q];
            moment += rule.weights[q] * len * legendre01(j, sq) *
                      bc.traction_component(mesh, f, i, a + sq * (b - a));
          }
          prescribe(cs, spaces.stress_offset() + i * ns + dofs[j], moment, "traction moment");
        }
      }
    }
  }
  return cs;
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> galerkin_local(const Mesh& mesh, int cell,
                                                           const ElementKernel& kernel,
                                                           const MaterialField& materials,
                                                           const VectorField& body_force,
                                                           const BoundaryConditions& bc) {
  const ElementGeometry g = mesh.geometry(cell);
  Eigen::MatrixXd k = kernel.stiffness(g, materials.at(mesh.material(cell)));
  const BasisTabulation& lv = kernel.lagrange_volume();
  const int np = lv.dim;
  Eigen::VectorXd f = Eigen::VectorXd::Zero(2 * np);
  const QuadratureRule& vol = kernel.volume_rule();
  if (body_force) {
    const Eigen::VectorXd w = vol.weights * g.det_jacobian;
    for (int q = 0; q < vol.size(); ++q) {
      const Vector2 b = body_force(g.map(Point2(vol.points(q, 0), vol.points(q, 1))));
      f.head(np) += w[q] * b.x() * lv.value.row(q).transpose();
      f.tail(np) += w[q] * b.y() * lv.value.row(q).transpose();
    }
  }
  const LineRule& line = kernel.facet_rule();
  for (int e = 0; e < 3; ++e) {
    const int fc = mesh.cell_facet(cell, e);
    if (!mesh.facet(fc).on_boundary() || mesh.boundary_tag(fc) != BoundaryTag::Neumann ||
        !bc.traction) {
      continue;
    }
    const BasisTabulation& le = kernel.lagrange_edge(e);
    for (int q = 0; q < line.size(); ++q) {
      const double w = line.weights[q] * g.edge_lengths[e];
      const Vector2 t = bc.traction(edge_point(g, e, line.points[q]));
      f.head(np) += w * t.x() * le.value.row(q).transpose();
      f.tail(np) += w * t.y() * le.value.row(q).transpose();
    }
  }
  return {std::move(k), std::move(f)};
}

}  // namespace avsfe
