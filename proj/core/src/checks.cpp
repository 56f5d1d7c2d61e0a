#include "avsfe/checks.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/LU>

#include "avsfe/adaptivity.hpp"
#include "avsfe/studies.hpp"

namespace avsfe {

namespace {

CheckResult make(std::string name, double value, double tolerance, bool passed, std::string detail = {}) {
  return {std::move(name), passed, value, tolerance, std::move(detail)};
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

std::string stress_label(StressSpace s) { return s == StressSpace::RtRows ? "rt" : "c0"; }

IsotropicMaterial case_a_material() { return from_engineering(1500.0, 0.4999); }

// The 2-cell problem used by the equivalence oracles: case A data with the
// left edge clamped and the exact traction on the other edges, so that both
// displacement and stress unknowns are free.
ProblemSetup two_cell_problem(int p, StressSpace stress) {
  DiscretizationOptions d;
  d.p = p;
  d.stress = stress;
  const ExactSolution ex = exact_case_A(case_a_material());
  ProblemSetup s = manufactured_problem(ex, build_unit_square(1, 1), d, {});
  s.mesh = tag_boundary(
      s.mesh, [](const Point2& x) { return x.x() < 1e-12; }, [](const Point2& x) { return x.x() >= 1e-12; });
  s.config.bc.traction = [ex](const Point2& x) {
    const Vector2 n = x.x() > 1.0 - 1e-12 ? Vector2(1.0, 0.0)
                      : x.y() < 1e-12     ? Vector2(0.0, -1.0)
                                          : Vector2(0.0, 1.0);
    return (ex.stress(x) * n).eval();
  };
  return s;
}

struct Condensed {
  CondensedSystem system;
  std::vector<LocalBlocks> blocks;  // after constraint lifting
};

Condensed condense_problem(const ProblemSetup& s) {
  const DiscreteSpacePair spaces(s.mesh, s.config.discretization);
  const ElementKernel kernel(spaces);
  const ConstraintSet constraints = dirichlet_constraints(s.mesh, spaces, s.config.bc);
  std::vector<LocalBlocks> blocks;
  for (int c = 0; c < s.mesh.num_cells(); ++c) {
    blocks.push_back(local_blocks(s.mesh, c, kernel, s.config.materials, s.config.body_force, s.config.bc));
  }
  Condensed out{condense(s.mesh, blocks, constraints, spaces.num_trial_dofs(), s.config.solver,
                         resolve_precision(s.config.solver, s.config.materials)),
                 {}};
  for (auto& b : blocks) apply_constraints(b, constraints);
  out.blocks = std::move(blocks);
  return out;
}

// Test-space basis of one cell: identity, or the restriction on the v blocks.
Eigen::MatrixXd test_basis(const LocalBlocks& b) {
  const Eigen::Index nr = b.gram_v.rows();
  Eigen::Index cols = 4 * nr;
  for (int k = 0; k < 2; ++k) cols += b.test_restriction[k].rows() > 0 ? b.test_restriction[k].cols() : nr;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(6 * nr, cols);
  Eigen::Index at = 0;
  for (int k = 0; k < 6; ++k) {
    if (k < 2 && b.test_restriction[k].rows() > 0) {
      p.block(k * nr, at, nr, b.test_restriction[k].cols()) = b.test_restriction[k];
      at += b.test_restriction[k].cols();
    } else {
      p.block(k * nr, at, nr, nr).setIdentity();
      at += nr;
    }
  }
  return p;
}

}  // namespace

CheckResult check_quadrature_exactness(int max_degree) {
  double worst = 0.0;
  for (int deg = 1; deg <= max_degree; ++deg) {
    const QuadratureRule rule = quadrature_rule(deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        double sum = 0.0;
        for (int q = 0; q < rule.size(); ++q) {
          sum += rule.weights[q] * std::pow(rule.points(q, 0), a) * std::pow(rule.points(q, 1), b);
        }
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        worst = std::max(worst, std::abs(sum - exact) / exact);
      }
    }
  }
  return make("quadrature exactness 1.." + std::to_string(max_degree), worst, 1e-12, worst <= 1e-12);
}

CheckResult check_piola_divergence() {
  const Mesh mesh({{0.1, 0.2}, {1.3, 0.5}, {0.4, 1.1}}, {{0, 1, 2}}, {0});
  const ElementGeometry geom = mesh.geometry(0);
  double worst = 0.0;
  for (int k = 0; k <= 3; ++k) {
    const QuadratureRule vol = quadrature_rule(2 * k + 2);
    const BasisTabulation tv = map_to_physical(tabulate_rt(k, vol.points), geom);
    Eigen::VectorXd lhs = tv.div.transpose() * vol.weights * geom.det_jacobian;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(lhs.size());
    const LineRule line = line_rule(2 * k + 2);
    for (int e = 0; e < 3; ++e) {
      const BasisTabulation te = map_to_physical(tabulate_rt(k, edge_points(e, line.points)), geom);
      const Point2 n = geom.normals[e];
      const Eigen::MatrixXd flux = n.x() * te.value_x + n.y() * te.value_y;
      rhs += flux.transpose() * line.weights * geom.edge_lengths[e];
    }
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return make("Piola divergence identity", worst, 1e-12, worst <= 1e-12);
}

CheckResult check_facet_telescoping() {
  // Distorted 3 x 3 grid so that no two cells are congruent.
  std::vector<Point2> verts;
  for (int j = 0; j <= 3; ++j) {
    for (int i = 0; i <= 3; ++i) {
      Point2 x(i / 3.0, j / 3.0);
      if (i > 0 && i < 3 && j > 0 && j < 3) x += Point2(0.05 * ((i + 2 * j) % 3 - 1), 0.04 * ((2 * i + j) % 3 - 1));
      verts.push_back(x);
    }
  }
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const int a = j * 4 + i, b = a + 1, c = a + 5, d = a + 4;
      cells.push_back({a, b, c});
      cells.push_back({a, c, d});
    }
  }
  const Mesh mesh(verts, cells, std::vector<int>(cells.size(), 0));
  const int k = 1;
  const FunctionSpace rt = FunctionSpace::raviart_thomas(mesh, k);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd coef(rt.num_dofs());
  for (auto& c : coef) c = dist(rng);
  auto v = [](const Point2& x) { return 1.0 + x.x() - 0.5 * x.y() + 2.0 * x.x() * x.y() + x.y() * x.y(); };

  const LineRule line = line_rule(2 * k + 4);
  std::vector<double> facet_sum(mesh.num_facets(), 0.0);
  double scale = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const ElementGeometry geom = mesh.geometry(c);
    const auto dofs = rt.cell_dofs(c);
    const auto signs = rt.cell_signs(c);
    for (int e = 0; e < 3; ++e) {
      const PointSet ref = edge_points(e, line.points);
      const BasisTabulation t = map_to_physical(tabulate_rt(k, ref), geom);
      const Point2 n = geom.normals[e];
      double contribution = 0.0;
      for (int q = 0; q < line.size(); ++q) {
        double flux = 0.0;
        for (std::size_t j = 0; j < dofs.size(); ++j) {
          flux += signs[j] * coef[dofs[j]] * (n.x() * t.value_x(q, j) + n.y() * t.value_y(q, j));
        }
        contribution += line.weights[q] * geom.edge_lengths[e] * flux * v(geom.map(ref.row(q).transpose()));
      }
      facet_sum[mesh.cell_facet(c, e)] += contribution;
      scale = std::max(scale, std::abs(contribution));
    }
  }
  double worst = 0.0;
  for (int f = 0; f < mesh.num_facets(); ++f) {
    if (!mesh.facet(f).on_boundary()) worst = std::max(worst, std::abs(facet_sum[f]));
  }
  std::ostringstream detail;
  detail << "largest single facet term " << scale;
  return make("facet telescoping", worst, 1e-12, worst <= 1e-12, detail.str());
}

CheckResult check_dorfler_minimality(int trials) {
  std::mt19937_64 rng(5);
  int failures = 0;
  for (int t = 0; t < trials; ++t) {
    const int n = 1 + static_cast<int>(rng() % 12);
    const bool ties = t % 3 == 0;
    IndicatorField field;
    for (int i = 0; i < n; ++i) {
      field.eta.push_back(ties ? static_cast<double>(rng() % 4)
                               : std::uniform_real_distribution<double>(0.0, 1.0)(rng));
    }
    const double theta = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
    const auto conv = t % 2 ? MarkingConvention::Plain : MarkingConvention::Squared;
    auto w = [&](int i) { return conv == MarkingConvention::Squared ? field.eta[i] * field.eta[i] : field.eta[i]; };
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += w(i);
    const double target = (conv == MarkingConvention::Squared ? theta * theta : theta) * total;
    const auto marked = dorfler_mark(field, theta, conv);

    // Oracle: smallest subset whose weight reaches the target.
    int best = total > 0.0 ? n + 1 : 0;
    if (total > 0.0) {
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) if (mask >> i & 1u) s += w(i);
        if (s >= target * (1.0 - 1e-14)) best = std::min(best, std::popcount(mask));
      }
    }
    double got = 0.0;
    for (int i : marked) got += w(i);
    const bool ok = static_cast<int>(marked.size()) == best &&
                    (total == 0.0 || got >= target * (1.0 - 1e-14));
    if (!ok) ++failures;
  }
  return make("Doerfler minimality vs enumeration", failures, 0.0, failures == 0,
              std::to_string(trials) + " random cases");
}

CheckResult check_body_force_order() {
  double worst = 0.0;
  std::ostringstream detail;
  for (double nu : {0.4, 0.49, 0.4999, 0.49999999}) {
    const IsotropicMaterial mat = from_engineering(1500.0, nu);
    for (const ExactSolution& ex : {exact_case_A(mat), exact_case_B(mat)}) {
      const double order = body_force_residual_order(ex);
      worst = std::max(worst, std::abs(order - 2.0));
      detail << ex.id << "(nu=" << nu << ") " << order << "; ";
    }
  }
  return make("body-force residual order", 2.0 + worst, 0.1, worst <= 0.1, detail.str());
}

CheckResult check_condensed_spd(int p, StressSpace stress) {
  const Condensed c = condense_problem(two_cell_problem(p, stress));
  const Eigen::MatrixXd a(c.system.matrix);
  const double asym = (a - a.transpose()).norm() / a.norm();
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  const bool spd = llt.info() == Eigen::Success;
  const std::string name = "condensed SPD (p=" + std::to_string(p) + ", " + stress_label(stress) + ")";
  return make(name, asym, 1e-10, asym <= 1e-10 && spd, spd ? "Cholesky ok" : "Cholesky failed");
}

CheckResult check_saddle_equivalence(int p, StressSpace stress) {
  const ProblemSetup s = two_cell_problem(p, stress);
  const Condensed c = condense_problem(s);
  const ConstraintSet& cons = c.system.constraints;
  const int n = c.system.num_dofs;
  std::vector<int> free_index(n, -1);
  int nfree = 0;
  for (int i = 0; i < n; ++i) if (!cons.contains(i)) free_index[i] = nfree++;

  // Monolithic system over the restricted test coefficients, assembled and
  // solved in extended precision.
  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  std::vector<Eigen::MatrixXd> bases;
  int ntest = 0;
  for (const auto& b : c.blocks) {
    bases.push_back(test_basis(b));
    ntest += static_cast<int>(bases.back().cols());
  }
  MatL k = MatL::Zero(ntest + nfree, ntest + nfree);
  VecL rhs = VecL::Zero(ntest + nfree);
  int at = 0;
  for (std::size_t m = 0; m < c.blocks.size(); ++m) {
    const LocalBlocks& b = c.blocks[m];
    const Eigen::MatrixXd& pm = bases[m];
    const int mm = static_cast<int>(pm.cols());
    const Eigen::MatrixXd g = pm.transpose() * b.gram() * pm;
    const Eigen::MatrixXd form = pm.transpose() * b.form;
    const Eigen::VectorXd load = pm.transpose() * b.load;
    k.block(at, at, mm, mm) = g.cast<long double>();
    rhs.segment(at, mm) = load.cast<long double>();
    for (std::size_t j = 0; j < b.dofs.size(); ++j) {
      const int col = free_index[b.dofs[j]];
      if (col < 0) continue;
      for (int i = 0; i < mm; ++i) {
        k(at + i, ntest + col) += form(i, j);
        k(ntest + col, at + i) += form(i, j);
      }
    }
    at += mm;
  }
  const VecL sol = k.fullPivLu().solve(rhs);

  const AvsfeResult r = avsfe_solve(s.config, s.mesh);
  double diff = 0.0, norm = 0.0;
  for (int i = 0; i < n; ++i) {
    const long double xs = free_index[i] < 0 ? cons.values.at(i) : sol[ntest + free_index[i]];
    diff += static_cast<double>((r.solution.coefficients[i] - xs) * (r.solution.coefficients[i] - xs));
    norm += static_cast<double>(xs * xs);
  }
  const double rel = std::sqrt(diff / std::max(norm, 1e-300));
  const std::string name = "saddle-point equivalence (p=" + std::to_string(p) + ", " + stress_label(stress) + ")";
  return make(name, rel, 1e-8, rel <= 1e-8);
}

CheckResult check_galerkin_orthogonality(int p, StressSpace stress) {
  const ProblemSetup s = two_cell_problem(p, stress);
  const Condensed c = condense_problem(s);
  const AvsfeResult r = avsfe_solve(s.config, s.mesh);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(c.system.num_dofs);
  for (std::size_t m = 0; m < c.blocks.size(); ++m) {
    const Eigen::VectorXd local = c.blocks[m].form.transpose() * r.error.blocks[m];
    for (std::size_t j = 0; j < c.blocks[m].dofs.size(); ++j) g[c.blocks[m].dofs[j]] += local[j];
  }
  double worst = 0.0;
  for (int i = 0; i < c.system.num_dofs; ++i) {
    if (!c.system.constraints.contains(i)) worst = std::max(worst, std::abs(g[i]));
  }
  double a_norm = 0.0;
  for (int j = 0; j < c.system.matrix.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(c.system.matrix, j); it; ++it) {
      a_norm = std::max(a_norm, std::abs(it.value()));
    }
  }
  const double rel = worst / a_norm;
  const std::string name = "Galerkin orthogonality (p=" + std::to_string(p) + ", " + stress_label(stress) + ")";
  return make(name, rel, 1e-8, rel <= 1e-8);
}

CheckResult check_patch(StressSpace stress) {
  std::vector<Point2> verts;
  for (int j = 0; j <= 3; ++j) {
    for (int i = 0; i <= 3; ++i) {
      Point2 x(i / 3.0, j / 3.0);
      if (i > 0 && i < 3 && j > 0 && j < 3) x += Point2(0.06 * ((i * j) % 2 ? 1 : -1), 0.05 * (i == j ? 1 : -1));
      verts.push_back(x);
    }
  }
  std::vector<std::array<int, 3>> cells;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      const int a = j * 4 + i, b = a + 1, c = a + 5, d = a + 4;
      if ((i + j) % 2) {
        cells.push_back({a, b, c});
        cells.push_back({a, c, d});
      } else {
        cells.push_back({a, b, d});
        cells.push_back({b, c, d});
      }
    }
  }
  const Mesh patch(verts, cells, std::vector<int>(cells.size(), 0), {}, BoundaryTag::Dirichlet);
  DiscretizationOptions d;
  d.p = 1;
  d.stress = stress;

  // A compressible material with a general linear field, and the case A
  // material with an isochoric one (stress of order mu rather than lambda,
  // so that 1e-9 stays above roundoff).
  struct Case {
    IsotropicMaterial material;
    Eigen::Matrix2d gradient;
  };
  const Case cases[] = {
      {from_engineering(1500.0, 0.3), (Eigen::Matrix2d() << 0.2, -0.3, 0.15, 0.25).finished()},
      {case_a_material(), (Eigen::Matrix2d() << 0.2, -0.3, 0.15, -0.2).finished()},
  };
  double worst = 0.0;
  std::ostringstream detail;
  for (const Case& k : cases) {
    ExactSolution ex;
    ex.id = "linear";
    ex.material = k.material;
    const Eigen::Matrix2d g = k.gradient;
    ex.displacement = [g](const Point2& x) { return (Vector2(0.1, -0.05) + g * x).eval(); };
    ex.gradient = [g](const Point2&) { return g; };
    ex.body_force = [](const Point2&) { return Vector2::Zero().eval(); };
    ProblemSetup s = manufactured_problem(ex, patch, d, {});
    s.config.bc.dirichlet_value = ex.displacement;
    const AvsfeResult r = avsfe_solve(s.config, s.mesh);
    const ErrorNorms e = error_norms(r.solution, ex);
    const double eta = *std::max_element(r.error.indicators.begin(), r.error.indicators.end());
    worst = std::max({worst, e.l2_u, e.hdiv_sigma, eta});
    detail << "nu=" << k.material.poisson_ratio << ": L2(u) " << e.l2_u << ", L2(sigma) " << e.hdiv_sigma
           << ", max eta " << eta << "; ";
  }
  return make("patch test (" + stress_label(stress) + ")", worst, 1e-9, worst <= 1e-9, detail.str());
}

std::vector<CheckResult> run_all_checks() {
  std::vector<CheckResult> out{check_quadrature_exactness(), check_piola_divergence(),
                               check_facet_telescoping(), check_dorfler_minimality(),
                               check_body_force_order()};
  for (StressSpace s : {StressSpace::RtRows, StressSpace::C0Tensor}) {
    for (int p : {1, 2}) {
      out.push_back(check_condensed_spd(p, s));
      out.push_back(check_saddle_equivalence(p, s));
      out.push_back(check_galerkin_orthogonality(p, s));
    }
    out.push_back(check_patch(s));
  }
  return out;
}

}  // namespace avsfe
