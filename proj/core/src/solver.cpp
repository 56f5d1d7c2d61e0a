#include "avsfe/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include <Eigen/IterativeLinearSolvers>

#include "avsfe/error.hpp"
#include "avsfe/parallel.hpp"

namespace avsfe {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct CondensedCell {
  CellCondensation data;
  double gram_condition = 1.0;
};

// Lower bound on cond(G) from the Cholesky diagonal.
double condition_bound(const Eigen::MatrixXd& l) {
  const Eigen::VectorXd d = l.diagonal().cwiseAbs();
  const double ratio = d.maxCoeff() / d.minCoeff();
  return ratio * ratio;
}

CondensedCell condense_cell(int cell, LocalBlocks&& blocks, const ConstraintSet& constraints) {
  apply_constraints(blocks, constraints);
  CondensedCell out;
  CellCondensation& cc = out.data;
  const Eigen::Index nr = blocks.gram_v.rows();
  Eigen::LLT<Eigen::MatrixXd> llt_w(blocks.gram_w);
  if (llt_w.info() != Eigen::Success) {
    throw SolverError("Gram matrix of cell " + std::to_string(cell) +
                      " is not positive definite (degenerate element?)");
  }
  cc.chol_w = llt_w.matrixL();
  out.gram_condition = condition_bound(cc.chol_w);
  cc.c = std::move(blocks.form);
  cc.d = std::move(blocks.load);
  for (int b = 0; b < 6; ++b) {
    auto rows = cc.c.middleRows(b * nr, nr);
    auto rhs = cc.d.segment(b * nr, nr);
    if (b >= 2) {
      auto lower = cc.chol_w.triangularView<Eigen::Lower>();
      lower.solveInPlace(rows);
      lower.solveInPlace(rhs);
      continue;
    }
    // Restricted v-blocks are projected onto the admissible basis and padded
    // with zero rows so every cell keeps the same row layout.
    const Eigen::MatrixXd& t = blocks.test_restriction[b];
    Eigen::MatrixXd gram = blocks.gram_v;
    Eigen::Index m = nr;
    if (t.rows() > 0) {
      m = t.cols();
      gram = t.transpose() * blocks.gram_v * t;
      const Eigen::MatrixXd pr = t.transpose() * rows;
      const Eigen::VectorXd pd = t.transpose() * rhs;
      rows.setZero();
      rhs.setZero();
      rows.topRows(m) = pr;
      rhs.head(m) = pd;
      cc.v_basis[b] = t;
    }
    if (m == 0) continue;
    Eigen::LLT<Eigen::MatrixXd> llt(gram);
    if (llt.info() != Eigen::Success) {
      throw SolverError("Gram matrix of cell " + std::to_string(cell) +
                        " is not positive definite (degenerate element?)");
    }
    cc.chol_v[b] = llt.matrixL();
    out.gram_condition = std::max(out.gram_condition, condition_bound(cc.chol_v[b]));
    auto lower = cc.chol_v[b].triangularView<Eigen::Lower>();
    lower.solveInPlace(rows.topRows(m));
    lower.solveInPlace(rhs.head(m));
  }
  cc.dofs = std::move(blocks.dofs);
  return out;
}

template <class Scalar>
ExactSystem<Scalar> accumulate(const std::vector<CellCondensation>& cells,
                               const ConstraintSet& constraints, int n) {
  ExactSystem<Scalar> sys;
  sys.rhs.assign(n, Scalar(0));
  std::size_t reserve = constraints.size();
  for (const auto& c : cells) reserve += c.dofs.size() * (c.dofs.size() + 1) / 2;
  std::vector<Entry<Scalar>> entries;
  entries.reserve(reserve);
  std::vector<Scalar> cs, ds;
  std::vector<char> active;
  for (const auto& cell : cells) {
    const int rows = static_cast<int>(cell.c.rows());
    const int cols = static_cast<int>(cell.c.cols());
    cs.resize(static_cast<std::size_t>(rows) * cols);
    for (int j = 0; j < cols; ++j) {
      for (int r = 0; r < rows; ++r) cs[j * rows + r] = static_cast<Scalar>(cell.c(r, j));
    }
    ds.resize(rows);
    for (int r = 0; r < rows; ++r) ds[r] = static_cast<Scalar>(cell.d[r]);
    active.assign(cols, 1);
    for (int j = 0; j < cols; ++j) active[j] = constraints.contains(cell.dofs[j]) ? 0 : 1;
    for (int a = 0; a < cols; ++a) {
      if (!active[a]) continue;
      const Scalar* ca = cs.data() + static_cast<std::size_t>(a) * rows;
      Scalar rhs(0);
      for (int r = 0; r < rows; ++r) rhs += ca[r] * ds[r];
      sys.rhs[cell.dofs[a]] += rhs;
      for (int b = a; b < cols; ++b) {
        if (!active[b]) continue;
        const Scalar* cb = cs.data() + static_cast<std::size_t>(b) * rows;
        Scalar s(0);
        for (int r = 0; r < rows; ++r) s += ca[r] * cb[r];
        const int ga = cell.dofs[a], gb = cell.dofs[b];
        entries.push_back({std::min(ga, gb), std::max(ga, gb), s});
      }
    }
  }
  for (const auto& [dof, value] : constraints.values) {
    entries.push_back({dof, dof, Scalar(1)});
    sys.rhs[dof] = static_cast<Scalar>(value);
  }
  sys.matrix = build_upper_csc(n, entries);
  return sys;
}

template <class Scalar>
Eigen::SparseMatrix<double> full_double(const UpperCsc<Scalar>& a) {
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(2 * a.nnz());
  for (int j = 0; j < a.n; ++j) {
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      const double v = static_cast<double>(a.values[p]);
      t.emplace_back(i, j, v);
      if (i != j) t.emplace_back(j, i, v);
    }
  }
  Eigen::SparseMatrix<double> m(a.n, a.n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

template <class Scalar>
std::vector<Scalar> symmetric_residual(const UpperCsc<Scalar>& a, const std::vector<Scalar>& b,
                                       const std::vector<Scalar>& x) {
  std::vector<Scalar> r(b);
  for (int j = 0; j < a.n; ++j) {
    for (int p = a.col_ptr[j]; p < a.col_ptr[j + 1]; ++p) {
      const int i = a.row_idx[p];
      r[i] -= a.values[p] * x[j];
      if (i != j) r[j] -= a.values[p] * x[i];
    }
  }
  return r;
}

template <class Scalar>
double norm2(const std::vector<Scalar>& v) {
  Scalar s(0);
  for (const Scalar& x : v) s += x * x;
  return std::sqrt(static_cast<double>(s));
}

template <class Scalar>
Eigen::VectorXd cholesky_path(const ExactSystem<Scalar>& sys, int refinement_steps,
                              SolveStats* stats) {
  SparseCholesky<Scalar> chol;
  chol.compute(sys.matrix);
  std::vector<Scalar> x = chol.solve(sys.rhs);
  const double bnorm = std::max(norm2(sys.rhs), std::numeric_limits<double>::min());
  std::vector<Scalar> r = symmetric_residual(sys.matrix, sys.rhs, x);
  double rel = norm2(r) / bnorm;
  int steps = 0;
  while (steps < refinement_steps && rel > 1e-14) {
    const std::vector<Scalar> dx = chol.solve(r);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
    r = symmetric_residual(sys.matrix, sys.rhs, x);
    const double next = norm2(r) / bnorm;
    ++steps;
    if (!(next < rel)) {
      rel = std::min(rel, next);
      break;
    }
    rel = next;
  }
  if (stats) {
    stats->method = "cholesky";
    stats->relative_residual = rel;
    stats->iterations = steps;
    stats->factor_nnz = chol.factor_nnz();
  }
  Eigen::VectorXd out(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) out[static_cast<Eigen::Index>(i)] = static_cast<double>(x[i]);
  return out;
}

template <class Scalar>
ExactSystem<Scalar> upper_from_full(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b) {
  std::vector<Entry<Scalar>> e;
  e.reserve(a.nonZeros());
  for (int j = 0; j < a.outerSize(); ++j) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it) {
      if (it.row() <= it.col()) {
        e.push_back({static_cast<int>(it.row()), static_cast<int>(it.col()),
                     static_cast<Scalar>(it.value())});
      }
    }
  }
  ExactSystem<Scalar> sys;
  sys.matrix = build_upper_csc(static_cast<int>(a.rows()), e);
  sys.rhs.resize(b.size());
  for (Eigen::Index i = 0; i < b.size(); ++i) sys.rhs[i] = static_cast<Scalar>(b[i]);
  return sys;
}

}  // namespace

int worker_threads(const SolverOptions& opts) {
  if (opts.threads > 0) return opts.threads;
  if (const char* env = std::getenv("AVSFE_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Precision resolve_precision(const SolverOptions& opts, const MaterialField& materials) {
  if (opts.precision != Precision::Auto) return opts.precision;
  double ratio = 1.0;
  for (const auto& [tag, m] : materials.entries()) ratio = std::max(ratio, (m.lambda + 2.0 * m.mu) / m.mu);
  const double squared = ratio * ratio;
  if (squared * std::numeric_limits<double>::epsilon() <= opts.auto_precision_target) {
    return Precision::Double;
  }
  if (squared * std::numeric_limits<long double>::epsilon() <= opts.auto_precision_target) {
    return Precision::Extended;
  }
  return Precision::Quad;
}

std::string precision_name(Precision p) {
  switch (p) {
    case Precision::Auto:
      return "auto";
    case Precision::Double:
      return "double";
    case Precision::Extended:
      return "extended";
    case Precision::Quad:
      return "quad";
  }
  return "unknown";
}

void set_precision(CondensedSystem& sys, Precision precision) {
  const int n = sys.num_dofs;
  auto store = [&](auto&& ex) {
    sys.matrix = full_double(ex.matrix);
    sys.rhs.resize(n);
    for (int i = 0; i < n; ++i) sys.rhs[i] = static_cast<double>(ex.rhs[i]);
    sys.exact = std::move(ex);
  };
  switch (precision) {
    case Precision::Auto:
    case Precision::Double:
      store(accumulate<double>(sys.cells, sys.constraints, n));
      sys.precision = Precision::Double;
      return;
    case Precision::Extended:
      store(accumulate<long double>(sys.cells, sys.constraints, n));
      sys.precision = Precision::Extended;
      return;
    case Precision::Quad:
      store(accumulate<DoubleDouble>(sys.cells, sys.constraints, n));
      sys.precision = Precision::Quad;
      return;
  }
}

namespace {

CondensedSystem finish_condense(std::vector<CondensedCell>&& condensed,
                                const ConstraintSet& constraints, int num_dofs,
                                const SolverOptions& opts, Precision precision) {
  CondensedSystem sys;
  sys.num_dofs = num_dofs;
  sys.constraints = constraints;
  sys.precision = precision;
  sys.cells.reserve(condensed.size());
  int flagged = 0;
  double worst = 0.0;
  for (std::size_t c = 0; c < condensed.size(); ++c) {
    if (condensed[c].gram_condition > opts.gram_condition_warning) {
      ++flagged;
      worst = std::max(worst, condensed[c].gram_condition);
    }
    sys.cells.push_back(std::move(condensed[c].data));
  }
  if (flagged > 0) {
    std::ostringstream msg;
    msg << flagged << " cell Gram matrices exceed condition estimate "
        << opts.gram_condition_warning << " (worst " << worst << ")";
    sys.warnings.push_back(msg.str());
  }
  set_precision(sys, precision);
  return sys;
}

}  // namespace

CondensedSystem condense(const Mesh& mesh, std::vector<LocalBlocks> blocks,
                         const ConstraintSet& constraints, int num_dofs,
                         const SolverOptions& opts, Precision precision) {
  AVSFE_REQUIRE(static_cast<int>(blocks.size()) == mesh.num_cells(), ConfigError,
                "one block set per cell required");
  std::vector<CondensedCell> condensed(blocks.size());
  parallel_for(mesh.num_cells(), worker_threads(opts), [&](int b, int e) {
    for (int c = b; c < e; ++c) condensed[c] = condense_cell(c, std::move(blocks[c]), constraints);
  });
  return finish_condense(std::move(condensed), constraints, num_dofs, opts, precision);
}

Eigen::VectorXd solve_spd(const CondensedSystem& system, const SolverOptions& opts,
                          SolveStats* stats) {
  const auto t0 = Clock::now();
  Eigen::VectorXd x;
  if (system.num_dofs > opts.iterative_threshold) {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(opts.cg_tolerance);
    cg.setMaxIterations(opts.cg_max_iterations);
    cg.compute(system.matrix);
    x = cg.solve(system.rhs);
    if (cg.info() != Eigen::Success) {
      throw SolverError("conjugate gradients did not converge in " +
                        std::to_string(cg.iterations()) + " iterations (error " +
                        std::to_string(cg.error()) + ")");
    }
    if (stats) {
      stats->method = "cg";
      stats->iterations = static_cast<int>(cg.iterations());
      stats->relative_residual = cg.error();
      stats->factor_nnz = 0;
    }
  } else {
    x = std::visit([&](const auto& ex) { return cholesky_path(ex, opts.refinement_steps, stats); },
                   system.exact);
  }
  for (const auto& [dof, value] : system.constraints.values) x[dof] = value;
  if (stats) {
    stats->precision = precision_name(system.precision);
    stats->solve_seconds = seconds_since(t0);
    stats->num_dofs = system.num_dofs;
  }
  return x;
}

ErrorRepresentation recover_error_rep(const CondensedSystem& system, const Eigen::VectorXd& x) {
  ErrorRepresentation rep;
  const std::size_t n = system.cells.size();
  rep.blocks.resize(n);
  rep.indicators.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const CellCondensation& cc = system.cells[c];
    Eigen::VectorXd xm(static_cast<Eigen::Index>(cc.dofs.size()));
    for (std::size_t j = 0; j < cc.dofs.size(); ++j) xm[j] = x[cc.dofs[j]];
    Eigen::VectorXd r = cc.c * xm - cc.d;
    rep.indicators[c] = r.norm();
    const Eigen::Index nr = cc.chol_w.rows();
    for (int b = 0; b < 6; ++b) {
      auto seg = r.segment(b * nr, nr);
      if (b >= 2) {
        cc.chol_w.triangularView<Eigen::Lower>().transpose().solveInPlace(seg);
        continue;
      }
      const Eigen::Index m = cc.chol_v[b].rows();
      Eigen::VectorXd head = seg.head(m);
      if (m > 0) cc.chol_v[b].triangularView<Eigen::Lower>().transpose().solveInPlace(head);
      if (cc.v_basis[b].rows() > 0) {
        seg = cc.v_basis[b] * head;
      } else {
        seg = head;
      }
    }
    rep.blocks[c] = std::move(r);
  }
  return rep;
}

AvsfeResult avsfe_solve(const ProblemConfig& config, const Mesh& mesh) {
  const auto t0 = Clock::now();
  AvsfeResult result;
  auto mesh_ptr = std::make_shared<const Mesh>(mesh);
  auto spaces = std::make_shared<const DiscreteSpacePair>(*mesh_ptr, config.discretization);
  const ElementKernel kernel(*spaces);
  const ConstraintSet constraints = dirichlet_constraints(*mesh_ptr, *spaces, config.bc);
  const Precision precision = resolve_precision(config.solver, config.materials);

  std::vector<CondensedCell> condensed(mesh.num_cells());
  parallel_for(mesh.num_cells(), worker_threads(config.solver), [&](int b, int e) {
    for (int c = b; c < e; ++c) {
      condensed[c] = condense_cell(
          c, local_blocks(*mesh_ptr, c, kernel, config.materials, config.body_force, config.bc),
          constraints);
    }
  });
  CondensedSystem system = finish_condense(std::move(condensed), constraints,
                                           spaces->num_trial_dofs(), config.solver, precision);
  result.stats.assembly_seconds = seconds_since(t0);
  result.stats.num_cells = mesh.num_cells();
  const bool automatic = config.solver.precision == Precision::Auto;
  for (;;) {
    const Precision next = system.precision == Precision::Double ? Precision::Extended
                                                                 : Precision::Quad;
    const bool can_escalate = automatic && system.precision != Precision::Quad &&
                              system.num_dofs <= config.solver.iterative_threshold;
    try {
      result.solution.coefficients = solve_spd(system, config.solver, &result.stats);
      if (!can_escalate || result.stats.relative_residual <= config.solver.residual_tolerance) break;
      system.warnings.push_back("relative residual " + std::to_string(result.stats.relative_residual) +
                                " in " + precision_name(system.precision) + " precision; retrying in " +
                                precision_name(next));
    } catch (const SolverError& e) {
      if (!can_escalate) throw;
      system.warnings.push_back(std::string(e.what()) + " in " + precision_name(system.precision) +
                                " precision; retrying in " + precision_name(next));
    }
    set_precision(system, next);
  }
  result.solution.mesh = mesh_ptr;
  result.solution.spaces = spaces;
  result.solution.has_stress = true;
  result.error = recover_error_rep(system, result.solution.coefficients);
  result.stats.warnings = system.warnings;
  return result;
}

TrialSolution galerkin_solve(const ProblemConfig& config, const Mesh& mesh, SolveStats* stats) {
  const auto t0 = Clock::now();
  auto mesh_ptr = std::make_shared<const Mesh>(mesh);
  DiscretizationOptions disc = config.discretization;
  disc.stress = StressSpace::C0Tensor;
  auto spaces = std::make_shared<const DiscreteSpacePair>(*mesh_ptr, disc);
  const ElementKernel kernel(*spaces);
  BoundaryConditions bc = config.bc;
  bc.neumann_mode = NeumannMode::Weak;
  const ConstraintSet constraints = dirichlet_constraints(*mesh_ptr, *spaces, bc);
  const int n = spaces->num_displacement_dofs();
  const int nu = spaces->displacement().num_dofs();

  std::vector<std::pair<Eigen::MatrixXd, Eigen::VectorXd>> local(mesh.num_cells());
  parallel_for(mesh.num_cells(), worker_threads(config.solver), [&](int b, int e) {
    for (int c = b; c < e; ++c) {
      local[c] = galerkin_local(*mesh_ptr, c, kernel, config.materials, config.body_force, bc);
    }
  });
  std::vector<Eigen::Triplet<double>> t;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  std::vector<int> dofs;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto cd = spaces->displacement().cell_dofs(c);
    dofs.clear();
    for (int comp = 0; comp < 2; ++comp) {
      for (int d : cd) dofs.push_back(comp * nu + d);
    }
    auto& [k, f] = local[c];
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      auto it = constraints.values.find(dofs[a]);
      if (it == constraints.values.end()) continue;
      f -= it->second * k.col(static_cast<Eigen::Index>(a));
      k.col(static_cast<Eigen::Index>(a)).setZero();
      k.row(static_cast<Eigen::Index>(a)).setZero();
      f[static_cast<Eigen::Index>(a)] = 0.0;
    }
    for (std::size_t a = 0; a < dofs.size(); ++a) {
      rhs[dofs[a]] += f[static_cast<Eigen::Index>(a)];
      for (std::size_t b = 0; b < dofs.size(); ++b) {
        const double v = k(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (v != 0.0) t.emplace_back(dofs[a], dofs[b], v);
      }
    }
  }
  for (const auto& [dof, value] : constraints.values) {
    t.emplace_back(dof, dof, 1.0);
    rhs[dof] = value;
  }
  Eigen::SparseMatrix<double> a(n, n);
  a.setFromTriplets(t.begin(), t.end());
  const double assembly = seconds_since(t0);
  const auto t1 = Clock::now();
  Precision precision = config.solver.precision == Precision::Auto ? Precision::Double
                                                                   : config.solver.precision;
  TrialSolution sol;
  sol.mesh = mesh_ptr;
  sol.spaces = spaces;
  sol.has_stress = false;
  sol.coefficients = cholesky_solve(a, rhs, precision);
  for (const auto& [dof, value] : constraints.values) sol.coefficients[dof] = value;
  if (stats) {
    stats->num_dofs = n;
    stats->num_cells = mesh.num_cells();
    stats->method = "cholesky";
    stats->precision = precision_name(precision);
    stats->assembly_seconds = assembly;
    stats->solve_seconds = seconds_since(t1);
    stats->relative_residual = (a * sol.coefficients - rhs).norm() / std::max(rhs.norm(), 1e-300);
  }
  return sol;
}

Eigen::VectorXd cholesky_solve(const Eigen::SparseMatrix<double>& a, const Eigen::VectorXd& b,
                               Precision precision) {
  switch (precision) {
    case Precision::Extended:
      return cholesky_path(upper_from_full<long double>(a, b), 1, nullptr);
    case Precision::Quad:
      return cholesky_path(upper_from_full<DoubleDouble>(a, b), 1, nullptr);
    default:
      return cholesky_path(upper_from_full<double>(a, b), 1, nullptr);
  }
}

FieldEvaluator::FieldEvaluator(const TrialSolution& solution, PointSet reference_points)
    : sol_(&solution), ref_(std::move(reference_points)) {
  const DiscreteSpacePair& sp = *solution.spaces;
  lag_ = tabulate_lagrange(sp.p(), Family::LagrangeC0, ref_);
  if (solution.has_stress) {
    stress_ = sp.stress_space() == StressSpace::RtRows ? tabulate_rt(sp.rt_degree(), ref_) : lag_;
  }
}

FieldValues FieldEvaluator::evaluate(int cell) const {
  const TrialSolution& s = *sol_;
  const DiscreteSpacePair& sp = *s.spaces;
  const ElementGeometry geom = s.mesh->geometry(cell);
  const Eigen::Index nq = ref_.rows();
  FieldValues out;
  out.x.resize(nq, 2);
  for (Eigen::Index q = 0; q < nq; ++q) {
    out.x.row(q) = geom.map(Point2(ref_(q, 0), ref_(q, 1))).transpose();
  }
  const BasisTabulation lag = map_to_physical(lag_, geom);
  const auto ud = sp.displacement().cell_dofs(cell);
  const int nu = sp.displacement().num_dofs();
  const Eigen::Index np = static_cast<Eigen::Index>(ud.size());
  out.u.resize(nq, 2);
  out.grad_u.resize(nq, 4);
  for (int comp = 0; comp < 2; ++comp) {
    Eigen::VectorXd coef(np);
    for (Eigen::Index i = 0; i < np; ++i) coef[i] = s.coefficients[comp * nu + ud[i]];
    out.u.col(comp) = lag.value * coef;
    out.grad_u.col(2 * comp) = lag.grad_x * coef;
    out.grad_u.col(2 * comp + 1) = lag.grad_y * coef;
  }
  out.sigma = Eigen::MatrixXd::Zero(nq, 4);
  out.div_sigma = Eigen::MatrixXd::Zero(nq, 2);
  if (!s.has_stress) return out;
  const auto sd = sp.stress().cell_dofs(cell);
  const auto ss = sp.stress().cell_signs(cell);
  const int ns = sp.stress().num_dofs();
  const Eigen::Index nl = static_cast<Eigen::Index>(sd.size());
  auto coefficients = [&](int comp) {
    Eigen::VectorXd coef(nl);
    for (Eigen::Index i = 0; i < nl; ++i) {
      coef[i] = ss[i] * s.coefficients[sp.stress_offset() + comp * ns + sd[i]];
    }
    return coef;
  };
  if (sp.stress_space() == StressSpace::RtRows) {
    const BasisTabulation rt = map_to_physical(stress_, geom);
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd coef = coefficients(i);
      out.sigma.col(2 * i) = rt.value_x * coef;
      out.sigma.col(2 * i + 1) = rt.value_y * coef;
      out.div_sigma.col(i) = rt.div * coef;
    }
  } else {
    for (int i = 0; i < 2; ++i) {
      const Eigen::VectorXd cx = coefficients(2 * i);
      const Eigen::VectorXd cy = coefficients(2 * i + 1);
      out.sigma.col(2 * i) = lag.value * cx;
      out.sigma.col(2 * i + 1) = lag.value * cy;
      out.div_sigma.col(i) = lag.grad_x * cx + lag.grad_y * cy;
    }
  }
  return out;
}

}  // namespace avsfe
