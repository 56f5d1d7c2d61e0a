#include "avsfe/studies.hpp"

#include <chrono>
#include <cmath>

#include "avsfe/error.hpp"

namespace avsfe {

namespace {

constexpr double kEdgeTol = 1e-10;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

DiscretizationOptions with_degree(DiscretizationOptions d, int default_p) {
  if (d.p <= 0) d.p = default_p;
  return d;
}

StudyRecord avsfe_record(int step, const Mesh& mesh, const AvsfeResult& r,
                         const ProblemConfig& config, const ExactSolution* exact) {
  StudyRecord rec;
  rec.step = step;
  rec.h_max = mesh.max_diameter();
  rec.ndof = r.stats.num_dofs;
  rec.num_cells = mesh.num_cells();
  rec.energy_estimate = indicators(r.error).global;
  rec.strain_energy = strain_energy(r.solution, config.materials);
  if (exact) {
    const ErrorNorms n = error_norms(r.solution, *exact);
    rec.l2_u = n.l2_u;
    rec.h1_u = n.h1_u;
    rec.hdiv_sigma = n.hdiv_sigma;
    rec.u_norm = n.u_norm;
  }
  return rec;
}

StudyRecord galerkin_record(int step, const Mesh& mesh, const TrialSolution& sol,
                            const SolveStats& stats, const ProblemConfig& config,
                            const ExactSolution* exact) {
  StudyRecord rec;
  rec.step = step;
  rec.h_max = mesh.max_diameter();
  rec.ndof = stats.num_dofs;
  rec.num_cells = mesh.num_cells();
  rec.strain_energy = strain_energy(sol, config.materials);
  if (exact) {
    const ErrorNorms n = error_norms(sol, *exact);
    rec.l2_u = n.l2_u;
    rec.h1_u = n.h1_u;
  }
  return rec;
}

// Uniform refinement sequence; AVS-FE always, Bubnov-Galerkin optionally.
std::vector<StudySeries> uniform_sequence(ProblemSetup setup, const StudyConfig& cfg,
                                          const std::string& label, bool galerkin) {
  StudySeries avs{label, {}};
  StudySeries bg{"galerkin", {}};
  const ExactSolution* exact = setup.exact ? &*setup.exact : nullptr;
  Mesh mesh = setup.mesh;
  for (int step = 0; step <= cfg.refinements; ++step) {
    if (step > 0) mesh = uniform_refine(mesh);
    auto t0 = Clock::now();
    const AvsfeResult r = avsfe_solve(setup.config, mesh);
    StudyRecord rec = avsfe_record(step, mesh, r, setup.config, exact);
    rec.wall_seconds = seconds_since(t0);
    avs.records.push_back(rec);
    if (cfg.on_solve) cfg.on_solve(label, step, mesh, r);
    if (galerkin) {
      t0 = Clock::now();
      SolveStats stats;
      const TrialSolution sol = galerkin_solve(setup.config, mesh, &stats);
      StudyRecord g = galerkin_record(step, mesh, sol, stats, setup.config, exact);
      g.wall_seconds = seconds_since(t0);
      bg.records.push_back(g);
    }
  }
  fill_rates(avs.records);
  std::vector<StudySeries> out{std::move(avs)};
  if (galerkin) {
    fill_rates(bg.records);
    out.push_back(std::move(bg));
  }
  return out;
}

}  // namespace

StudyId parse_study_id(std::string_view name) {
  if (name == "convergence_a" || name == "CONVERGENCE_A") return StudyId::ConvergenceA;
  if (name == "comparison_b" || name == "COMPARISON_B") return StudyId::ComparisonB;
  if (name == "inclusion" || name == "INCLUSION") return StudyId::Inclusion;
  if (name == "beam" || name == "BEAM") return StudyId::Beam;
  throw ConfigError("unknown study '" + std::string(name) + "'");
}

std::string study_name(StudyId id) {
  switch (id) {
    case StudyId::ConvergenceA: return "convergence_a";
    case StudyId::ComparisonB: return "comparison_b";
    case StudyId::Inclusion: return "inclusion";
    case StudyId::Beam: return "beam";
  }
  return "unknown";
}

ProblemSetup manufactured_problem(const ExactSolution& exact, Mesh mesh,
                                  const DiscretizationOptions& disc, const SolverOptions& solver) {
  ProblemSetup s{tag_boundary(mesh, [](const Point2&) { return true; }, {}), {}, exact};
  s.config.materials = MaterialField(exact.material);
  s.config.body_force = exact.body_force;
  s.config.discretization = disc;
  s.config.solver = solver;
  return s;
}

ProblemSetup inclusion_problem(const InclusionParameters& params, const DiscretizationOptions& disc,
                               const SolverOptions& solver) {
  AVSFE_REQUIRE(params.clamped_fraction > 0.0 && params.clamped_fraction <= 1.0, ConfigError,
                "clamped_fraction must lie in (0, 1]");
  const Mesh raw = build_inclusion_mesh(params.center, params.radius, params.segments, params.target_h);
  const double half = 0.5 * params.clamped_fraction;
  ProblemSetup s{tag_boundary(
                     raw,
                     [half](const Point2& x) {
                       return x.x() < kEdgeTol && std::abs(x.y() - 0.5) <= half + kEdgeTol;
                     },
                     [](const Point2& x) { return x.x() > 1.0 - kEdgeTol; }),
                 {},
                 std::nullopt};
  s.config.materials = MaterialField({{0, params.matrix}, {1, params.inclusion}});
  const Vector2 t = params.traction;
  s.config.bc.traction = [t](const Point2&) { return t; };
  s.config.discretization = disc;
  s.config.solver = solver;
  return s;
}

ProblemSetup beam_problem(const BeamParameters& params, const DiscretizationOptions& disc,
                          const SolverOptions& solver) {
  const double len = params.length, ht = params.height;
  const Mesh raw = build_rectangle(len, ht, 2, 1, Diagonal::Left);
  ProblemSetup s{tag_boundary(
                     raw, [](const Point2& x) { return x.x() < kEdgeTol; },
                     [ht](const Point2& x) { return x.y() > ht - kEdgeTol * ht; }),
                 {},
                 std::nullopt};
  s.config.materials = MaterialField(from_engineering(params.youngs_modulus, params.poisson_ratio));
  const double q = params.load;
  s.config.bc.dirichlet_components = {true, false};
  s.config.bc.traction = [q](const Point2&) { return Vector2(0.0, -q); };
  s.config.bc.point_constraints.push_back({Point2(0.0, 0.0), {true, true}, Vector2::Zero()});
  s.config.discretization = disc;
  s.config.solver = solver;
  return s;
}

std::vector<StudySeries> run_study(StudyId id, const StudyConfig& cfg) {
  AVSFE_REQUIRE(cfg.refinements >= 0, ConfigError, "refinements must be >= 0");
  switch (id) {
    case StudyId::ConvergenceA: {
      const IsotropicMaterial mat = cfg.material.value_or(from_engineering(1500.0, 0.4999));
      std::vector<int> degrees = cfg.degrees;
      if (degrees.empty()) degrees.push_back(cfg.discretization.p > 0 ? cfg.discretization.p : 1);
      std::vector<StudySeries> out;
      for (int p : degrees) {
        DiscretizationOptions d = cfg.discretization;
        d.p = p;
        auto series = uniform_sequence(
            manufactured_problem(exact_case_A(mat), build_unit_square(1, 1), d, cfg.solver), cfg,
            "p" + std::to_string(p), false);
        out.push_back(std::move(series.front()));
      }
      return out;
    }
    case StudyId::ComparisonB: {
      const IsotropicMaterial mat = cfg.material.value_or(from_engineering(1500.0, 0.49999999));
      const DiscretizationOptions d = with_degree(cfg.discretization, 1);
      return uniform_sequence(
          manufactured_problem(exact_case_B(mat), build_unit_square(2, 2), d, cfg.solver), cfg,
          "avsfe", cfg.galerkin_baseline);
    }
    case StudyId::Beam: {
      const DiscretizationOptions d = with_degree(cfg.discretization, 2);
      ProblemSetup setup = beam_problem(cfg.beam, d, cfg.solver);
      setup.config.bc.neumann_mode = cfg.neumann_mode;
      return uniform_sequence(std::move(setup), cfg, "avsfe", cfg.galerkin_baseline);
    }
    case StudyId::Inclusion: {
      std::vector<StudySeries> out;
      for (StressSpace space : cfg.inclusion_spaces) {
        DiscretizationOptions d = with_degree(cfg.discretization, 2);
        d.stress = space;
        const std::string label = space == StressSpace::RtRows ? "rt" : "c0";
        ProblemSetup setup = inclusion_problem(cfg.inclusion, d, cfg.solver);
        setup.config.bc.neumann_mode = cfg.neumann_mode;
        std::function<void(const AdaptStep&)> hook;
        if (cfg.on_solve) {
          hook = [&](const AdaptStep& s) { cfg.on_solve(label, s.step, s.mesh, s.result); };
        }
        out.push_back({label, adapt_loop(setup.config, setup.mesh, cfg.adapt, nullptr, hook)});
      }
      return out;
    }
  }
  throw ConfigError("unknown study");
}

}  // namespace avsfe
