// Per-cell kernels, condensation and the SPD solve on case A meshes.
// Args: p, mesh divisions n (2 n^2 cells).

#include <benchmark/benchmark.h>

#include <memory>

#include "avsfe/studies.hpp"

namespace avsfe {
namespace {

struct Setup {
  Mesh mesh;
  ProblemConfig cfg;
  std::unique_ptr<DiscreteSpacePair> spaces;
  std::unique_ptr<ElementKernel> kernel;
  ConstraintSet constraints;

  Setup(int p, int n, double nu, StressSpace stress = StressSpace::RtRows)
      : mesh(build_unit_square(n, n)) {
    ExactSolution ex = exact_case_A(from_engineering(1500.0, nu));
    cfg = manufactured_problem(ex, mesh, {.p = p, .stress = stress}, {}).config;
    cfg.solver.threads = 1;
    spaces = std::make_unique<DiscreteSpacePair>(mesh, cfg.discretization);
    kernel = std::make_unique<ElementKernel>(*spaces);
    constraints = dirichlet_constraints(mesh, *spaces, cfg.bc);
  }

  std::vector<LocalBlocks> blocks() const {
    std::vector<LocalBlocks> out;
    for (int c = 0; c < mesh.num_cells(); ++c)
      out.push_back(local_blocks(mesh, c, *kernel, cfg.materials, cfg.body_force, cfg.bc));
    return out;
  }
};

void BM_LocalBlocks(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)), 4, 0.4999);
  for (auto _ : state) benchmark::DoNotOptimize(s.blocks());
  state.SetItemsProcessed(state.iterations() * s.mesh.num_cells());
}
BENCHMARK(BM_LocalBlocks)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_Condense(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.4999);
  const auto blocks = s.blocks();
  const Precision prec = static_cast<Precision>(state.range(2));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        condense(s.mesh, blocks, s.constraints, s.spaces->num_trial_dofs(), s.cfg.solver, prec));
  state.SetItemsProcessed(state.iterations() * s.mesh.num_cells());
}
BENCHMARK(BM_Condense)
    ->Args({2, 16, static_cast<int>(Precision::Double)})
    ->Args({2, 16, static_cast<int>(Precision::Extended)})
    ->Args({2, 16, static_cast<int>(Precision::Quad)})
    ->Unit(benchmark::kMillisecond);

void BM_SolveSpd(benchmark::State& state) {
  Setup s(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)), 0.3);
  const auto system = condense(s.mesh, s.blocks(), s.constraints, s.spaces->num_trial_dofs(),
                               s.cfg.solver, static_cast<Precision>(state.range(2)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_spd(system, s.cfg.solver));
  state.counters["dofs"] = s.spaces->num_trial_dofs();
}
BENCHMARK(BM_SolveSpd)
    ->Args({1, 32, static_cast<int>(Precision::Double)})
    ->Args({2, 16, static_cast<int>(Precision::Double)})
    ->Args({2, 32, static_cast<int>(Precision::Double)})
    ->Args({2, 16, static_cast<int>(Precision::Quad)})
    ->Unit(benchmark::kMillisecond);

void BM_AvsfeSolve(benchmark::State& state) {
  Setup s(2, static_cast<int>(state.range(0)), 0.4999);
  for (auto _ : state) benchmark::DoNotOptimize(avsfe_solve(s.cfg, s.mesh));
  state.counters["dofs"] = s.spaces->num_trial_dofs();
}
BENCHMARK(BM_AvsfeSolve)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace avsfe

BENCHMARK_MAIN();
