// avsfe: run AVS-FE studies and single solves from the command line.
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "avsfe/checks.hpp"
#include "avsfe/error.hpp"
#include "avsfe/io.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using namespace avsfe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;
constexpr int kExitUsage = 64;

const char* const kUsage =
    "usage: avsfe <command> [options]\n"
    "\n"
    "commands:\n"
    "  solve       single solve (optionally adaptive) from a run config\n"
    "  converge    uniform refinement study, case A (rates in h)\n"
    "  compare     AVS-FE vs Bubnov-Galerkin, case B, nu = 0.49999999\n"
    "  inclusion   adaptive inclusion problem, RT and C0 stresses\n"
    "  beam        bending beam strain energies, AVS-FE vs Bubnov-Galerkin\n"
    "  check       built-in invariant suite\n"
    "\n"
    "Run `avsfe <command> --help` for the options of a command.\n";

struct Flags {
  std::string config;
  int p = 0;
  std::vector<int> degrees;
  int refinements = -1;
  double theta = 0.0;
  int steps = -1;
  std::string stress;
  std::string precision;
  std::string neumann;
  std::string csv;
  std::string vtk_dir;
  bool no_timing = false;
  bool no_galerkin = false;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run config")->check(CLI::ExistingFile);
  cmd->add_option("--p", f.p, "displacement degree")->check(CLI::Range(1, 5));
  cmd->add_option("--refinements", f.refinements, "uniform refinements")->check(CLI::NonNegativeNumber);
  cmd->add_option("--precision", f.precision, "auto, double, extended or quad");
  cmd->add_option("--csv", f.csv, "CSV output path (stdout when omitted)");
  cmd->add_option("--vtk-dir", f.vtk_dir, "write one VTK file per solve into this directory");
  cmd->add_flag("--no-timing", f.no_timing, "write wall_s as 0 for byte-identical output");
  cmd->add_flag("-q,--quiet", f.quiet, "no progress lines on stderr");
}

// AVSFE_THREADS must be an integer >= 1 when set.
void validate_thread_env() {
  const char* env = std::getenv("AVSFE_THREADS");
  if (!env) return;
  std::istringstream in(env);
  int n = 0;
  char extra;
  if (!(in >> n) || in >> extra || n < 1) {
    throw ConfigError(std::string("AVSFE_THREADS must be an integer >= 1, got '") + env + "'");
  }
}

void apply_flags(const Flags& f, cli::RunConfig& rc) {
  StudyConfig& sc = rc.study_config;
  if (f.p > 0) sc.discretization.p = f.p;
  if (!f.degrees.empty()) sc.degrees = f.degrees;
  if (f.refinements >= 0) {
    sc.refinements = f.refinements;
    rc.refinements_given = true;
  }
  if (f.theta != 0.0) {
    AVSFE_REQUIRE(f.theta > 0.0 && f.theta <= 1.0, ConfigError, "--theta must lie in (0, 1]");
    sc.adapt.theta = f.theta;
    rc.adaptive = true;
  }
  if (f.steps >= 0) {
    sc.adapt.max_steps = f.steps;
    rc.adaptive = true;
  }
  if (f.stress == "both") {
    sc.inclusion_spaces = {StressSpace::RtRows, StressSpace::C0Tensor};
  } else if (!f.stress.empty()) {
    sc.discretization.stress = cli::parse_stress_space(f.stress);
    sc.inclusion_spaces = {sc.discretization.stress};
  }
  if (!f.precision.empty()) sc.solver.precision = cli::parse_precision(f.precision);
  if (!f.neumann.empty()) {
    AVSFE_REQUIRE(f.neumann == "weak" || f.neumann == "strong", ConfigError, "--neumann must be weak or strong");
    sc.neumann_mode = f.neumann == "strong" ? NeumannMode::Strong : NeumannMode::Weak;
  }
  if (f.no_galerkin) sc.galerkin_baseline = false;
  if (!f.csv.empty()) rc.output.csv = f.csv;
  if (!f.vtk_dir.empty()) rc.output.vtk_dir = f.vtk_dir;
  if (f.no_timing) rc.output.timing = false;
  if (f.quiet) rc.output.verbosity = 0;
}

std::string fmt(double v) {
  if (std::isnan(v)) return "-";
  std::ostringstream s;
  s << std::setprecision(4) << v;
  return s.str();
}

void progress(const cli::RunConfig& rc, const std::string& label, int step, const Mesh& mesh,
              const AvsfeResult& r) {
  if (!rc.output.vtk_dir.empty()) {
    std::ostringstream name;
    name << label << "_step" << std::setw(2) << std::setfill('0') << step << ".vtk";
    write_vtk(rc.output.vtk_dir / name.str(), r.solution, r.error.indicators);
  }
  if (rc.output.verbosity > 0) {
    std::cerr << "[" << label << "] step " << step << ": cells " << mesh.num_cells() << ", dofs "
              << r.stats.num_dofs << ", eta " << fmt(indicators(r.error).global) << ", "
              << r.stats.precision << " " << r.stats.method << "\n";
    for (const auto& w : r.stats.warnings) std::cerr << "  warning: " << w << "\n";
  }
}

// One series: the CSV path as given. Several: <stem>_<label><ext> each, so
// that every file keeps the single-table schema.
void write_series(const cli::RunConfig& rc, const std::vector<StudySeries>& series) {
  const bool timing = rc.output.timing;
  if (rc.output.csv.empty()) {
    for (const auto& s : series) {
      if (series.size() > 1) std::cout << "# " << s.label << "\n";
      write_csv(std::cout, s.records, timing);
    }
    return;
  }
  const fs::path& path = rc.output.csv;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  if (series.size() == 1) {
    write_csv(path, series.front().records, timing);
    return;
  }
  for (const auto& s : series) {
    fs::path p = path.parent_path() / (path.stem().string() + "_" + s.label + path.extension().string());
    write_csv(p, s.records, timing);
  }
}

void summarize(const cli::RunConfig& rc, const std::vector<StudySeries>& series) {
  if (rc.output.verbosity <= 0) return;
  for (const auto& s : series) {
    if (s.records.empty()) continue;
    const StudyRecord& last = s.records.back();
    std::cerr << s.label << ": " << s.records.size() << " steps, final dofs " << last.ndof << ", eta "
              << fmt(last.energy_estimate) << ", L2(u) " << fmt(last.l2_u) << ", rate_energy "
              << fmt(last.rate_energy) << ", strain energy " << fmt(last.strain_energy) << "\n";
  }
}

int run_study_command(StudyId id, const Flags& f) {
  cli::RunConfig rc = f.config.empty() ? cli::RunConfig{} : cli::load_run_config(f.config);
  AVSFE_REQUIRE(!rc.study || *rc.study == id, ConfigError,
                "config is for study '" + study_name(*rc.study) + "', not '" + study_name(id) + "'");
  cli::apply_materials(rc);
  apply_flags(f, rc);
  if (!rc.output.vtk_dir.empty()) fs::create_directories(rc.output.vtk_dir);
  rc.study_config.on_solve = [&rc](const std::string& label, int step, const Mesh& mesh, const AvsfeResult& r) {
    progress(rc, label, step, mesh, r);
  };
  const auto series = run_study(id, rc.study_config);
  write_series(rc, series);
  summarize(rc, series);
  return kExitOk;
}

int run_solve(const Flags& f) {
  cli::RunConfig rc = f.config.empty() ? cli::RunConfig{} : cli::load_run_config(f.config);
  apply_flags(f, rc);
  if (!rc.output.vtk_dir.empty()) fs::create_directories(rc.output.vtk_dir);
  ProblemSetup s = cli::build_single_problem(rc);
  // Uniform pre-refinement only when asked for; the study default does not apply.
  const int pre = rc.refinements_given ? rc.study_config.refinements : 0;
  for (int i = 0; i < pre; ++i) s.mesh = uniform_refine(s.mesh);
  const ExactSolution* exact = s.exact ? &*s.exact : nullptr;
  AdaptOptions adapt = rc.study_config.adapt;
  if (!rc.adaptive) adapt.max_steps = 0;
  const auto records = adapt_loop(s.config, s.mesh, adapt, exact, [&](const AdaptStep& st) {
    progress(rc, "solve", st.step, st.mesh, st.result);
  });
  const std::vector<StudySeries> series{{"solve", records}};
  write_series(rc, series);
  summarize(rc, series);
  return kExitOk;
}

int run_check(bool quiet) {
  int failed = 0;
  for (const CheckResult& r : run_all_checks()) {
    if (!r.passed) ++failed;
    if (quiet && r.passed) continue;
    std::cout << (r.passed ? "ok    " : "FAIL  ") << r.name << ": " << r.value << " (tol " << r.tolerance << ")";
    if (!r.detail.empty()) std::cout << "  " << r.detail;
    std::cout << "\n";
  }
  std::cout << (failed ? std::to_string(failed) + " check(s) failed" : std::string("all checks passed")) << "\n";
  return failed ? kExitFailure : kExitOk;
}

bool known_command(const std::string& s) {
  for (const char* c : {"solve", "converge", "compare", "inclusion", "beam", "check"}) {
    if (s == c) return true;
  }
  return false;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2 || (argv[1][0] != '-' && !known_command(argv[1]))) {
    if (argc >= 2) std::cerr << "avsfe: unknown command '" << argv[1] << "'\n\n";
    std::cerr << kUsage;
    return kExitUsage;
  }

  CLI::App app{"AVS-FE solver for nearly incompressible plane-strain elasticity", "avsfe"};
  app.require_subcommand(1);
  Flags f;

  auto* solve = app.add_subcommand("solve", "single solve (adaptive with --steps/--theta)");
  add_common(solve, f);
  solve->add_option("--theta", f.theta, "Doerfler parameter");
  solve->add_option("--steps", f.steps, "adaptive refinement steps")->check(CLI::NonNegativeNumber);
  solve->add_option("--stress", f.stress, "rt or c0");
  solve->add_option("--neumann", f.neumann, "weak or strong traction imposition");

  auto* converge = app.add_subcommand("converge", "case A convergence study");
  add_common(converge, f);
  converge->add_option("--degrees", f.degrees, "several degrees, e.g. --degrees 1,2,3")->delimiter(',')->check(CLI::Range(1, 5));
  converge->add_option("--stress", f.stress, "rt or c0");

  auto* compare = app.add_subcommand("compare", "case B locking comparison");
  add_common(compare, f);
  compare->add_flag("--no-galerkin", f.no_galerkin, "skip the Bubnov-Galerkin baseline");

  auto* inclusion = app.add_subcommand("inclusion", "adaptive inclusion study");
  add_common(inclusion, f);
  inclusion->add_option("--theta", f.theta, "Doerfler parameter");
  inclusion->add_option("--steps", f.steps, "adaptive refinement steps")->check(CLI::NonNegativeNumber);
  inclusion->add_option("--stress", f.stress, "rt, c0 or both");
  inclusion->add_option("--neumann", f.neumann, "weak or strong traction imposition");

  auto* beam = app.add_subcommand("beam", "beam bending study");
  add_common(beam, f);
  beam->add_option("--stress", f.stress, "rt or c0");
  beam->add_option("--neumann", f.neumann, "weak or strong traction imposition");
  beam->add_flag("--no-galerkin", f.no_galerkin, "skip the Bubnov-Galerkin baseline");

  auto* check = app.add_subcommand("check", "built-in invariant suite");
  check->add_flag("-q,--quiet", f.quiet, "print failures only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    validate_thread_env();
    if (*check) return run_check(f.quiet);
    if (*solve) return run_solve(f);
    if (*converge) return run_study_command(StudyId::ConvergenceA, f);
    if (*compare) return run_study_command(StudyId::ComparisonB, f);
    if (*inclusion) return run_study_command(StudyId::Inclusion, f);
    if (*beam) return run_study_command(StudyId::Beam, f);
  } catch (const ConfigError& e) {
    std::cerr << "avsfe: configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const MeshError& e) {
    std::cerr << "avsfe: mesh error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const SolverError& e) {
    std::cerr << "avsfe: solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "avsfe: " << e.what() << "\n";
    return kExitFailure;
  }
  std::cerr << kUsage;
  return kExitUsage;
}
