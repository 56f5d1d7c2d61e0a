// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Long studies (inclusion, comparison) make this take a few minutes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "avsfe/checks.hpp"
#include "avsfe/studies.hpp"

namespace {

using namespace avsfe;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rate(double e0, double e1, double h0, double h1) { return std::log(e0 / e1) / std::log(h0 / h1); }

const StudySeries& series(const std::vector<StudySeries>& all, const std::string& label) {
  for (const auto& s : all)
    if (s.label == label) return s;
  throw Error("missing series " + label);
}

// 1. Rates of U-norm, energy estimate and L2(u) for p = 1, 2, 3.
Verdict convergence() {
  StudyConfig cfg;
  cfg.degrees = {1, 2, 3};
  cfg.refinements = 5;
  Verdict v;
  for (const auto& s : run_study(StudyId::ConvergenceA, cfg)) {
    const int p = s.label.back() - '0';
    const auto& r = s.records;
    const std::size_t n = r.size();
    std::string line = s.label + " U/energy/L2 rates";
    bool ok = n >= 6;
    for (std::size_t i = n - 2; ok && i < n; ++i) {
      const double ru = rate(r[i - 1].u_norm, r[i].u_norm, r[i - 1].h_max, r[i].h_max);
      const double re = rate(r[i - 1].energy_estimate, r[i].energy_estimate, r[i - 1].h_max, r[i].h_max);
      const double rl = rate(r[i - 1].l2_u, r[i].l2_u, r[i - 1].h_max, r[i].h_max);
      line += fmt(" %.3f", ru) + fmt("/%.3f", re) + fmt("/%.3f", rl);
      ok = ok && std::abs(ru - p) <= 0.2 && std::abs(re - p) <= 0.2 && rl >= p - 0.1;
    }
    v.require(ok, line);
  }
  return v;
}

// 2. AVS-FE P1/RT0 converges without locking; Galerkin P1 does not.
Verdict locking() {
  StudyConfig cfg;
  cfg.refinements = 6;
  const auto all = run_study(StudyId::ComparisonB, cfg);
  const auto& a = series(all, "avsfe").records;
  const auto& g = series(all, "galerkin").records;
  Verdict v;
  bool decreasing = true;
  for (std::size_t i = 1; i < a.size(); ++i) decreasing = decreasing && a[i].l2_u < a[i - 1].l2_u;
  const std::size_t n = a.size();
  const double final_rate = rate(a[n - 2].l2_u, a[n - 1].l2_u, a[n - 2].h_max, a[n - 1].h_max);
  v.require(decreasing, "AVS-FE L2 strictly decreasing (first " + fmt("%.6g", a.front().l2_u) +
                            ", last " + fmt("%.6g", a.back().l2_u) + ")");
  v.require(final_rate >= 1.8, "AVS-FE final L2 rate" + fmt(" %.3f >= 1.8", final_rate));
  bool increases = false;
  for (std::size_t i = 1; i < g.size(); ++i) increases = increases || g[i].l2_u > g[i - 1].l2_u;
  v.require(increases, "Galerkin L2 increases at least once (last " + fmt("%.6g", g.back().l2_u) + ")");
  return v;
}

Verdict from_checks(const std::vector<CheckResult>& checks) {
  Verdict v;
  for (const auto& c : checks) v.require(c.passed, c.name + fmt(" %.2e", c.value));
  return v;
}

// 3. SPD, saddle-point equivalence and Galerkin orthogonality on two cells.
Verdict oracles() {
  std::vector<CheckResult> r;
  for (StressSpace s : {StressSpace::RtRows, StressSpace::C0Tensor}) {
    for (int p = 1; p <= 3; ++p) {
      r.push_back(check_condensed_spd(p, s));
      r.push_back(check_saddle_equivalence(p, s));
      r.push_back(check_galerkin_orthogonality(p, s));
    }
  }
  return from_checks(r);
}

// 4. Patch test for both stress spaces.
Verdict patch() { return from_checks({check_patch(StressSpace::RtRows), check_patch(StressSpace::C0Tensor)}); }

struct FarField {
  double lo = INFINITY, hi = -INFINITY, mean = 0.0;
};

// Cell-averaged sxx over centroid x > 0.9, |y - 0.5| < 0.1.
FarField far_field_range(const Mesh& mesh, const AvsfeResult& r) {
  const auto avg = cell_average_stress(r.solution);
  FarField f;
  double area = 0.0;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const Point2 x = mesh.geometry(c).centroid();
    if (x.x() > 0.9 && std::abs(x.y() - 0.5) < 0.1) {
      f.lo = std::min(f.lo, avg[c][0]);
      f.hi = std::max(f.hi, avg[c][0]);
      f.mean += mesh.cell_area(c) * avg[c][0];
      area += mesh.cell_area(c);
    }
  }
  f.mean /= area;
  return f;
}

// Estimator of `s` interpolated log-log at `ndof`; NaN outside its range.
double interpolate_eta(const std::vector<StudyRecord>& s, double ndof) {
  std::vector<StudyRecord> sorted = s;
  std::sort(sorted.begin(), sorted.end(), [](auto& a, auto& b) { return a.ndof < b.ndof; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const double n0 = sorted[i - 1].ndof, n1 = sorted[i].ndof;
    if (ndof < n0 || ndof > n1 || n0 == n1) continue;
    const double t = std::log(ndof / n0) / std::log(n1 / n0);
    return std::exp((1 - t) * std::log(sorted[i - 1].energy_estimate) + t * std::log(sorted[i].energy_estimate));
  }
  return NAN;
}

// 5. Adaptive inclusion study, RT and C0 stresses.
Verdict inclusion() {
  StudyConfig cfg;
  std::map<std::string, FarField> far;
  cfg.on_solve = [&](const std::string& label, int, const Mesh& mesh, const AvsfeResult& r) {
    far[label] = far_field_range(mesh, r);
  };
  const auto all = run_study(StudyId::Inclusion, cfg);
  Verdict v;
  for (const auto& s : all) {
    double worst = -INFINITY;
    int at = 0;
    for (std::size_t i = 1; i < s.records.size(); ++i) {
      const double growth = s.records[i].energy_estimate / s.records[i - 1].energy_estimate - 1.0;
      if (growth > worst) worst = growth, at = static_cast<int>(i);
    }
    v.require(s.records.size() == 13 && worst <= 0.05,
              "(a) " + s.label + " eta " + fmt("%.4g", s.records.front().energy_estimate) + " -> " +
                  fmt("%.4g", s.records.back().energy_estimate) + ", largest step change " +
                  fmt("%+.1f%%", 100 * worst) + " at step " + std::to_string(at));
  }

  // (b) Both runs start from the same mesh and refine in lockstep; pair by
  // step when the DOF counts are within 25% of each other.
  const auto& rt = series(all, "rt").records;
  const auto& c0 = series(all, "c0").records;
  int pairs = 0, below = 0;
  for (std::size_t i = 0; i < std::min(rt.size(), c0.size()); ++i) {
    const double ratio = static_cast<double>(rt[i].ndof) / c0[i].ndof;
    if (ratio < 0.8 || ratio > 1.25) continue;
    ++pairs;
    below += rt[i].energy_estimate <= c0[i].energy_estimate;
  }
  v.require(pairs > 0 && below == pairs, "(b) RT <= C0 at " + std::to_string(below) + " of " +
                                             std::to_string(pairs) + " comparable steps");
  int interp = 0, interp_below = 0;
  for (const auto& r : rt) {
    const double e = interpolate_eta(c0, r.ndof);
    if (std::isnan(e)) continue;
    ++interp;
    interp_below += r.energy_estimate <= e;
  }
  v.detail += "; info: against C0 interpolated at equal DOFs, RT lower at " + std::to_string(interp_below) +
              " of " + std::to_string(interp) + " points";

  // (c) far field, weak traction for both spaces and strong traction for RT.
  StudyConfig strong;
  strong.adapt.max_steps = 0;
  strong.inclusion_spaces = {StressSpace::RtRows};
  strong.neumann_mode = NeumannMode::Strong;
  strong.on_solve = [&](const std::string&, int, const Mesh& mesh, const AvsfeResult& r) {
    far["rt strong"] = far_field_range(mesh, r);
  };
  run_study(StudyId::Inclusion, strong);
  for (const auto& [label, f] : far) {
    const bool ok = std::abs(f.lo - 100.0) <= 5.0 && std::abs(f.hi - 100.0) <= 5.0;
    v.require(ok, "(c) " + label + " far-field sxx in [" + fmt("%.2f", f.lo) + ", " + fmt("%.2f", f.hi) +
                      "] (info: area mean " + fmt("%.2f", f.mean) + ")");
  }
  return v;
}

double relative_change(double prev, double next) { return std::abs(next - prev) / std::abs(next); }

// 6. Beam: AVS-FE energies Cauchy-like, Galerkin energies non-monotone.
Verdict beam() {
  const auto all = run_study(StudyId::Beam, StudyConfig{});
  const auto& a = series(all, "avsfe").records;
  const auto& g = series(all, "galerkin").records;
  Verdict v;
  std::vector<double> changes;
  for (std::size_t i = 1; i < a.size(); ++i)
    changes.push_back(relative_change(a[i - 1].strain_energy, a[i].strain_energy));
  std::string list;
  bool shrinking = true, shrinking_late = true;
  for (std::size_t i = 0; i < changes.size(); ++i) {
    list += fmt(i ? " %.3f" : "%.3f", changes[i]);
    if (i > 0 && changes[i] >= changes[i - 1]) {
      shrinking = false;
      if (i >= 3) shrinking_late = false;  // compares changes ending at step 3 onward
    }
  }
  v.require(a.size() >= 6 && shrinking, "AVS-FE energy " + fmt("%.4g", a.front().strain_energy) + " -> " +
                                            fmt("%.4g", a.back().strain_energy) +
                                            ", relative changes " + list);
  v.detail += std::string("; info: changes shrink after step 2: ") + (shrinking_late ? "yes" : "no");
  bool up = false, down = false;
  for (std::size_t i = 1; i < g.size(); ++i) {
    up = up || g[i].strain_energy > g[i - 1].strain_energy;
    down = down || g[i].strain_energy < g[i - 1].strain_energy;
  }
  const double diverged = g.back().strain_energy / g.front().strain_energy;
  v.require((up && down) || diverged > 10.0 || !std::isfinite(diverged),
            "Galerkin energy non-monotone or diverging (" + fmt("%.4g", g.front().strain_energy) + " -> " +
                fmt("%.4g", g.back().strain_energy) + ")");
  return v;
}

// 7. Kernel property suite.
Verdict kernels() {
  return from_checks({check_quadrature_exactness(12), check_piola_divergence(), check_facet_telescoping(),
                      check_dorfler_minimality(300), check_body_force_order()});
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "convergence rates", convergence}, {2, "locking comparison", locking},
      {3, "SPD and equivalence oracles", oracles}, {4, "patch test", patch},
      {5, "adaptive inclusion", inclusion}, {6, "beam energies", beam},
      {7, "kernel properties", kernels},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%.1f s) %s\n", c.id, c.name, v.pass ? "PASS" : "FAIL", secs,
                v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d of 7 criteria passed\n", 7 - failed);
  return failed == 0 ? 0 : 1;
}
