#include "avsfe/adaptivity.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "avsfe/error.hpp"

namespace avsfe {

IndicatorField indicators(const ErrorRepresentation& error) {
  IndicatorField f;
  f.eta = error.indicators;
  double s = 0.0;
  for (double e : f.eta) s += e * e;
  f.global = std::sqrt(s);
  return f;
}

std::vector<int> dorfler_mark(const IndicatorField& field, double theta,
                              MarkingConvention convention) {
  AVSFE_REQUIRE(theta > 0.0 && theta <= 1.0, ConfigError, "theta must lie in (0, 1]");
  const int n = static_cast<int>(field.eta.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return field.eta[a] > field.eta[b]; });
  auto weight = [&](int c) {
    const double e = field.eta[c];
    return convention == MarkingConvention::Squared ? e * e : e;
  };
  // Sum in marking order so that theta = 1 reaches the total exactly.
  double total = 0.0;
  for (int c : order) total += weight(c);
  const double target = (convention == MarkingConvention::Squared ? theta * theta : theta) * total;
  std::vector<int> marked;
  if (!(total > 0.0)) return marked;
  // Summation error is at most n eps total; without this slack, equal
  // indicators can need one cell more than the exact criterion. theta = 1
  // keeps the exact comparison so every nonzero cell is marked.
  const double slack =
      theta < 1.0 ? 4.0 * n * std::numeric_limits<double>::epsilon() * total : 0.0;
  double partial = 0.0;
  for (int c : order) {
    if (partial >= target - slack) break;
    partial += weight(c);
    marked.push_back(c);
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

std::vector<StudyRecord> adapt_loop(const ProblemConfig& config, const Mesh& initial,
                                    const AdaptOptions& options, const ExactSolution* exact,
                                    const std::function<void(const AdaptStep&)>& on_step) {
  AVSFE_REQUIRE(options.max_steps >= 0, ConfigError, "max_steps must be >= 0");
  std::vector<StudyRecord> records;
  Mesh mesh = initial;
  for (int step = 0; step <= options.max_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    const AvsfeResult result = avsfe_solve(config, mesh);
    const IndicatorField field = indicators(result.error);
    StudyRecord rec;
    rec.step = step;
    rec.h_max = mesh.max_diameter();
    rec.ndof = result.stats.num_dofs;
    rec.num_cells = mesh.num_cells();
    rec.energy_estimate = field.global;
    rec.strain_energy = strain_energy(result.solution, config.materials);
    if (exact) {
      const ErrorNorms n = error_norms(result.solution, *exact);
      rec.l2_u = n.l2_u;
      rec.h1_u = n.h1_u;
      rec.hdiv_sigma = n.hdiv_sigma;
      rec.u_norm = n.u_norm;
    }
    const bool last = step == options.max_steps || field.global <= options.stop_estimate;
    std::vector<int> marked;
    if (!last) marked = dorfler_mark(field, options.theta, options.convention);
    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    records.push_back(rec);
    if (on_step) on_step(AdaptStep{step, mesh, result, field, marked});
    if (last || marked.empty()) break;
    mesh = bisect_refine(mesh, marked);
  }
  fill_rates(records, true);
  return records;
}

}  // namespace avsfe
