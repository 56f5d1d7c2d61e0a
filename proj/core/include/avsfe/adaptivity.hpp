#pragma once

#include <functional>
#include <vector>

#include "avsfe/verification.hpp"

namespace avsfe {

struct IndicatorField {
  std::vector<double> eta;  // per cell
  double global = 0.0;      // sqrt(sum eta_m^2)
};

/// eta_m = sqrt(e_m^T G_m e_m) taken from the recovery step.
IndicatorField indicators(const ErrorRepresentation& error);

/// Squared: sum_{M} eta_m^2 >= theta^2 sum eta_m^2. Plain: sum_{M} eta_m >= theta sum eta_m.
enum class MarkingConvention { Squared, Plain };

/// Smallest set satisfying the Doerfler criterion, built greedily from the
/// largest indicator (ties by lower cell index). Returned in ascending order.
std::vector<int> dorfler_mark(const IndicatorField& field, double theta,
                              MarkingConvention convention = MarkingConvention::Squared);

struct AdaptOptions {
  double theta = 0.5;
  int max_steps = 12;
  double stop_estimate = 0.0;  // stop once the global estimate falls below
  MarkingConvention convention = MarkingConvention::Squared;
};

struct AdaptStep {
  int step;
  const Mesh& mesh;
  const AvsfeResult& result;
  const IndicatorField& indicators;
  const std::vector<int>& marked;  // empty on the final step
};

/// Solve, estimate, mark, bisect; one record per solve (max_steps + 1 at
/// most). Norm columns are filled when `exact` is given.
std::vector<StudyRecord> adapt_loop(const ProblemConfig& config, const Mesh& initial,
                                    const AdaptOptions& options,
                                    const ExactSolution* exact = nullptr,
                                    const std::function<void(const AdaptStep&)>& on_step = {});

}  // namespace avsfe
