#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "schedule.hpp"

namespace psgm {

struct SolverConfig {
  std::size_t max_iterations = 1000;
  /// Subgradient norms at or below this value stop the run as Stationary.
  double stationary_tolerance = 1e-12;
  /// Stop once f_best - f_star <= target_gap (requires a known f_star).
  std::optional<double> target_gap;
  bool record_distances = true;
  bool record_points = false;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Projected subgradient method with normalized directions:
///   x_{k+1} = P(x_k - alpha_k zeta_k / ||zeta_k||).
/// Record k describes x_k; the last record's alpha is the step that would
/// have been taken next.
RunHistory run(const ProblemInstance& problem, const StepSizeRule& rule, const SolverConfig& config,
               const Point& x0);

struct InequalityCheck {
  std::string name;
  /// slack[i] >= 0 means the inequality held at check_index[i].
  std::vector<double> slack;
  std::vector<std::size_t> check_index;
  double max_violation = 0.0;
  std::size_t worst_index = 0;
  bool pass = true;
};

struct AuditReport {
  /// distance decrease (function gap form), distance decrease (error-bound
  /// form), per-iterate gap bound, best-value gap bound, f_best monotonicity.
  std::vector<InequalityCheck> checks;
  bool empirical_L = false;
  double L_used = 0.0;
  double tolerance = 1e-10;
  std::size_t audited_iterations = 0;

  bool pass() const;
  const InequalityCheck& check(const std::string& name) const;
};

/// Re-checks the per-iteration recurrences on a finished run. Uses recorded
/// distances when present, otherwise recomputes them from recorded points.
/// Inequalities are only asserted while dist lies inside the tube T_{1/2}.
AuditReport audit(const RunHistory& history, const ProblemInstance& problem,
                  double tolerance = 1e-10);

}  // namespace psgm
