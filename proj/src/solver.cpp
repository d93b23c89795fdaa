#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace psgm {
namespace {

[[noreturn]] void oracle_failure(std::size_t k, const std::string& what) {
  std::ostringstream os;
  os << "iteration " << k << ": " << what;
  fail(ErrorCode::kNumeric, os.str());
}

InequalityCheck make_check(std::string name) {
  InequalityCheck c;
  c.name = std::move(name);
  return c;
}

void add_slack(InequalityCheck& c, std::size_t index, double slack) {
  c.slack.push_back(slack);
  c.check_index.push_back(index);
  if (-slack > c.max_violation) {
    c.max_violation = -slack;
    c.worst_index = index;
  }
}

}  // namespace

void SolverConfig::validate() const {
  require(max_iterations >= 1, "max_iterations must be at least 1");
  require(std::isfinite(stationary_tolerance) && stationary_tolerance >= 0.0,
          "stationary_tolerance must be nonnegative");
  require(!target_gap || std::isfinite(*target_gap), "target_gap must be finite");
}

RunHistory run(const ProblemInstance& problem, const StepSizeRule& rule_in, const SolverConfig& config,
               const Point& x0) {
  config.validate();
  require(x0.size() == problem.dimension, "initial point dimension mismatch");
  require(static_cast<bool>(problem.value) && static_cast<bool>(problem.subgradient) &&
              static_cast<bool>(problem.project),
          "problem is missing an oracle");

  StepSizeRule rule = rule_in;
  RunHistory history;
  if (rule.is_polyak_type() && !rule.target()) {
    require(problem.f_star.has_value(), "polyak-type rule needs a target: the problem has no f_star");
    rule = rule.with_target(*problem.f_star);
    history.surrogate_target = problem.f_star_is_surrogate;
  }
  require(!config.target_gap || problem.f_star.has_value(), "target_gap needs a known f_star");
  const bool track_dist = config.record_distances && problem.has_distance();

  Point x = x0;
  double f_best = std::numeric_limits<double>::infinity();
  history.records.reserve(std::min<std::size_t>(config.max_iterations + 1, 1u << 20));

  for (std::size_t k = 0;; ++k) {
    const double f = problem.value(x);
    if (!std::isfinite(f)) oracle_failure(k, "value oracle returned a non-finite value");
    SubgradientSample zeta;
    try {
      zeta = problem.subgradient(x);
    } catch (const Error& e) {
      oracle_failure(k, e.what());
    }
    if (zeta.vector.size() != problem.dimension) oracle_failure(k, "subgradient dimension mismatch");
    if (!std::isfinite(zeta.norm)) oracle_failure(k, "subgradient norm is not finite");

    f_best = std::min(f_best, f);
    IterateRecord rec;
    rec.k = k;
    rec.f_value = f;
    rec.f_best = f_best;
    rec.grad_norm = zeta.norm;
    if (track_dist) rec.dist = problem.distance(x);
    if (config.record_points) history.points.push_back(x);

    const bool stationary = zeta.norm <= config.stationary_tolerance;
    rec.alpha = stationary ? 0.0 : step_size(rule, k, f, zeta.norm);
    if (!std::isfinite(rec.alpha)) oracle_failure(k, "step size is not finite");
    history.records.push_back(rec);

    if (stationary) {
      history.termination = Termination::Stationary;
      break;
    }
    if (config.target_gap && f_best - *problem.f_star <= *config.target_gap) {
      history.termination = Termination::TargetReached;
      break;
    }
    if (k >= config.max_iterations) {
      history.termination = Termination::MaxIterations;
      break;
    }

    Vector trial = x.values();
    const double scale = rec.alpha / zeta.norm;
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] -= scale * zeta.vector[i];
    try {
      x = problem.project(Point(std::move(trial)));
    } catch (const Error& e) {
      oracle_failure(k, e.what());
    }
    if (x.size() != problem.dimension) oracle_failure(k, "projection changed the dimension");
  }
  history.final_point = x;
  return history;
}

bool AuditReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.pass; });
}

const InequalityCheck& AuditReport::check(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return c;
  fail(ErrorCode::kInvalidArgument, "no audit check named " + name);
}

AuditReport audit(const RunHistory& history, const ProblemInstance& problem, double tolerance) {
  const auto& recs = history.records;
  require(!recs.empty(), "audit requires a nonempty history");
  const bool have_dist = std::all_of(recs.begin(), recs.end(), [](const IterateRecord& r) { return r.dist.has_value(); });
  const bool have_points = history.points.size() == recs.size();
  if (!(have_points && problem.has_distance()) && !have_dist)
    fail(ErrorCode::kInvalidArgument, "audit requires recorded points and reference");
  require(problem.f_star.has_value(), "audit requires a known f_star");

  std::vector<double> dist(recs.size());
  for (std::size_t k = 0; k < recs.size(); ++k)
    dist[k] = recs[k].dist ? *recs[k].dist : problem.distance(history.points[k]);

  AuditReport report;
  report.tolerance = tolerance;
  double tau = 0.0;
  double delta = 1.0;
  double radius = std::numeric_limits<double>::infinity();
  if (problem.theory) {
    report.L_used = problem.theory->L();
    tau = problem.theory->tau();
    delta = problem.theory->delta();
    radius = tube_radius(0.5, *problem.theory);
  } else {
    report.empirical_L = true;
    for (const auto& r : recs) report.L_used = std::max(report.L_used, r.grad_norm);
  }
  const double L = report.L_used;
  const double f_star = *problem.f_star;

  InequalityCheck basic_gap = make_check("distance_decrease_gap");
  InequalityCheck basic_heb = make_check("distance_decrease_heb");
  InequalityCheck point_gap = make_check("iterate_gap_bound");
  InequalityCheck best_gap = make_check("best_gap_bound");
  InequalityCheck monotone = make_check("f_best_monotone");

  // Slacks are scaled by the magnitude of the bound so that the tolerance is
  // relative for large values and absolute near zero.
  auto rel = [](double lhs, double rhs) { return (rhs - lhs) / std::max(1.0, std::abs(rhs)); };

  bool all_in_tube = true;
  double sum_alpha = 0.0, sum_alpha2 = 0.0, best_from_1 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    const bool in_tube = dist[k] < radius;
    all_in_tube = all_in_tube && in_tube;
    if (k > 0) add_slack(monotone, k, recs[k - 1].f_best - r.f_best);
    if (!in_tube) continue;
    ++report.audited_iterations;

    const double a = r.alpha;
    if (k + 1 < recs.size()) {
      const double d2_next = dist[k + 1] * dist[k + 1];
      const double d2 = dist[k] * dist[k];
      // Violations are attributed to the iterate whose distance is bounded.
      add_slack(basic_gap, k + 1, rel(d2_next, d2 - (a / L) * (r.f_value - f_star) + a * a));
      if (problem.theory)
        add_slack(basic_heb, k + 1, rel(d2_next, d2 - a * tau * std::pow(dist[k], 1.0 / delta) + a * a));
    }
    if (a > 0.0) add_slack(point_gap, k, rel(r.f_value - f_star, (L * dist[k] * dist[k] + L * a * a) / a));

    if (k >= 1 && all_in_tube) {
      best_from_1 = std::min(best_from_1, r.f_value);
      sum_alpha += a;
      sum_alpha2 += a * a;
      if (sum_alpha > 0.0)
        add_slack(best_gap, k, rel(best_from_1 - f_star, (L * dist[1] * dist[1] + L * sum_alpha2) / sum_alpha));
    }
  }

  for (InequalityCheck* c : {&basic_gap, &basic_heb, &point_gap, &best_gap, &monotone}) {
    c->pass = c->max_violation <= tolerance;
    report.checks.push_back(std::move(*c));
  }
  return report;
}

}  // namespace psgm
