#pragma once

// Domain types shared by the solver, schedules, checks and problem library.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace psgm {

using Vector = std::vector<double>;

double norm2(std::span<const double> v);
double distance(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> v);

/// A point of R^n. Factorized problems store U (row-major) then V (row-major).
/// Entries are finite by construction.
class Point {
 public:
  Point() = default;
  explicit Point(Vector values);

  std::size_t size() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }
  std::span<const double> span() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  Vector values_;
};

/// An element of the (Clarke) subdifferential together with its Euclidean norm.
struct SubgradientSample {
  Vector vector;
  double norm = 0.0;

  static SubgradientSample from(Vector v);
};

/// X* as a finite list of points, optionally closed under x -> -x.
struct ReferenceSet {
  std::vector<Point> points;
  bool sign_symmetric = false;

  bool empty() const noexcept { return points.empty(); }
};

double distance_to_reference(const Point& x, const ReferenceSet& refs);

/// Constants of the standing assumption: nu-paraconvexity with constant rho,
/// Hoelderian error bound of order delta with modulus mu, and L bounding the
/// subgradient norms on the tube. tau = mu / L is derived on demand.
class TheoryConstants {
 public:
  TheoryConstants(double nu, double rho, double delta, double mu, double L);

  double nu() const noexcept { return nu_; }
  double rho() const noexcept { return rho_; }
  double delta() const noexcept { return delta_; }
  double mu() const noexcept { return mu_; }
  double L() const noexcept { return L_; }
  double tau() const noexcept { return mu_ / L_; }
  /// delta * (1 + nu) - 1, strictly positive.
  double growth_gap() const noexcept { return delta_ * (1.0 + nu_) - 1.0; }

 private:
  double nu_, rho_, delta_, mu_, L_;
};

using ValueOracle = std::function<double(const Point&)>;
using SubgradientOracle = std::function<SubgradientSample(const Point&)>;
using ProjectionOracle = std::function<Point(const Point&)>;
using DistanceOracle = std::function<double(const Point&)>;
/// Row-major n x n Hessian.
using HessianOracle = std::function<Vector(const Point&)>;

struct ProblemInstance {
  std::string name;
  std::size_t dimension = 0;
  ValueOracle value;
  SubgradientOracle subgradient;
  ProjectionOracle project;
  std::optional<ReferenceSet> reference;
  /// Used when X* is not available as a point set (factorized problems).
  DistanceOracle distance_surrogate;
  std::optional<double> f_star;
  /// f_star is a stand-in (e.g. 0 for L1 losses on real data), not the optimum.
  bool f_star_is_surrogate = false;
  std::optional<TheoryConstants> theory;
  std::string theory_note;
  HessianOracle hessian;

  bool has_distance() const {
    return reference.has_value() || static_cast<bool>(distance_surrogate);
  }
  /// Distance to X* (or the surrogate). Requires has_distance().
  double distance(const Point& x) const;
};

/// Built-in projections onto closed convex sets.
namespace projection {
ProjectionOracle identity();
ProjectionOracle nonnegative();
ProjectionOracle box(Vector lo, Vector hi);
ProjectionOracle ball(Vector center, double radius);
}  // namespace projection

struct IterateRecord {
  std::size_t k = 0;
  double f_value = 0.0;
  double f_best = 0.0;
  double alpha = 0.0;
  double grad_norm = 0.0;
  std::optional<double> dist;
};

enum class Termination { MaxIterations, Stationary, TargetReached };

const char* to_string(Termination t);

struct RunHistory {
  std::vector<IterateRecord> records;
  Termination termination = Termination::MaxIterations;
  Point final_point;
  /// Present only when the run was configured to record points.
  std::vector<Point> points;
  bool surrogate_target = false;
};

}  // namespace psgm
