#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace psgm {

double norm2(std::span<const double> v) {
  // Scaled accumulation keeps tiny and huge entries from under/overflowing.
  double scale = 0.0;
  double ssq = 1.0;
  for (double x : v) {
    if (x == 0.0) continue;
    const double a = std::abs(x);
    if (scale < a) {
      ssq = 1.0 + ssq * (scale / a) * (scale / a);
      scale = a;
    } else {
      ssq += (a / scale) * (a / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

double distance(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "distance: dimension mismatch");
  Vector diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  return norm2(diff);
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Point::Point(Vector values) : values_(std::move(values)) {
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream os;
      os << "point entry " << i << " is not finite";
      fail(ErrorCode::kNumeric, os.str());
    }
  }
}

SubgradientSample SubgradientSample::from(Vector v) {
  require(all_finite(v), "subgradient has non-finite entries", ErrorCode::kNumeric);
  SubgradientSample s;
  s.norm = norm2(v);
  s.vector = std::move(v);
  return s;
}

double distance_to_reference(const Point& x, const ReferenceSet& refs) {
  require(!refs.empty(), "no reference");
  double best = std::numeric_limits<double>::infinity();
  for (const Point& r : refs.points) {
    require(r.size() == x.size(), "reference dimension mismatch");
    best = std::min(best, distance(x.span(), r.span()));
    if (refs.sign_symmetric) {
      Vector neg(r.size());
      for (std::size_t i = 0; i < r.size(); ++i) neg[i] = -r[i];
      best = std::min(best, distance(x.span(), neg));
    }
  }
  return best;
}

TheoryConstants::TheoryConstants(double nu, double rho, double delta, double mu, double L)
    : nu_(nu), rho_(rho), delta_(delta), mu_(mu), L_(L) {
  require(std::isfinite(nu) && nu > 0.0 && nu <= 1.0, "theory: nu must lie in (0,1]");
  require(std::isfinite(rho) && rho >= 0.0, "theory: rho must be nonnegative");
  require(std::isfinite(delta) && delta <= 1.0, "theory: delta must be at most 1");
  require(delta * (1.0 + nu) > 1.0, "theory: delta*(1+nu) must exceed 1");
  require(std::isfinite(mu) && mu > 0.0, "theory: mu must be positive");
  require(std::isfinite(L) && L > 0.0, "theory: L must be positive");
}

double ProblemInstance::distance(const Point& x) const {
  if (reference) return distance_to_reference(x, *reference);
  require(static_cast<bool>(distance_surrogate), "problem has no reference solution");
  return distance_surrogate(x);
}

namespace projection {

ProjectionOracle identity() {
  return [](const Point& x) { return x; };
}

ProjectionOracle nonnegative() {
  return [](const Point& x) {
    Vector v = x.values();
    for (double& e : v) e = std::max(e, 0.0);
    return Point(std::move(v));
  };
}

ProjectionOracle box(Vector lo, Vector hi) {
  require(lo.size() == hi.size(), "box projection: bound size mismatch");
  for (std::size_t i = 0; i < lo.size(); ++i)
    require(lo[i] <= hi[i], "box projection: lo must not exceed hi");
  return [lo = std::move(lo), hi = std::move(hi)](const Point& x) {
    require(x.size() == lo.size(), "box projection: dimension mismatch");
    Vector v = x.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    return Point(std::move(v));
  };
}

ProjectionOracle ball(Vector center, double radius) {
  require(radius >= 0.0, "ball projection: radius must be nonnegative");
  return [center = std::move(center), radius](const Point& x) {
    require(x.size() == center.size(), "ball projection: dimension mismatch");
    const double d = distance(x.span(), center);
    if (d <= radius) return x;
    Vector v(x.size());
    const double s = radius / d;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = center[i] + s * (x[i] - center[i]);
    return Point(std::move(v));
  };
}

}  // namespace projection

const char* to_string(Termination t) {
  switch (t) {
    case Termination::MaxIterations: return "MaxIterations";
    case Termination::Stationary: return "Stationary";
    case Termination::TargetReached: return "TargetReached";
  }
  return "unknown";
}

}  // namespace psgm
