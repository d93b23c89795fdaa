#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "core.hpp"

namespace psgm::testing {

// Central differences with step h on each coordinate.
inline Vector finite_difference(const ValueOracle& f, const Vector& x, double h = 1e-6) {
  Vector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    Vector a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(Point(a)) - f(Point(b))) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vector& a, const Vector& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

inline Vector random_vector(std::size_t n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (double& e : v) e = u(rng);
  return v;
}

inline Vector unit_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (double& e : v) e = g(rng);
  const double s = norm2(v);
  for (double& e : v) e /= s;
  return v;
}

}  // namespace psgm::testing
