#include "paracheck.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "error.hpp"

namespace psgm {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Draws points coordinate by coordinate from one generator, so the first N
// pairs of a 2N-pair run are exactly the pairs of the N-pair run.
class PairSampler {
 public:
  explicit PairSampler(const SamplingDomain& d) : d_(d), rng_(d.seed) {}

  Vector point() {
    Vector v(d_.dimension());
    for (std::size_t i = 0; i < v.size(); ++i)
      v[i] = std::uniform_real_distribution<double>(d_.lo[i], d_.hi[i])(rng_);
    return v;
  }

 private:
  const SamplingDomain& d_;
  std::mt19937_64 rng_;
};

void check_nu(double nu) { require(nu > 0.0 && nu <= 1.0, "nu must lie in (0,1]"); }

std::string describe_point(const Vector& v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

double checked_value(const ValueOracle& h, const Vector& v) {
  const double f = h(Point(v));
  if (!std::isfinite(f)) fail(ErrorCode::kNumeric, "oracle returned a non-finite value at " + describe_point(v));
  return f;
}

SubgradientSample checked_subgradient(const SubgradientOracle& dh, const Vector& v) {
  SubgradientSample s = dh(Point(v));
  if (s.vector.size() != v.size() || !all_finite(s.vector))
    fail(ErrorCode::kNumeric, "subgradient oracle failed at " + describe_point(v));
  return s;
}

// A gap below this is rounding noise in the operands and counts as zero.
double noise_floor(std::initializer_list<double> terms) {
  double s = 0.0;
  for (double t : terms) s += std::abs(t);
  return 16.0 * kEps * s;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Vector diff(const Vector& a, const Vector& b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

const char* to_string(RhoMethod m) { return m == RhoMethod::Midpoint ? "midpoint" : "subgradient"; }

SamplingDomain SamplingDomain::cube(std::size_t n, double lo, double hi, std::size_t pair_count,
                                    std::uint64_t seed) {
  SamplingDomain d{Vector(n, lo), Vector(n, hi), pair_count, seed};
  d.validate();
  return d;
}

void SamplingDomain::validate() const {
  require(!lo.empty() && lo.size() == hi.size(), "sampling domain: bounds must be nonempty and of equal length");
  for (std::size_t i = 0; i < lo.size(); ++i)
    require(std::isfinite(lo[i]) && std::isfinite(hi[i]) && lo[i] < hi[i], "sampling domain: need lo < hi");
  require(pair_count >= 1, "sampling domain: pair_count must be at least 1");
}

double SamplingDomain::radius() const { return 0.5 * distance(lo, hi); }

ParaEstimate midpoint_rho(const ValueOracle& h, const SamplingDomain& domain, double nu) {
  domain.validate();
  check_nu(nu);
  PairSampler sampler(domain);
  ParaEstimate est;
  bool have = false;
  est.method = RhoMethod::Midpoint;
  for (std::size_t i = 0; i < domain.pair_count; ++i) {
    Vector x = sampler.point();
    Vector y = sampler.point();
    const double sep = distance(x, y);
    if (sep == 0.0) continue;
    Vector m(x.size());
    for (std::size_t j = 0; j < m.size(); ++j) m[j] = 0.5 * (x[j] + y[j]);
    const double hx = checked_value(h, x), hy = checked_value(h, y), hm = checked_value(h, m);
    double gap = hm - 0.5 * hx - 0.5 * hy;
    if (gap <= noise_floor({hm, hx, hy})) gap = 0.0;
    const double ratio = 2.0 * gap / std::pow(sep, 1.0 + nu);
    if (!have || ratio > est.rho_hat) {
      have = true;
      est.rho_hat = ratio;
      est.worst_pair = {x, y, 0.5};
      est.worst_index = i;
    }
  }
  return est;
}

ParaEstimate subgradient_rho(const ValueOracle& h, const SubgradientOracle& dh, const SamplingDomain& domain,
                             double nu) {
  domain.validate();
  check_nu(nu);
  PairSampler sampler(domain);
  ParaEstimate est;
  bool have = false;
  est.method = RhoMethod::Subgradient;
  for (std::size_t i = 0; i < domain.pair_count; ++i) {
    Vector x = sampler.point();
    Vector y = sampler.point();
    const double sep = distance(x, y);
    if (sep == 0.0) continue;
    const double hx = checked_value(h, x), hy = checked_value(h, y);
    const double lin = dot(checked_subgradient(dh, x).vector, diff(y, x));
    double gap = hx + lin - hy;
    if (gap <= noise_floor({hx, lin, hy})) gap = 0.0;
    const double ratio = gap / std::pow(sep, 1.0 + nu);
    if (!have || ratio > est.rho_hat) {
      have = true;
      est.rho_hat = ratio;
      est.worst_pair = {x, y, 0.0};
      est.worst_index = i;
    }
  }
  return est;
}

CriterionResult paramonotone_check(const SubgradientOracle& dh, const SamplingDomain& domain, double nu,
                                   double C) {
  domain.validate();
  check_nu(nu);
  require(std::isfinite(C) && C >= 0.0, "paramonotone_check: C must be nonnegative");
  PairSampler sampler(domain);
  CriterionResult res;
  res.worst = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.pair_count; ++i) {
    Vector x = sampler.point();
    Vector y = sampler.point();
    const Vector d = diff(y, x);
    const Vector eta_minus_zeta = diff(checked_subgradient(dh, y).vector, checked_subgradient(dh, x).vector);
    const double violation = -(dot(eta_minus_zeta, d) + C * std::pow(norm2(d), 1.0 + nu));
    if (violation > res.worst) {
      res.worst = violation;
      res.x = x;
      res.y = y;
    }
  }
  res.pass = res.worst <= 1e-9;
  return res;
}

CriterionResult hessian_criterion(const HessianOracle& hess, const SamplingDomain& domain, double nu, double rho) {
  domain.validate();
  check_nu(nu);
  require(static_cast<bool>(hess), "hessian_criterion: problem has no Hessian oracle");
  require(std::isfinite(rho) && rho >= 0.0, "hessian_criterion: rho must be nonnegative");
  const std::size_t n = domain.dimension();
  PairSampler sampler(domain);
  CriterionResult res;
  res.worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < domain.pair_count; ++i) {
    Vector x = sampler.point();
    const double nx = norm2(x);
    if (nx <= 1e-8) {
      ++res.skipped;
      continue;
    }
    const Vector h = hess(Point(x));
    require(h.size() == n * n, "hessian_criterion: Hessian oracle returned the wrong size");
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
    Eigen::MatrixXd H = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        h.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double c = rho * (1.0 + nu) / std::pow(nx, 3.0 - nu);
    H += c * (nx * nx * Eigen::MatrixXd::Identity(n, n) - (1.0 - nu) * xv * xv.transpose());
    const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(0.5 * (H + H.transpose()),
                                                                       Eigen::EigenvaluesOnly)
                           .eigenvalues()
                           .minCoeff();
    if (lam < res.worst) {
      res.worst = lam;
      res.x = x;
    }
  }
  res.pass = res.worst >= -1e-9;
  return res;
}

HebFit heb_fit(const ProblemInstance& problem, const SamplingDomain& domain) {
  domain.validate();
  require(problem.reference.has_value() && problem.f_star.has_value(), "heb_fit requires a reference set and f_star");
  require(domain.dimension() == problem.dimension, "heb_fit: domain dimension differs from the problem");
  const double radius = domain.radius();
  PairSampler sampler(domain);
  std::vector<double> ld, lg, dist, gap;
  for (std::size_t i = 0; i < domain.pair_count; ++i) {
    Point x(sampler.point());
    const double d = distance_to_reference(x, *problem.reference);
    const double g = problem.value(x) - *problem.f_star;
    if (!(d >= 1e-6 && d <= radius) || !(g > 1e-14)) continue;
    dist.push_back(d);
    gap.push_back(g);
    ld.push_back(std::log(d));
    lg.push_back(std::log(g));
  }
  std::ostringstream os;
  os << "heb_fit: only " << dist.size() << " usable samples (need 10)";
  require(dist.size() >= 10, os.str());

  const double n = static_cast<double>(ld.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    mx += ld[i];
    my += lg[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) {
    sxx += (ld[i] - mx) * (ld[i] - mx);
    sxy += (ld[i] - mx) * (lg[i] - my);
  }
  require(sxx > 0.0, "heb_fit: sampled distances do not vary");
  const double slope = sxy / sxx;
  require(slope > 0.0, "heb_fit: f - f* does not grow with distance on the sample");
  HebFit fit;
  fit.delta_hat = std::min(1.0, 1.0 / slope);
  const double intercept = my - slope * mx;
  double ss = 0.0;
  for (std::size_t i = 0; i < ld.size(); ++i) ss += std::pow(lg[i] - intercept - slope * ld[i], 2);
  fit.residual = std::sqrt(ss / n);
  fit.mu_hat = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dist.size(); ++i)
    fit.mu_hat = std::min(fit.mu_hat, gap[i] / std::pow(dist[i], 1.0 / fit.delta_hat));
  fit.dist_min = *std::min_element(dist.begin(), dist.end());
  fit.dist_max = *std::max_element(dist.begin(), dist.end());
  fit.samples = dist.size();
  return fit;
}

ParaOracle combine(CombineMode mode, const std::vector<ParaOracle>& parts, const CombineOptions& options) {
  require(!parts.empty(), "combine: no oracles given");
  for (const auto& p : parts) {
    require(static_cast<bool>(p.value) && static_cast<bool>(p.subgradient), "combine: oracle missing");
    check_nu(p.nu);
    require(p.rho >= 0.0, "combine: rho must be nonnegative");
  }
  auto same_nu = [&] {
    for (const auto& p : parts)
      if (p.nu != parts.front().nu) fail(ErrorCode::kInvalidArgument, "combine: mismatched nu; downgrade first");
  };

  ParaOracle out;
  out.nu = parts.front().nu;
  switch (mode) {
    case CombineMode::Sum: {
      same_nu();
      for (const auto& p : parts) out.rho += p.rho;
      out.value = [parts](const Point& x) {
        double s = 0.0;
        for (const auto& p : parts) s += p.value(x);
        return s;
      };
      out.subgradient = [parts](const Point& x) {
        Vector g(x.size(), 0.0);
        for (const auto& p : parts) {
          const auto s = p.subgradient(x);
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += s.vector[i];
        }
        return SubgradientSample::from(std::move(g));
      };
      break;
    }
    case CombineMode::Scale: {
      require(parts.size() == 1, "combine: scale takes exactly one oracle");
      const double c = options.factor;
      require(std::isfinite(c) && c > 0.0, "combine: scale factor must be positive");
      const ParaOracle p = parts.front();
      out.rho = c * p.rho;
      out.value = [p, c](const Point& x) { return c * p.value(x); };
      out.subgradient = [p, c](const Point& x) {
        Vector g = p.subgradient(x).vector;
        for (double& v : g) v *= c;
        return SubgradientSample::from(std::move(g));
      };
      break;
    }
    case CombineMode::Sup: {
      same_nu();
      for (const auto& p : parts) out.rho = std::max(out.rho, p.rho);
      auto active = [parts](const Point& x) {
        std::size_t best = 0;
        double v = parts[0].value(x);
        for (std::size_t i = 1; i < parts.size(); ++i) {
          const double vi = parts[i].value(x);
          if (vi > v) {
            v = vi;
            best = i;
          }
        }
        return std::make_pair(best, v);
      };
      out.value = [active](const Point& x) { return active(x).second; };
      out.subgradient = [active, parts](const Point& x) { return parts[active(x).first].subgradient(x); };
      break;
    }
    case CombineMode::Downgrade: {
      require(parts.size() == 1, "combine: downgrade takes exactly one oracle");
      const ParaOracle p = parts.front();
      require(options.theta > 0.0 && options.theta <= p.nu, "combine: downgrade needs 0 < theta <= nu");
      require(std::isfinite(options.K) && options.K > 0.0, "combine: downgrade needs K > 0");
      out = p;
      out.nu = options.theta;
      out.rho = p.rho * std::pow(options.K, p.nu - options.theta);
      break;
    }
  }
  return out;
}

double composite_rho(double L0, double L1, double nu) {
  require(L0 > 0.0 && L1 > 0.0 && std::isfinite(L0) && std::isfinite(L1), "composite_rho: L0 and L1 must be positive");
  check_nu(nu);
  return 2.0 * L0 * L1 / (nu + 1.0);
}

std::vector<Point> stationary_points(const ProblemInstance& problem, const SamplingDomain& domain,
                                     std::size_t grid_per_axis) {
  domain.validate();
  require(static_cast<bool>(problem.hessian), "stationary_points: problem has no Hessian oracle");
  require(grid_per_axis >= 2, "stationary_points: need at least 2 grid points per axis");
  const std::size_t n = problem.dimension;
  require(domain.dimension() == n, "stationary_points: domain dimension differs from the problem");

  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= grid_per_axis;

  std::vector<Point> found;
  for (std::size_t idx = 0; idx < total; ++idx) {
    Eigen::VectorXd x(n);
    std::size_t rem = idx;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(rem % grid_per_axis) / static_cast<double>(grid_per_axis - 1);
      rem /= grid_per_axis;
      x[i] = domain.lo[i] + t * (domain.hi[i] - domain.lo[i]);
    }
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
      Point p(Vector(x.data(), x.data() + n));
      const SubgradientSample g = problem.subgradient(p);
      if (g.norm <= 1e-13) {
        converged = true;
        break;
      }
      const Vector h = problem.hessian(p);
      Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> H(h.data(), n, n);
      Eigen::FullPivLU<Eigen::MatrixXd> lu{Eigen::MatrixXd(H)};
      if (!lu.isInvertible()) break;
      const Eigen::VectorXd step = lu.solve(Eigen::Map<const Eigen::VectorXd>(g.vector.data(), n));
      x -= step;
      if (!x.allFinite()) break;
      if (step.norm() <= 1e-15 * std::max(1.0, x.norm())) {
        converged = problem.subgradient(Point(Vector(x.data(), x.data() + n))).norm <= 1e-10;
        break;
      }
    }
    if (!converged) continue;
    Vector v(x.data(), x.data() + n);
    const bool seen = std::any_of(found.begin(), found.end(), [&](const Point& q) { return distance(q.span(), v) <= 1e-6; });
    if (!seen) found.emplace_back(std::move(v));
  }
  std::sort(found.begin(), found.end(),
            [](const Point& a, const Point& b) { return a.values() < b.values(); });
  return found;
}

}  // namespace psgm
