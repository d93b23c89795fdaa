#pragma once

// Sampling-based checks of nu-paraconvexity and of the Hoelderian error bound.
// Every estimate is a lower bound on the true constant over the sampled
// domain. A clean result means "no violation found", never a proof.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "core.hpp"

namespace psgm {

struct SamplingDomain {
  Vector lo;
  Vector hi;
  std::size_t pair_count = 2000;
  std::uint64_t seed = 0;

  /// The box [lo, hi]^n.
  static SamplingDomain cube(std::size_t n, double lo, double hi, std::size_t pair_count = 2000,
                             std::uint64_t seed = 0);
  void validate() const;
  std::size_t dimension() const noexcept { return lo.size(); }
  /// Half the length of the box diagonal.
  double radius() const;
};

enum class RhoMethod { Midpoint, Subgradient };
const char* to_string(RhoMethod m);

struct SamplePair {
  Vector x;
  Vector y;
  double lambda = 0.5;
};

struct ParaEstimate {
  double rho_hat = 0.0;
  SamplePair worst_pair;
  RhoMethod method = RhoMethod::Midpoint;
  /// Index of the pair that attained rho_hat (lowest index on ties).
  std::size_t worst_index = 0;
};

/// max over pairs of 2 [h((x+y)/2) - h(x)/2 - h(y)/2] / |x-y|^(1+nu), clamped at 0.
ParaEstimate midpoint_rho(const ValueOracle& h, const SamplingDomain& domain, double nu);

/// max over pairs of [h(x) + <zeta(x), y-x> - h(y)] / |y-x|^(1+nu), clamped at 0.
ParaEstimate subgradient_rho(const ValueOracle& h, const SubgradientOracle& dh,
                             const SamplingDomain& domain, double nu);

struct CriterionResult {
  bool pass = true;
  /// For paramonotonicity the largest violation found (<= 0 when none);
  /// for the Hessian test the smallest eigenvalue seen.
  double worst = 0.0;
  Vector x;
  Vector y;
  std::size_t skipped = 0;
};

/// <eta - zeta, y - x> >= -C |x-y|^(1+nu) at every sampled pair, within 1e-9.
CriterionResult paramonotone_check(const SubgradientOracle& dh, const SamplingDomain& domain,
                                   double nu, double C);

/// Smallest eigenvalue of
///   hess h(x) + rho (1+nu) / |x|^(3-nu) (|x|^2 I - (1-nu) x x^T)
/// at pair_count sampled points; passes when it is >= -1e-9 everywhere.
/// Points within 1e-8 of the origin are skipped and counted.
CriterionResult hessian_criterion(const HessianOracle& hess, const SamplingDomain& domain, double nu,
                                  double rho);

struct HebFit {
  double mu_hat = 0.0;
  double delta_hat = 1.0;
  /// Root-mean-square residual of the log-log regression.
  double residual = 0.0;
  double dist_min = 0.0;
  double dist_max = 0.0;
  std::size_t samples = 0;
};

/// Fits mu dist^(1/delta) <= f - f*. delta comes from the log-log slope and
/// mu is the smallest ratio on the sample, so the fitted bound holds there.
HebFit heb_fit(const ProblemInstance& problem, const SamplingDomain& domain);

/// An oracle pair together with its paraconvexity constants.
struct ParaOracle {
  ValueOracle value;
  SubgradientOracle subgradient;
  double nu = 1.0;
  double rho = 0.0;
};

enum class CombineMode { Sum, Scale, Sup, Downgrade };

struct CombineOptions {
  /// Scale: the positive multiplier.
  double factor = 1.0;
  /// Downgrade: the new exponent theta <= nu and the diameter bound K of S.
  double theta = 1.0;
  double K = 1.0;
};

/// Sum: constants add. Scale: rho times the factor. Sup: max of the
/// constants, subgradient from the maximizing branch (lowest index on ties).
/// Downgrade: nu -> theta with rho K^(nu - theta).
ParaOracle combine(CombineMode mode, const std::vector<ParaOracle>& parts,
                   const CombineOptions& options = {});

/// Constant of a composite g(F(x)) with g L0-Lipschitz and F' L1-Hoelder.
double composite_rho(double L0, double L1, double nu);

/// Stationary points found by Newton's method started from a regular grid
/// (grid_per_axis points per coordinate), deduplicated within 1e-6.
std::vector<Point> stationary_points(const ProblemInstance& problem, const SamplingDomain& domain,
                                     std::size_t grid_per_axis = 11);

}  // namespace psgm
