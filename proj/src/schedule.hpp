#pragma once

// Step-size rules and the closed-form rate certificates that go with them.
//
// Certificate arithmetic is done in extended reals: rho = 0 is the convex
// limit, where every (mu / 2 rho)-powered bound is +infinity.

#include <cstddef>
#include <optional>
#include <string>
#include <variant>

#include "core.hpp"

namespace psgm {

struct ConstantStep { double alpha; };
/// alpha_k = lambda (k + beta)^(-r)
struct DiminishingStep { double lambda; double beta; double r; };
/// alpha_k = lambda / (k + 1)
struct SquareSummableStep { double lambda; };
/// alpha_k = lambda q^k
struct GeometricStep { double lambda; double q; };
/// alpha_k = (f(x_k) - f_target) / ||zeta_k||; target unset means "use the problem's f*".
struct PolyakStep { std::optional<double> f_target; };
/// alpha_k = (f(x_k) - f_target) / (sigma ||zeta_k||)
struct ScaledPolyakStep { std::optional<double> f_target; double sigma; };

class StepSizeRule {
 public:
  using Variant = std::variant<ConstantStep, DiminishingStep, SquareSummableStep,
                               GeometricStep, PolyakStep, ScaledPolyakStep>;

  static StepSizeRule constant(double alpha);
  static StepSizeRule diminishing(double lambda, double beta, double r);
  static StepSizeRule square_summable(double lambda);
  static StepSizeRule geometric(double lambda, double q);
  static StepSizeRule polyak(std::optional<double> f_target = std::nullopt);
  static StepSizeRule scaled_polyak(double sigma, std::optional<double> f_target = std::nullopt);

  const Variant& variant() const noexcept { return rule_; }
  std::string name() const;
  bool is_polyak_type() const noexcept;
  /// The rule with an unset Polyak target replaced by f_star.
  StepSizeRule with_target(double f_star) const;
  std::optional<double> target() const;

 private:
  explicit StepSizeRule(Variant v) : rule_(std::move(v)) {}
  Variant rule_;
};

double step_size(const StepSizeRule& rule, std::size_t k, double f_x, double grad_norm);

/// (gamma mu / rho)^(delta / (delta (1+nu) - 1)); +infinity when rho = 0.
double tube_radius(double gamma, const TheoryConstants& theory);

/// tau dist^(1/delta - 1). The caller is warned (via the flag) when dist is
/// outside the saddle-exclusion radius.
struct TauX {
  double value;
  bool outside_tube;
};
TauX tau_x(const TheoryConstants& theory, double dist);

/// Largest admissible step for the constant/diminishing convergence results:
/// min{1, min{1,tau} (mu/2rho)^(1/(delta(1+nu)-1))}.
double admissible_step_bound(const TheoryConstants& theory);

struct ConstantCert {
  double D_star;
  double q;
  double script_D;
  double alpha_max;
};

struct DiminishingCert {
  double A;
  double beta_min;
};

struct DecayCert {
  double r;
  double A;
  double lambda;
  double beta_min;
};

struct GeometricCert {
  double q;
  double A;
  double gamma_lo;
  double gamma_hi;
  double dist0_max;
};

struct ScaledPolyakCert {
  double rate;
  double gamma_max;
};

struct CssCert {
  double gap_bound;
  /// Iteration after which the gap bound holds, from the tube diameter.
  double k_min;
  /// Same bound computed from the actual dist(x_1; X*) when supplied.
  std::optional<double> k_min_from_dist1;
};

using RateCertificate =
    std::variant<ConstantCert, DiminishingCert, DecayCert, GeometricCert, ScaledPolyakCert, CssCert>;

ConstantCert constant_certificate(double alpha, const TheoryConstants& theory, double D0);
CssCert css_gap_bound(double alpha, const TheoryConstants& theory,
                      std::optional<double> dist1 = std::nullopt);
DiminishingCert diminishing_certificate(double lambda, double r, const TheoryConstants& theory);
DecayCert decay_certificate(const TheoryConstants& theory);
GeometricCert geometric_certificate(double lambda, const TheoryConstants& theory, double gamma,
                                    double dist0);
ScaledPolyakCert scaled_polyak_certificate(double sigma, const TheoryConstants& theory,
                                           double gamma);

/// Dispatches on the rule and validates the run parameters (beta, q, dist0)
/// against the hypotheses of the matching convergence result.
RateCertificate rate_certificate(const StepSizeRule& rule, const TheoryConstants& theory,
                                 double gamma, double dist0);

std::string describe(const RateCertificate& cert);

}  // namespace psgm
