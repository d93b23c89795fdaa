#include "schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "error.hpp"

namespace psgm {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

// std::pow already follows extended-real conventions for inf/0 bases and
// saturates to +inf on overflow; this only guards the 0^0 and inf^0 cases.
double xpow(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  return std::pow(base, exponent);
}

// mu / (2 rho), +inf in the convex limit.
double half_ratio(const TheoryConstants& t) {
  return t.rho() == 0.0 ? kInf : t.mu() / (2.0 * t.rho());
}

// 2 rho / mu, 0 in the convex limit.
double inv_half_ratio(const TheoryConstants& t) { return 2.0 * t.rho() / t.mu(); }

void require_hypothesis(bool ok, const std::string& what) {
  require(ok, what, ErrorCode::kHypothesis);
}

void require_in_tube(double gamma, double dist0, const TheoryConstants& theory) {
  require(std::isfinite(dist0) && dist0 >= 0.0, "initial distance must be finite and nonnegative");
  const double radius = tube_radius(gamma, theory);
  std::ostringstream os;
  os << "initial point must lie in the tube T_" << gamma << " (dist0=" << dist0
     << ", radius=" << radius << ")";
  require_hypothesis(dist0 < radius, os.str());
}

}  // namespace

StepSizeRule StepSizeRule::constant(double alpha) {
  require(finite_positive(alpha), "constant rule: alpha must be positive");
  return StepSizeRule(ConstantStep{alpha});
}

StepSizeRule StepSizeRule::diminishing(double lambda, double beta, double r) {
  require(finite_positive(lambda), "diminishing rule: lambda must be positive");
  require(finite_positive(beta), "diminishing rule: beta must be positive");
  require(finite_positive(r), "diminishing rule: r must be positive");
  return StepSizeRule(DiminishingStep{lambda, beta, r});
}

StepSizeRule StepSizeRule::square_summable(double lambda) {
  require(finite_positive(lambda), "square-summable rule: lambda must be positive");
  return StepSizeRule(SquareSummableStep{lambda});
}

StepSizeRule StepSizeRule::geometric(double lambda, double q) {
  require(finite_positive(lambda), "geometric rule: lambda must be positive");
  require(std::isfinite(q) && q > 0.0 && q < 1.0, "geometric rule: q must lie in (0,1)");
  return StepSizeRule(GeometricStep{lambda, q});
}

StepSizeRule StepSizeRule::polyak(std::optional<double> f_target) {
  require(!f_target || std::isfinite(*f_target), "polyak rule: f_target must be finite");
  return StepSizeRule(PolyakStep{f_target});
}

StepSizeRule StepSizeRule::scaled_polyak(double sigma, std::optional<double> f_target) {
  require(std::isfinite(sigma) && sigma > 0.5, "scaled polyak rule: sigma must exceed 1/2");
  require(!f_target || std::isfinite(*f_target), "scaled polyak rule: f_target must be finite");
  return StepSizeRule(ScaledPolyakStep{f_target, sigma});
}

std::string StepSizeRule::name() const {
  return std::visit(Overloaded{
                        [](const ConstantStep&) { return std::string("constant"); },
                        [](const DiminishingStep&) { return std::string("diminishing"); },
                        [](const SquareSummableStep&) { return std::string("square_summable"); },
                        [](const GeometricStep&) { return std::string("geometric"); },
                        [](const PolyakStep&) { return std::string("polyak"); },
                        [](const ScaledPolyakStep&) { return std::string("scaled_polyak"); },
                    },
                    rule_);
}

bool StepSizeRule::is_polyak_type() const noexcept {
  return std::holds_alternative<PolyakStep>(rule_) ||
         std::holds_alternative<ScaledPolyakStep>(rule_);
}

std::optional<double> StepSizeRule::target() const {
  if (auto* p = std::get_if<PolyakStep>(&rule_)) return p->f_target;
  if (auto* p = std::get_if<ScaledPolyakStep>(&rule_)) return p->f_target;
  return std::nullopt;
}

StepSizeRule StepSizeRule::with_target(double f_star) const {
  if (auto* p = std::get_if<PolyakStep>(&rule_); p && !p->f_target)
    return polyak(f_star);
  if (auto* p = std::get_if<ScaledPolyakStep>(&rule_); p && !p->f_target)
    return scaled_polyak(p->sigma, f_star);
  return *this;
}

double step_size(const StepSizeRule& rule, std::size_t k, double f_x, double grad_norm) {
  const double kd = static_cast<double>(k);
  auto polyak_step = [&](std::optional<double> target, double sigma) {
    require(target.has_value(), "polyak-type rule has no target value");
    if (!(grad_norm > 0.0)) fail(ErrorCode::kStationary, "stationary");
    return std::max(0.0, f_x - *target) / (sigma * grad_norm);
  };
  return std::visit(
      Overloaded{
          [](const ConstantStep& s) { return s.alpha; },
          [&](const DiminishingStep& s) { return s.lambda * std::pow(kd + s.beta, -s.r); },
          [&](const SquareSummableStep& s) { return s.lambda / (kd + 1.0); },
          [&](const GeometricStep& s) { return s.lambda * std::pow(s.q, kd); },
          [&](const PolyakStep& s) { return polyak_step(s.f_target, 1.0); },
          [&](const ScaledPolyakStep& s) { return polyak_step(s.f_target, s.sigma); },
      },
      rule.variant());
}

double tube_radius(double gamma, const TheoryConstants& theory) {
  require(std::isfinite(gamma) && gamma > 0.0 && gamma <= 1.0, "tube radius: gamma must lie in (0,1]");
  if (theory.rho() == 0.0) return kInf;
  const double exponent = theory.delta() / theory.growth_gap();
  return xpow(gamma * theory.mu() / theory.rho(), exponent);
}

TauX tau_x(const TheoryConstants& theory, double dist) {
  require(std::isfinite(dist) && dist >= 0.0, "tau_x: distance must be finite and nonnegative");
  const double exponent = 1.0 / theory.delta() - 1.0;
  double value = theory.tau() * xpow(dist, exponent);
  if (value > 1.0 && value <= 1.0 + 1e-9) value = 1.0;
  return TauX{value, !(dist < tube_radius(1.0, theory))};
}

double admissible_step_bound(const TheoryConstants& theory) {
  const double tail = std::min(1.0, theory.tau()) * xpow(half_ratio(theory), 1.0 / theory.growth_gap());
  return std::min(1.0, tail);
}

ConstantCert constant_certificate(double alpha, const TheoryConstants& theory, double D0) {
  require(finite_positive(alpha), "constant certificate: alpha must be positive");
  require(std::isfinite(D0) && D0 >= 0.0, "constant certificate: D0 must be nonnegative");
  const double delta = theory.delta();
  const double tau = theory.tau();
  const double gap = theory.growth_gap();
  const double B = half_ratio(theory);

  const double a1 = (2.0 * delta / tau) * xpow(B, (2.0 * delta - 1.0) / gap);
  const double a2 = tau / xpow(xpow(tau, 2.0 * delta) + 1.0, 1.0 / (2.0 * delta)) * xpow(B, 1.0 / gap);
  ConstantCert cert{};
  cert.alpha_max = std::min({a1, a2, 1.0});
  if (!(alpha < cert.alpha_max)) {
    std::ostringstream os;
    os << "step too large for the constant-step envelope (alpha=" << alpha
       << ", alpha_max=" << cert.alpha_max << ")";
    fail(ErrorCode::kHypothesis, os.str());
  }
  require_in_tube(0.5, std::sqrt(D0), theory);

  cert.D_star = xpow(alpha / tau, 2.0 * delta);
  const double script_D2 = std::max(D0, alpha * alpha + cert.D_star);
  cert.script_D = std::sqrt(script_D2);
  if (theory.rho() > 0.0) {
    cert.q = 1.0 - (alpha * tau / (2.0 * delta)) * xpow(inv_half_ratio(theory), (2.0 * delta - 1.0) / gap);
  } else {
    // Convex limit: bound D_k by script_D^2 directly instead of by the (infinite) tube.
    cert.q = 1.0 - alpha * tau / (2.0 * delta * xpow(script_D2, (2.0 * delta - 1.0) / (2.0 * delta)));
  }
  require_hypothesis(cert.q > 0.0 && cert.q < 1.0, "constant certificate: contraction factor q outside (0,1)");
  return cert;
}

CssCert css_gap_bound(double alpha, const TheoryConstants& theory, std::optional<double> dist1) {
  require(finite_positive(alpha), "gap bound: alpha must be positive");
  const double bound = admissible_step_bound(theory);
  if (!(alpha < bound)) {
    std::ostringstream os;
    os << "gap bound requires 0 < alpha < " << bound << " (alpha=" << alpha << ")";
    fail(ErrorCode::kHypothesis, os.str());
  }
  CssCert cert{};
  cert.gap_bound = 2.0 * theory.L() * alpha;
  const double diameter2 = xpow(half_ratio(theory), 2.0 * theory.delta() / theory.growth_gap());
  cert.k_min = std::ceil(diameter2 / (alpha * alpha));
  if (dist1) {
    require(std::isfinite(*dist1) && *dist1 >= 0.0, "gap bound: dist1 must be nonnegative");
    require_in_tube(0.5, *dist1, theory);
    cert.k_min_from_dist1 = std::ceil((*dist1) * (*dist1) / (alpha * alpha));
  }
  return cert;
}

DiminishingCert diminishing_certificate(double lambda, double r, const TheoryConstants& theory) {
  require(finite_positive(lambda), "diminishing certificate: lambda must be positive");
  require_hypothesis(r > 0.0 && r < 1.0, "diminishing certificate requires r in (0,1)");
  const double delta = theory.delta();
  const double tau = theory.tau();
  const double damp = 1.0 - 2.0 * r * (1.0 - delta);
  require_hypothesis(damp > 0.0, "diminishing certificate requires 1 - 2r(1-delta) > 0");

  DiminishingCert cert{};
  cert.A = xpow(2.0, r * delta) * std::sqrt(xpow(2.0 * lambda / tau, 2.0 * delta) + lambda * lambda);
  const double t1 = xpow(4.0 * r * delta * xpow(cert.A, (2.0 * delta - 1.0) / delta) / (lambda * tau), 1.0 / damp);
  const double t2 = xpow(cert.A, 1.0 / (delta * r)) *
                    xpow(inv_half_ratio(theory), 1.0 / (r * theory.growth_gap()));
  cert.beta_min = std::max(t1, t2);
  return cert;
}

DecayCert decay_certificate(const TheoryConstants& theory) {
  const double delta = theory.delta();
  require_hypothesis(delta < 1.0, "decay certificate requires 1/(1+nu) < delta < 1");
  const double tau = theory.tau();
  DecayCert cert{};
  cert.r = 1.0 / (2.0 * (1.0 - delta));
  cert.A = xpow(8.0 * delta * cert.r / (tau * tau), delta * cert.r);
  cert.lambda = 0.5 * tau * xpow(cert.A, 1.0 / delta);
  const double t2 = xpow(cert.A, 1.0 / (delta * cert.r)) *
                    xpow(inv_half_ratio(theory), 2.0 * (1.0 - delta) / theory.growth_gap());
  cert.beta_min = std::max(4.0 * delta * cert.r, t2);
  return cert;
}

GeometricCert geometric_certificate(double lambda, const TheoryConstants& theory, double gamma,
                                    double dist0) {
  require(finite_positive(lambda), "geometric certificate: lambda must be positive");
  require_hypothesis(theory.delta() == 1.0, "geometric certificate requires delta = 1");
  const double tau = theory.tau();
  require_hypothesis(tau != 1.0, "geometric certificate requires tau != 1");

  GeometricCert cert{};
  cert.gamma_lo = std::max((5.0 * tau * tau - 4.0) / (2.0 * tau * tau), 0.0);
  cert.gamma_hi = 0.5;
  if (!(gamma > cert.gamma_lo && gamma < cert.gamma_hi)) {
    std::ostringstream os;
    os << "geometric certificate requires gamma in (" << cert.gamma_lo << ", 0.5), got " << gamma;
    fail(ErrorCode::kHypothesis, os.str());
  }
  const double lambda_max = 0.5 * tau * xpow(half_ratio(theory), 1.0 / theory.nu());
  require_hypothesis(lambda < lambda_max, "geometric certificate requires lambda < (tau/2)(mu/2rho)^(1/nu)");
  require_in_tube(0.5, dist0, theory);

  cert.q = std::sqrt(1.0 - (1.0 - 2.0 * gamma) * tau * tau / 4.0);
  cert.A = std::max(2.0 * lambda / tau, dist0);
  const double disc = std::max(0.0, tau * tau - 4.0 * (1.0 - cert.q * cert.q));
  cert.dist0_max = 2.0 * lambda / (tau - std::sqrt(disc));
  if (!(dist0 <= cert.dist0_max)) {
    std::ostringstream os;
    os << "geometric certificate requires dist0 <= " << cert.dist0_max << " (dist0=" << dist0 << ")";
    fail(ErrorCode::kHypothesis, os.str());
  }
  return cert;
}

ScaledPolyakCert scaled_polyak_certificate(double sigma, const TheoryConstants& theory, double gamma) {
  require_hypothesis(sigma > 0.5, "scaled polyak certificate requires sigma > 1/2");
  ScaledPolyakCert cert{};
  cert.gamma_max = (2.0 * sigma - 1.0) / (2.0 * sigma);
  if (!(gamma > 0.0 && gamma < cert.gamma_max)) {
    std::ostringstream os;
    os << "scaled polyak certificate requires 0 < gamma < " << cert.gamma_max << ", got " << gamma;
    fail(ErrorCode::kHypothesis, os.str());
  }
  require_hypothesis(theory.delta() == 1.0, "scaled polyak Q-linear rate requires delta = 1");
  const double tau = theory.tau();
  const double inner = 1.0 - (2.0 * sigma * (1.0 - gamma) - 1.0) * tau * tau / (sigma * sigma);
  require_hypothesis(inner > 0.0 && inner < 1.0, "scaled polyak certificate: rate outside (0,1)");
  cert.rate = std::sqrt(inner);
  return cert;
}

RateCertificate rate_certificate(const StepSizeRule& rule, const TheoryConstants& theory,
                                 double gamma, double dist0) {
  return std::visit(
      Overloaded{
          [&](const ConstantStep& s) -> RateCertificate {
            return constant_certificate(s.alpha, theory, dist0 * dist0);
          },
          [&](const DiminishingStep& s) -> RateCertificate {
            require_in_tube(0.5, dist0, theory);
            if (s.r < 1.0) {
              DiminishingCert cert = diminishing_certificate(s.lambda, s.r, theory);
              std::ostringstream os;
              os << "diminishing certificate requires beta >= " << cert.beta_min << " (beta=" << s.beta << ")";
              require_hypothesis(s.beta >= cert.beta_min, os.str());
              const double cap = std::min(xpow(2.0 * s.lambda / theory.tau(), theory.delta()),
                                          cert.A * xpow(s.beta, -theory.delta() * s.r));
              require_hypothesis(dist0 <= cap, "diminishing certificate requires dist0 <= min{(2lambda/tau)^delta, A beta^(-delta r)}");
              return cert;
            }
            DecayCert cert = decay_certificate(theory);
            require_hypothesis(std::abs(s.r - cert.r) <= 1e-12 * cert.r,
                               "decay certificate requires r = 1/(2(1-delta))");
            require_hypothesis(std::abs(s.lambda - cert.lambda) <= 1e-9 * cert.lambda,
                               "decay certificate requires lambda = (tau/2) A^(1/delta)");
            std::ostringstream os;
            os << "decay certificate requires beta >= " << cert.beta_min << " (beta=" << s.beta << ")";
            require_hypothesis(s.beta >= cert.beta_min, os.str());
            require_hypothesis(dist0 <= cert.A * xpow(s.beta, -theory.delta() * cert.r),
                               "decay certificate requires dist0 <= A beta^(-delta r)");
            return cert;
          },
          [&](const SquareSummableStep&) -> RateCertificate {
            fail(ErrorCode::kUnsupported,
                 "square-summable rule has a convergence guarantee but no rate certificate");
          },
          [&](const GeometricStep& s) -> RateCertificate {
            GeometricCert cert = geometric_certificate(s.lambda, theory, gamma, dist0);
            require_hypothesis(std::abs(s.q - cert.q) <= 1e-12,
                               "geometric certificate requires q = sqrt(1-(1-2gamma)tau^2/4)");
            return cert;
          },
          [&](const PolyakStep&) -> RateCertificate {
            ScaledPolyakCert cert = scaled_polyak_certificate(1.0, theory, gamma);
            require_in_tube(gamma, dist0, theory);
            return cert;
          },
          [&](const ScaledPolyakStep& s) -> RateCertificate {
            ScaledPolyakCert cert = scaled_polyak_certificate(s.sigma, theory, gamma);
            require_in_tube(gamma, dist0, theory);
            return cert;
          },
      },
      rule.variant());
}

std::string describe(const RateCertificate& cert) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const ConstantCert& c) {
                   os << "certificate=constant\nD_star=" << c.D_star << "\nq=" << c.q
                      << "\nscript_D=" << c.script_D << "\nalpha_max=" << c.alpha_max << "\n";
                 },
                 [&](const DiminishingCert& c) {
                   os << "certificate=diminishing\nA=" << c.A << "\nbeta_min=" << c.beta_min << "\n";
                 },
                 [&](const DecayCert& c) {
                   os << "certificate=decay\nr=" << c.r << "\nA=" << c.A << "\nlambda=" << c.lambda
                      << "\nbeta_min=" << c.beta_min << "\n";
                 },
                 [&](const GeometricCert& c) {
                   os << "certificate=geometric\nq=" << c.q << "\nA=" << c.A << "\ngamma_lo=" << c.gamma_lo
                      << "\ngamma_hi=" << c.gamma_hi << "\ndist0_max=" << c.dist0_max << "\n";
                 },
                 [&](const ScaledPolyakCert& c) {
                   os << "certificate=scaled_polyak\nrate=" << c.rate << "\ngamma_max=" << c.gamma_max << "\n";
                 },
                 [&](const CssCert& c) {
                   os << "certificate=gap_bound\ngap_bound=" << c.gap_bound << "\nk_min=" << c.k_min << "\n";
                   if (c.k_min_from_dist1) os << "k_min_from_dist1=" << *c.k_min_from_dist1 << "\n";
                 },
             },
             cert);
  return os.str();
}

}  // namespace psgm
