#include "psgm/psgm.h"

#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "config.hpp"
#include "error.hpp"
#include "execute.hpp"
#include "io.hpp"
#include "metrics.hpp"
#include "paracheck.hpp"
#include "problems.hpp"
#include "schedule.hpp"
#include "solver.hpp"

struct psgm_problem {
  psgm::ProblemInstance instance;
  std::optional<psgm::RobustFactorizationInstance> factorization;
};

struct psgm_history {
  psgm::RunHistory history;
};

struct psgm_matrix {
  psgm::Matrix matrix;
};

struct psgm_ratings {
  psgm::RatingsData data;
};

struct psgm_config {
  psgm::RunConfig config;
};

namespace {

thread_local std::string g_last_error;

psgm_status record(psgm_status s, const char* what) {
  g_last_error = what;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <typename F>
psgm_status guarded(F&& fn) {
  try {
    fn();
    return PSGM_OK;
  } catch (const psgm::Error& e) {
    return record(static_cast<psgm_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return record(PSGM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return record(PSGM_INTERNAL, e.what());
  } catch (...) {
    return record(PSGM_INTERNAL, "unknown error");
  }
}

void need(const void* p, const char* name) {
  psgm::require(p != nullptr, std::string(name) + " must not be NULL");
}

psgm::Point point_from(const psgm_problem* p, const double* x, size_t n) {
  need(p, "problem");
  need(x, "x");
  psgm::require(n == p->instance.dimension, "dimension mismatch");
  return psgm::Point(psgm::Vector(x, x + n));
}

psgm::StepSizeRule to_rule(const psgm_rule* r) {
  need(r, "rule");
  const std::optional<double> target = r->has_target ? std::optional<double>(r->f_target) : std::nullopt;
  switch (r->kind) {
    case PSGM_RULE_CONSTANT: return psgm::StepSizeRule::constant(r->alpha);
    case PSGM_RULE_DIMINISHING: return psgm::StepSizeRule::diminishing(r->lambda, r->beta, r->r);
    case PSGM_RULE_SQUARE_SUMMABLE: return psgm::StepSizeRule::square_summable(r->lambda);
    case PSGM_RULE_GEOMETRIC: return psgm::StepSizeRule::geometric(r->lambda, r->q);
    case PSGM_RULE_POLYAK: return psgm::StepSizeRule::polyak(target);
    case PSGM_RULE_SCALED_POLYAK: return psgm::StepSizeRule::scaled_polyak(r->sigma, target);
  }
  psgm::fail(psgm::ErrorCode::kInvalidArgument, "unknown rule kind");
}

psgm::TheoryConstants to_theory(const psgm_theory* t) {
  need(t, "theory");
  return psgm::TheoryConstants(t->nu, t->rho, t->delta, t->mu, t->L);
}

psgm::SamplingDomain to_domain(const psgm_domain* d) {
  need(d, "domain");
  need(d->lo, "domain.lo");
  need(d->hi, "domain.hi");
  psgm::SamplingDomain s{psgm::Vector(d->lo, d->lo + d->dimension), psgm::Vector(d->hi, d->hi + d->dimension),
                         d->pair_count, d->seed};
  s.validate();
  return s;
}

psgm_certificate blank_certificate() {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  psgm_certificate c;
  c.kind = PSGM_CERT_CONSTANT;
  c.D_star = c.q = c.script_D = c.alpha_max = nan;
  c.A = c.beta_min = c.r = c.lambda = nan;
  c.gamma_lo = c.gamma_hi = c.dist0_max = nan;
  c.rate = c.gamma_max = nan;
  c.gap_bound = c.k_min = c.k_min_from_dist1 = nan;
  return c;
}

psgm_certificate to_c(const psgm::RateCertificate& cert) {
  psgm_certificate c = blank_certificate();
  if (auto* v = std::get_if<psgm::ConstantCert>(&cert)) {
    c.kind = PSGM_CERT_CONSTANT;
    c.D_star = v->D_star;
    c.q = v->q;
    c.script_D = v->script_D;
    c.alpha_max = v->alpha_max;
  } else if (auto* v = std::get_if<psgm::DiminishingCert>(&cert)) {
    c.kind = PSGM_CERT_DIMINISHING;
    c.A = v->A;
    c.beta_min = v->beta_min;
  } else if (auto* v = std::get_if<psgm::DecayCert>(&cert)) {
    c.kind = PSGM_CERT_DECAY;
    c.r = v->r;
    c.A = v->A;
    c.lambda = v->lambda;
    c.beta_min = v->beta_min;
  } else if (auto* v = std::get_if<psgm::GeometricCert>(&cert)) {
    c.kind = PSGM_CERT_GEOMETRIC;
    c.q = v->q;
    c.A = v->A;
    c.gamma_lo = v->gamma_lo;
    c.gamma_hi = v->gamma_hi;
    c.dist0_max = v->dist0_max;
  } else if (auto* v = std::get_if<psgm::ScaledPolyakCert>(&cert)) {
    c.kind = PSGM_CERT_SCALED_POLYAK;
    c.rate = v->rate;
    c.gamma_max = v->gamma_max;
  } else if (auto* v = std::get_if<psgm::CssCert>(&cert)) {
    c.kind = PSGM_CERT_GAP_BOUND;
    c.gap_bound = v->gap_bound;
    c.k_min = v->k_min;
    if (v->k_min_from_dist1) c.k_min_from_dist1 = *v->k_min_from_dist1;
  }
  return c;
}

psgm::Matrix flat(const double* v, size_t count, const char* name) {
  need(v, name);
  psgm::Matrix m(1, count);
  std::copy(v, v + count, m.data.begin());
  return m;
}

}  // namespace

extern "C" {

const char* psgm_last_error(void) { return g_last_error.c_str(); }

const char* psgm_status_name(psgm_status status) {
  switch (status) {
    case PSGM_OK: return "ok";
    case PSGM_INVALID_ARGUMENT: return "invalid_argument";
    case PSGM_HYPOTHESIS: return "hypothesis";
    case PSGM_NUMERIC: return "numeric";
    case PSGM_IO: return "io";
    case PSGM_PARSE: return "parse";
    case PSGM_STATIONARY: return "stationary";
    case PSGM_UNSUPPORTED: return "unsupported";
    case PSGM_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* psgm_version(void) { return "1.0.0"; }

psgm_status psgm_problem_builtin(const char* name, size_t dimension, psgm_problem** out) {
  return guarded([&] {
    need(name, "name");
    need(out, "out");
    *out = new psgm_problem{psgm::builtin_instance(name, dimension), std::nullopt};
  });
}

psgm_status psgm_problem_synth_rmc(size_t m, size_t n, size_t rank, double observed_fraction, double outlier_fraction,
                                   double outlier_scale, uint64_t seed, int nonnegative, psgm_problem** out) {
  return guarded([&] {
    need(out, "out");
    auto inst = psgm::synth_rmc(m, n, rank, observed_fraction, outlier_fraction, outlier_scale, seed);
    inst.nonnegative = nonnegative != 0;
    *out = new psgm_problem{psgm::rmc_oracle(inst), std::move(inst)};
  });
}

psgm_status psgm_problem_synth_phase(size_t m, size_t n, uint64_t seed, psgm_problem** out) {
  return guarded([&] {
    need(out, "out");
    *out = new psgm_problem{psgm::phase_oracle(psgm::synth_phase(m, n, seed)), std::nullopt};
  });
}

void psgm_problem_free(psgm_problem* problem) { delete problem; }

size_t psgm_problem_dimension(const psgm_problem* problem) { return problem ? problem->instance.dimension : 0; }

psgm_status psgm_problem_value(const psgm_problem* problem, const double* x, size_t n, double* value) {
  return guarded([&] {
    need(value, "value");
    *value = problem->instance.value(point_from(problem, x, n));
  });
}

psgm_status psgm_problem_subgradient(const psgm_problem* problem, const double* x, size_t n, double* g, double* norm) {
  return guarded([&] {
    need(g, "g");
    const psgm::SubgradientSample s = problem->instance.subgradient(point_from(problem, x, n));
    std::copy(s.vector.begin(), s.vector.end(), g);
    if (norm) *norm = s.norm;
  });
}

psgm_status psgm_problem_distance(const psgm_problem* problem, const double* x, size_t n, double* dist) {
  return guarded([&] {
    need(dist, "dist");
    const psgm::Point p = point_from(problem, x, n);
    psgm::require(problem->instance.has_distance(), "problem has no reference solution");
    *dist = problem->instance.distance(p);
  });
}

psgm_status psgm_problem_f_star(const psgm_problem* problem, int* has_f_star, double* f_star) {
  return guarded([&] {
    need(problem, "problem");
    need(has_f_star, "has_f_star");
    *has_f_star = problem->instance.f_star.has_value() ? 1 : 0;
    if (f_star && problem->instance.f_star) *f_star = *problem->instance.f_star;
  });
}

psgm_status psgm_problem_initial_point(const psgm_problem* problem, psgm_init method, uint64_t seed, double* x,
                                       size_t n) {
  return guarded([&] {
    need(problem, "problem");
    need(x, "x");
    psgm::require(n == problem->instance.dimension, "dimension mismatch");
    psgm::Point p;
    if (problem->factorization) {
      const auto& f = *problem->factorization;
      p = psgm::initialize_factors(f.X, f.M, f.rank,
                                   method == PSGM_INIT_SVD ? psgm::InitMethod::Svd : psgm::InitMethod::Random,
                                   f.nonnegative, seed);
    } else {
      psgm::require(problem->instance.reference.has_value(), "problem has no reference point to start from");
      p = problem->instance.reference->points.front();
    }
    std::copy(p.values().begin(), p.values().end(), x);
  });
}

psgm_status psgm_step_size(const psgm_rule* rule, size_t k, double f_x, double grad_norm, double* alpha) {
  return guarded([&] {
    need(alpha, "alpha");
    *alpha = psgm::step_size(to_rule(rule), k, f_x, grad_norm);
  });
}

psgm_status psgm_tube_radius(const psgm_theory* theory, double gamma, double* radius) {
  return guarded([&] {
    need(radius, "radius");
    psgm::require(gamma > 0.0 && gamma <= 1.0, "gamma must lie in (0,1]");
    *radius = psgm::tube_radius(gamma, to_theory(theory));
  });
}

psgm_status psgm_constant_certificate(double alpha, const psgm_theory* theory, double D0, psgm_certificate* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(psgm::constant_certificate(alpha, to_theory(theory), D0));
  });
}

psgm_status psgm_gap_bound_certificate(double alpha, const psgm_theory* theory, double dist1, psgm_certificate* out) {
  return guarded([&] {
    need(out, "out");
    const std::optional<double> d1 = dist1 >= 0.0 ? std::optional<double>(dist1) : std::nullopt;
    *out = to_c(psgm::css_gap_bound(alpha, to_theory(theory), d1));
  });
}

psgm_status psgm_rate_certificate(const psgm_rule* rule, const psgm_theory* theory, double gamma, double dist0,
                                  psgm_certificate* out) {
  return guarded([&] {
    need(out, "out");
    *out = to_c(psgm::rate_certificate(to_rule(rule), to_theory(theory), gamma, dist0));
  });
}

void psgm_solver_config_default(psgm_solver_config* config) {
  if (!config) return;
  const psgm::SolverConfig d;
  config->max_iterations = d.max_iterations;
  config->stationary_tolerance = d.stationary_tolerance;
  config->has_target_gap = 0;
  config->target_gap = 0.0;
  config->record_distances = d.record_distances ? 1 : 0;
  config->record_points = d.record_points ? 1 : 0;
  config->seed = d.seed;
}

psgm_status psgm_solve(const psgm_problem* problem, const psgm_rule* rule, const psgm_solver_config* config,
                       const double* x0, size_t n, psgm_history** out) {
  return guarded([&] {
    need(out, "out");
    need(config, "config");
    psgm::SolverConfig sc;
    sc.max_iterations = config->max_iterations;
    sc.stationary_tolerance = config->stationary_tolerance;
    if (config->has_target_gap) sc.target_gap = config->target_gap;
    sc.record_distances = config->record_distances != 0;
    sc.record_points = config->record_points != 0;
    sc.seed = config->seed;
    const psgm::Point start = point_from(problem, x0, n);
    *out = new psgm_history{psgm::run(problem->instance, to_rule(rule), sc, start)};
  });
}

void psgm_history_free(psgm_history* history) { delete history; }

size_t psgm_history_length(const psgm_history* history) { return history ? history->history.records.size() : 0; }

psgm_status psgm_history_record(const psgm_history* history, size_t index, psgm_record* out) {
  return guarded([&] {
    need(history, "history");
    need(out, "out");
    psgm::require(index < history->history.records.size(), "record index out of range");
    const psgm::IterateRecord& r = history->history.records[index];
    *out = psgm_record{r.k, r.f_value, r.f_best, r.alpha, r.grad_norm, r.dist ? 1 : 0,
                       r.dist ? *r.dist : std::numeric_limits<double>::quiet_NaN()};
  });
}

psgm_termination psgm_history_termination(const psgm_history* history) {
  if (!history) return PSGM_TERM_MAX_ITERATIONS;
  switch (history->history.termination) {
    case psgm::Termination::Stationary: return PSGM_TERM_STATIONARY;
    case psgm::Termination::TargetReached: return PSGM_TERM_TARGET_REACHED;
    case psgm::Termination::MaxIterations: break;
  }
  return PSGM_TERM_MAX_ITERATIONS;
}

psgm_status psgm_history_final_point(const psgm_history* history, double* x, size_t n) {
  return guarded([&] {
    need(history, "history");
    need(x, "x");
    const auto& v = history->history.final_point.values();
    psgm::require(n == v.size(), "dimension mismatch");
    std::copy(v.begin(), v.end(), x);
  });
}

psgm_status psgm_audit(const psgm_problem* problem, const psgm_history* history, double tolerance,
                       psgm_audit_summary* out) {
  return guarded([&] {
    need(problem, "problem");
    need(history, "history");
    need(out, "out");
    const psgm::AuditReport a = psgm::audit(history->history, problem->instance, tolerance);
    psgm_audit_summary s{a.pass() ? 1 : 0, a.empirical_L ? 1 : 0, a.L_used, 0.0, 0, a.audited_iterations};
    for (const auto& c : a.checks) {
      if (c.max_violation > s.max_violation) {
        s.max_violation = c.max_violation;
        s.worst_index = c.worst_index;
      }
    }
    *out = s;
  });
}

psgm_status psgm_midpoint_rho(const psgm_problem* problem, const psgm_domain* domain, double nu, double* rho_hat) {
  return guarded([&] {
    need(problem, "problem");
    need(rho_hat, "rho_hat");
    *rho_hat = psgm::midpoint_rho(problem->instance.value, to_domain(domain), nu).rho_hat;
  });
}

psgm_status psgm_subgradient_rho(const psgm_problem* problem, const psgm_domain* domain, double nu, double* rho_hat) {
  return guarded([&] {
    need(problem, "problem");
    need(rho_hat, "rho_hat");
    *rho_hat =
        psgm::subgradient_rho(problem->instance.value, problem->instance.subgradient, to_domain(domain), nu).rho_hat;
  });
}

psgm_status psgm_heb_fit(const psgm_problem* problem, const psgm_domain* domain, double* mu_hat, double* delta_hat) {
  return guarded([&] {
    need(problem, "problem");
    need(mu_hat, "mu_hat");
    need(delta_hat, "delta_hat");
    const psgm::HebFit f = psgm::heb_fit(problem->instance, to_domain(domain));
    *mu_hat = f.mu_hat;
    *delta_hat = f.delta_hat;
  });
}

psgm_status psgm_composite_rho(double L0, double L1, double nu, double* rho) {
  return guarded([&] {
    need(rho, "rho");
    *rho = psgm::composite_rho(L0, L1, nu);
  });
}

psgm_status psgm_rmse(const double* pred, const double* truth, const double* mask, size_t count, double* out) {
  return guarded([&] {
    need(out, "out");
    *out = psgm::rmse(flat(pred, count, "pred"), flat(truth, count, "truth"), flat(mask, count, "mask"));
  });
}

psgm_status psgm_psnr_snr(const double* recon, const double* original, size_t count, double max_value,
                          double* psnr_db, double* snr_db) {
  return guarded([&] {
    need(psnr_db, "psnr_db");
    need(snr_db, "snr_db");
    const psgm::SignalRatios r = psgm::psnr_snr(flat(recon, count, "recon"), flat(original, count, "original"), max_value);
    *psnr_db = r.psnr_db;
    *snr_db = r.snr_db;
  });
}

psgm_status psgm_rate_fit(const double* sequence, size_t length, size_t first_index, double transient_fraction,
                          psgm_rate_fit_result* out) {
  return guarded([&] {
    need(sequence, "sequence");
    need(out, "out");
    const psgm::RateFitResult r =
        psgm::rate_fit(std::vector<double>(sequence, sequence + length), {transient_fraction, first_index});
    out->rate_class = r.rate_class == psgm::RateClass::Finite      ? PSGM_RATE_FINITE
                      : r.rate_class == psgm::RateClass::Geometric ? PSGM_RATE_GEOMETRIC
                                                                   : PSGM_RATE_SUBLINEAR;
    out->rate = r.rate;
    out->exponent = r.exponent;
    out->fit_residual = r.fit_residual;
  });
}

psgm_status psgm_matrix_create(size_t rows, size_t cols, const double* data, psgm_matrix** out) {
  return guarded([&] {
    need(out, "out");
    psgm::Matrix m(rows, cols);
    if (data) std::copy(data, data + rows * cols, m.data.begin());
    *out = new psgm_matrix{std::move(m)};
  });
}

void psgm_matrix_free(psgm_matrix* matrix) { delete matrix; }
size_t psgm_matrix_rows(const psgm_matrix* matrix) { return matrix ? matrix->matrix.rows : 0; }
size_t psgm_matrix_cols(const psgm_matrix* matrix) { return matrix ? matrix->matrix.cols : 0; }
const double* psgm_matrix_data(const psgm_matrix* matrix) { return matrix ? matrix->matrix.data.data() : nullptr; }

psgm_status psgm_csv_read(const char* path, psgm_matrix** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new psgm_matrix{psgm::load_csv_matrix(path)};
  });
}

psgm_status psgm_csv_write(const char* path, const psgm_matrix* matrix) {
  return guarded([&] {
    need(path, "path");
    need(matrix, "matrix");
    psgm::save_csv_matrix(path, matrix->matrix);
  });
}

psgm_status psgm_pgm_read(const char* path, psgm_matrix** out, unsigned* maxval) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    psgm::PgmImage img = psgm::load_pgm(path);
    if (maxval) *maxval = img.maxval;
    *out = new psgm_matrix{std::move(img.pixels)};
  });
}

psgm_status psgm_pgm_write(const char* path, const psgm_matrix* pixels, unsigned maxval, int binary) {
  return guarded([&] {
    need(path, "path");
    need(pixels, "pixels");
    psgm::save_pgm(path, psgm::PgmImage{pixels->matrix, maxval}, binary != 0);
  });
}

psgm_status psgm_movielens_read(const char* path, psgm_ratings** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new psgm_ratings{psgm::load_movielens(path)};
  });
}

void psgm_ratings_free(psgm_ratings* ratings) { delete ratings; }
size_t psgm_ratings_count(const psgm_ratings* ratings) { return ratings ? ratings->data.ratings.size() : 0; }

psgm_status psgm_ratings_shape(const psgm_ratings* ratings, size_t* users, size_t* items, size_t* duplicates) {
  return guarded([&] {
    need(ratings, "ratings");
    if (users) *users = ratings->data.users;
    if (items) *items = ratings->data.items;
    if (duplicates) *duplicates = ratings->data.duplicates;
  });
}

psgm_status psgm_ratings_split(const psgm_ratings* ratings, uint64_t seed, double test_fraction, size_t* train_count,
                               size_t* test_count) {
  return guarded([&] {
    need(ratings, "ratings");
    const psgm::RatingsSplit s = psgm::split_ratings(ratings->data, seed, test_fraction);
    if (train_count) *train_count = s.train.size();
    if (test_count) *test_count = s.test.size();
  });
}

psgm_status psgm_config_create(psgm_config** out) {
  return guarded([&] {
    need(out, "out");
    *out = new psgm_config{};
  });
}

psgm_status psgm_config_load(const char* path, psgm_config** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new psgm_config{psgm::load_config(path)};
  });
}

void psgm_config_free(psgm_config* config) { delete config; }

psgm_status psgm_config_set(psgm_config* config, const char* key, const char* value) {
  return guarded([&] {
    need(config, "config");
    need(key, "key");
    need(value, "value");
    config->config.set(key, value);
  });
}

psgm_status psgm_execute(const char* command, const psgm_config* config) {
  return guarded([&] {
    need(command, "command");
    need(config, "config");
    psgm::execute(command, config->config);
  });
}

}  // extern "C"
