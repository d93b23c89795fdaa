#ifndef PSGM_PSGM_H
#define PSGM_PSGM_H

/*
 * C interface to the projected subgradient library.
 *
 * Every fallible call returns a psgm_status. On failure the message is
 * available from psgm_last_error() on the calling thread until the next
 * failing call there. Objects are opaque handles released by their
 * matching *_free function; passing NULL to a free function is a no-op.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PSGM_BUILDING_LIBRARY)
#    define PSGM_API __declspec(dllexport)
#  else
#    define PSGM_API __declspec(dllimport)
#  endif
#else
#  define PSGM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum psgm_status {
  PSGM_OK = 0,
  PSGM_INVALID_ARGUMENT = 1,
  PSGM_HYPOTHESIS = 2,   /* parameters outside a convergence result's range */
  PSGM_NUMERIC = 3,
  PSGM_IO = 4,
  PSGM_PARSE = 5,
  PSGM_STATIONARY = 6,
  PSGM_UNSUPPORTED = 7,
  PSGM_INTERNAL = 99
} psgm_status;

PSGM_API const char* psgm_last_error(void);
PSGM_API const char* psgm_status_name(psgm_status status);
PSGM_API const char* psgm_version(void);

/* ---- problems ---------------------------------------------------------- */

typedef struct psgm_problem psgm_problem;

/* name: para1d, saddle2d, sharp_norm, quadratic_norm. dimension applies to
 * the norm problems. */
PSGM_API psgm_status psgm_problem_builtin(const char* name, size_t dimension, psgm_problem** out);
PSGM_API psgm_status psgm_problem_synth_rmc(size_t m, size_t n, size_t rank, double observed_fraction,
                                            double outlier_fraction, double outlier_scale, uint64_t seed,
                                            int nonnegative, psgm_problem** out);
PSGM_API psgm_status psgm_problem_synth_phase(size_t m, size_t n, uint64_t seed, psgm_problem** out);
PSGM_API void psgm_problem_free(psgm_problem* problem);

PSGM_API size_t psgm_problem_dimension(const psgm_problem* problem);
PSGM_API psgm_status psgm_problem_value(const psgm_problem* problem, const double* x, size_t n, double* value);
/* Writes n entries into g and the Euclidean norm into *norm (may be NULL). */
PSGM_API psgm_status psgm_problem_subgradient(const psgm_problem* problem, const double* x, size_t n, double* g,
                                              double* norm);
PSGM_API psgm_status psgm_problem_distance(const psgm_problem* problem, const double* x, size_t n, double* dist);
/* *has_f_star is set to 0 when the optimal value is unknown. */
PSGM_API psgm_status psgm_problem_f_star(const psgm_problem* problem, int* has_f_star, double* f_star);

typedef enum psgm_init { PSGM_INIT_SVD = 0, PSGM_INIT_RANDOM = 1 } psgm_init;
/* Factor initialization for synth_rmc problems; other problems get their
 * first reference point. */
PSGM_API psgm_status psgm_problem_initial_point(const psgm_problem* problem, psgm_init method, uint64_t seed,
                                                double* x, size_t n);

/* ---- step sizes and certificates --------------------------------------- */

typedef enum psgm_rule_kind {
  PSGM_RULE_CONSTANT = 0,       /* alpha */
  PSGM_RULE_DIMINISHING = 1,    /* lambda (k + beta)^(-r) */
  PSGM_RULE_SQUARE_SUMMABLE = 2,/* lambda / (k + 1) */
  PSGM_RULE_GEOMETRIC = 3,      /* lambda q^k */
  PSGM_RULE_POLYAK = 4,         /* (f - f_target) / |g| */
  PSGM_RULE_SCALED_POLYAK = 5   /* (f - f_target) / (sigma |g|) */
} psgm_rule_kind;

typedef struct psgm_rule {
  psgm_rule_kind kind;
  double alpha;
  double lambda;
  double beta;
  double r;
  double q;
  double sigma;
  int has_target; /* 0: use the problem's f_star */
  double f_target;
} psgm_rule;

PSGM_API psgm_status psgm_step_size(const psgm_rule* rule, size_t k, double f_x, double grad_norm, double* alpha);

typedef struct psgm_theory {
  double nu;
  double rho;
  double delta;
  double mu;
  double L;
} psgm_theory;

PSGM_API psgm_status psgm_tube_radius(const psgm_theory* theory, double gamma, double* radius);

typedef enum psgm_certificate_kind {
  PSGM_CERT_CONSTANT = 0,
  PSGM_CERT_DIMINISHING = 1,
  PSGM_CERT_DECAY = 2,
  PSGM_CERT_GEOMETRIC = 3,
  PSGM_CERT_SCALED_POLYAK = 4,
  PSGM_CERT_GAP_BOUND = 5
} psgm_certificate_kind;

/* Fields that do not belong to the certificate kind are NaN. */
typedef struct psgm_certificate {
  psgm_certificate_kind kind;
  double D_star, q, script_D, alpha_max;  /* constant; q also geometric */
  double A, beta_min;                     /* diminishing, decay, geometric (A) */
  double r, lambda;                       /* decay */
  double gamma_lo, gamma_hi, dist0_max;   /* geometric */
  double rate, gamma_max;                 /* scaled polyak */
  double gap_bound, k_min, k_min_from_dist1; /* gap bound */
} psgm_certificate;

PSGM_API psgm_status psgm_constant_certificate(double alpha, const psgm_theory* theory, double D0,
                                               psgm_certificate* out);
/* dist1 < 0 means "not supplied". */
PSGM_API psgm_status psgm_gap_bound_certificate(double alpha, const psgm_theory* theory, double dist1,
                                                psgm_certificate* out);
PSGM_API psgm_status psgm_rate_certificate(const psgm_rule* rule, const psgm_theory* theory, double gamma,
                                           double dist0, psgm_certificate* out);

/* ---- solver ------------------------------------------------------------- */

typedef struct psgm_solver_config {
  size_t max_iterations;
  double stationary_tolerance;
  int has_target_gap;
  double target_gap;
  int record_distances;
  int record_points;
  uint64_t seed;
} psgm_solver_config;

PSGM_API void psgm_solver_config_default(psgm_solver_config* config);

typedef enum psgm_termination {
  PSGM_TERM_MAX_ITERATIONS = 0,
  PSGM_TERM_STATIONARY = 1,
  PSGM_TERM_TARGET_REACHED = 2
} psgm_termination;

typedef struct psgm_record {
  size_t k;
  double f;
  double f_best;
  double alpha;
  double grad_norm;
  int has_dist;
  double dist;
} psgm_record;

typedef struct psgm_history psgm_history;

PSGM_API psgm_status psgm_solve(const psgm_problem* problem, const psgm_rule* rule, const psgm_solver_config* config,
                                const double* x0, size_t n, psgm_history** out);
PSGM_API void psgm_history_free(psgm_history* history);
PSGM_API size_t psgm_history_length(const psgm_history* history);
PSGM_API psgm_status psgm_history_record(const psgm_history* history, size_t index, psgm_record* out);
PSGM_API psgm_termination psgm_history_termination(const psgm_history* history);
PSGM_API psgm_status psgm_history_final_point(const psgm_history* history, double* x, size_t n);

typedef struct psgm_audit_summary {
  int pass;
  int empirical_L;
  double L_used;
  double max_violation;
  size_t worst_index;
  size_t audited_iterations;
} psgm_audit_summary;

PSGM_API psgm_status psgm_audit(const psgm_problem* problem, const psgm_history* history, double tolerance,
                                psgm_audit_summary* out);

/* ---- paraconvexity and error-bound checks ------------------------------ */

typedef struct psgm_domain {
  const double* lo;
  const double* hi;
  size_t dimension;
  size_t pair_count;
  uint64_t seed;
} psgm_domain;

PSGM_API psgm_status psgm_midpoint_rho(const psgm_problem* problem, const psgm_domain* domain, double nu,
                                       double* rho_hat);
PSGM_API psgm_status psgm_subgradient_rho(const psgm_problem* problem, const psgm_domain* domain, double nu,
                                          double* rho_hat);
PSGM_API psgm_status psgm_heb_fit(const psgm_problem* problem, const psgm_domain* domain, double* mu_hat,
                                  double* delta_hat);
PSGM_API psgm_status psgm_composite_rho(double L0, double L1, double nu, double* rho);

/* ---- metrics ------------------------------------------------------------ */

PSGM_API psgm_status psgm_rmse(const double* pred, const double* truth, const double* mask, size_t count,
                               double* out);
PSGM_API psgm_status psgm_psnr_snr(const double* recon, const double* original, size_t count, double max_value,
                                   double* psnr_db, double* snr_db);

typedef enum psgm_rate_class { PSGM_RATE_FINITE = 0, PSGM_RATE_GEOMETRIC = 1, PSGM_RATE_SUBLINEAR = 2 } psgm_rate_class;

typedef struct psgm_rate_fit_result {
  psgm_rate_class rate_class;
  double rate;
  double exponent;
  double fit_residual;
} psgm_rate_fit_result;

PSGM_API psgm_status psgm_rate_fit(const double* sequence, size_t length, size_t first_index,
                                   double transient_fraction, psgm_rate_fit_result* out);

/* ---- matrices and files ------------------------------------------------- */

typedef struct psgm_matrix psgm_matrix;

PSGM_API psgm_status psgm_matrix_create(size_t rows, size_t cols, const double* data, psgm_matrix** out);
PSGM_API void psgm_matrix_free(psgm_matrix* matrix);
PSGM_API size_t psgm_matrix_rows(const psgm_matrix* matrix);
PSGM_API size_t psgm_matrix_cols(const psgm_matrix* matrix);
/* Row-major storage owned by the matrix. */
PSGM_API const double* psgm_matrix_data(const psgm_matrix* matrix);

PSGM_API psgm_status psgm_csv_read(const char* path, psgm_matrix** out);
PSGM_API psgm_status psgm_csv_write(const char* path, const psgm_matrix* matrix);
/* Pixels are scaled into [0, 1]; *maxval receives the header value. */
PSGM_API psgm_status psgm_pgm_read(const char* path, psgm_matrix** out, unsigned* maxval);
PSGM_API psgm_status psgm_pgm_write(const char* path, const psgm_matrix* pixels, unsigned maxval, int binary);

typedef struct psgm_ratings psgm_ratings;

PSGM_API psgm_status psgm_movielens_read(const char* path, psgm_ratings** out);
PSGM_API void psgm_ratings_free(psgm_ratings* ratings);
PSGM_API size_t psgm_ratings_count(const psgm_ratings* ratings);
PSGM_API psgm_status psgm_ratings_shape(const psgm_ratings* ratings, size_t* users, size_t* items,
                                        size_t* duplicates);
PSGM_API psgm_status psgm_ratings_split(const psgm_ratings* ratings, uint64_t seed, double test_fraction,
                                        size_t* train_count, size_t* test_count);

/* ---- configured runs ---------------------------------------------------- */

typedef struct psgm_config psgm_config;

PSGM_API psgm_status psgm_config_create(psgm_config** out);
PSGM_API psgm_status psgm_config_load(const char* path, psgm_config** out);
PSGM_API void psgm_config_free(psgm_config* config);
PSGM_API psgm_status psgm_config_set(psgm_config* config, const char* key, const char* value);

/* command: solve, certify, bench or recover. Artifacts go to the config's
 * "out" directory. */
PSGM_API psgm_status psgm_execute(const char* command, const psgm_config* config);

#ifdef __cplusplus
}
#endif

#endif /* PSGM_PSGM_H */
