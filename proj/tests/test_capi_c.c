/* The public header must compile as C and be usable without C++. */
#include <math.h>
#include <stdio.h>

#include "psgm/psgm.h"

static int failures = 0;

#define EXPECT(cond)                                              \
  do {                                                            \
    if (!(cond)) {                                                \
      fprintf(stderr, "%s:%d: failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                 \
    }                                                             \
  } while (0)

int main(void) {
  psgm_problem* p = NULL;
  psgm_rule rule = {0};
  psgm_solver_config cfg;
  psgm_history* h = NULL;
  psgm_record rec;
  double x0[4] = {0.0, 0.6, 0.0, 0.8};

  EXPECT(psgm_problem_builtin("sharp_norm", 4, &p) == PSGM_OK);
  rule.kind = PSGM_RULE_POLYAK;
  psgm_solver_config_default(&cfg);
  cfg.max_iterations = 10;
  EXPECT(psgm_solve(p, &rule, &cfg, x0, 4, &h) == PSGM_OK);
  EXPECT(psgm_history_termination(h) == PSGM_TERM_STATIONARY);
  EXPECT(psgm_history_length(h) == 2);
  EXPECT(psgm_history_record(h, 1, &rec) == PSGM_OK);
  EXPECT(fabs(rec.dist) <= 1e-15);
  psgm_history_free(h);
  psgm_problem_free(p);

  EXPECT(psgm_problem_builtin("missing", 1, &p) != PSGM_OK);
  EXPECT(psgm_last_error()[0] != '\0');

  if (failures) fprintf(stderr, "%d failure(s)\n", failures);
  return failures ? 1 : 0;
}
