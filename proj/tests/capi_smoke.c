/* Plain C consumer of the public header. */
#include <math.h>
#include <stdio.h>

#include "pmeflow/pmeflow.h"

#define N 32

static int failures = 0;

static void expect(int ok, const char* what) {
  if (!ok) {
    fprintf(stderr, "FAIL: %s (%s)\n", what, pmf_last_error());
    ++failures;
  }
}

int main(void) {
  const double lengths[2] = {2 * 3.14159265358979323846, 0};
  const int points[2] = {N, 0};
  pmf_manifold* man = NULL;
  pmf_trajectory* tr = NULL;
  pmf_solver_config cfg;
  double u0[N], mass0 = 0.0, mass1 = 0.0, last[N];
  size_t size = 0;
  int i;

  expect(pmf_manifold_create(PMF_CIRCLE, lengths, points, PMF_PHI_SIN, 0.3, &man) == PMF_OK,
         "create circle");
  for (i = 0; i < N; ++i) u0[i] = 1.0 + 0.3 * cos(lengths[0] * i / N);

  pmf_solver_config_default(&cfg);
  cfg.p = 2.0;
  cfg.t_end = 0.01;
  expect(pmf_solve(man, u0, N, &cfg, &tr) == PMF_OK, "solve");
  expect(pmf_trajectory_size(tr, &size) == PMF_OK && size > 1, "trajectory size");
  expect(pmf_trajectory_snapshot(tr, size - 1, last, N) == PMF_OK, "snapshot");
  pmf_weighted_integral(man, u0, N, &mass0);
  pmf_weighted_integral(man, last, N, &mass1);
  expect(fabs(mass1 - mass0) <= 1e-10 * mass0, "mass conserved");

  cfg.p = 1.0;
  pmf_trajectory_destroy(tr);
  tr = NULL;
  expect(pmf_solve(man, u0, N, &cfg, &tr) == PMF_ERR_PARAMETER && tr == NULL, "p = 1 rejected");
  expect(pmf_solve(NULL, u0, N, &cfg, &tr) == PMF_ERR_NULL, "null manifold");

  pmf_manifold_destroy(man);
  if (failures == 0) printf("capi_smoke: ok\n");
  return failures == 0 ? 0 : 1;
}
