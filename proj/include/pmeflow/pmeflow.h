#ifndef PMEFLOW_H
#define PMEFLOW_H

/* C interface to the pmeflow library. Objects are opaque handles released
 * with the matching *_destroy function. Every fallible call returns a
 * pmf_status; on failure pmf_last_error() describes the problem (per thread).
 * Arrays are caller-owned; a length argument always counts doubles. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PMF_BUILDING_LIBRARY)
#    define PMF_API __declspec(dllexport)
#  else
#    define PMF_API __declspec(dllimport)
#  endif
#else
#  define PMF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pmf_status {
  PMF_OK = 0,
  PMF_ERR_PARAMETER = 1,
  PMF_ERR_NUMERICAL = 2,
  PMF_ERR_POSITIVITY = 3,
  PMF_ERR_SCENARIO = 4,
  PMF_ERR_IO = 5,
  PMF_ERR_NULL = 6,
  PMF_ERR_RANGE = 7,
  PMF_ERR_INTERNAL = 8
} pmf_status;

PMF_API const char* pmf_version(void);
/* Message of the last failed call on this thread ("" if none). */
PMF_API const char* pmf_last_error(void);
PMF_API const char* pmf_status_name(pmf_status status);

/* ---- manifold ---------------------------------------------------------- */

typedef struct pmf_manifold pmf_manifold;

typedef enum pmf_manifold_kind { PMF_CIRCLE = 0, PMF_TORUS2 = 1 } pmf_manifold_kind;
typedef enum pmf_weight_kind {
  PMF_PHI_ZERO = 0,
  PMF_PHI_CONSTANT = 1,
  PMF_PHI_SIN = 2 /* amplitude * sin(2 pi x / Lx) */
} pmf_weight_kind;

/* lengths/points: two entries, the second ignored for the circle. */
PMF_API pmf_status pmf_manifold_create(pmf_manifold_kind kind, const double lengths[2],
                                       const int points[2], pmf_weight_kind phi,
                                       double phi_amplitude, pmf_manifold** out);
PMF_API pmf_status pmf_manifold_create_samples(pmf_manifold_kind kind, const double lengths[2],
                                               const int points[2], const double* phi,
                                               size_t count, pmf_manifold** out);
PMF_API void pmf_manifold_destroy(pmf_manifold* manifold);
PMF_API pmf_status pmf_manifold_node_count(const pmf_manifold* manifold, size_t* out);
PMF_API pmf_status pmf_manifold_dimension(const pmf_manifold* manifold, int* out);
PMF_API pmf_status pmf_manifold_coordinates(const pmf_manifold* manifold, size_t node,
                                            double xy[2]);

/* ---- operators (arrays of node_count values) ---------------------------- */

PMF_API pmf_status pmf_witten_laplacian(const pmf_manifold* manifold, const double* f,
                                        double* out, size_t count);
/* out holds dimension * count values, component-major. */
PMF_API pmf_status pmf_gradient(const pmf_manifold* manifold, const double* f, double* out,
                                size_t count);
PMF_API pmf_status pmf_weighted_integral(const pmf_manifold* manifold, const double* f,
                                         size_t count, double* out);
PMF_API pmf_status pmf_symmetry_defect(const pmf_manifold* manifold, const double* u,
                                       const double* v, size_t count, double* out);

typedef struct pmf_curvature {
  double m;
  double lambda_min;
  double K;
  double tol_eig;
  int nonneg;
} pmf_curvature;

PMF_API pmf_status pmf_bakry_emery(const pmf_manifold* manifold, double m, pmf_curvature* out);
/* Per-node defects: equality and slack each receive count values; either may be NULL. */
PMF_API pmf_status pmf_bochner_defect(const pmf_manifold* manifold, const double* w,
                                      size_t count, double m, double* equality, double* slack);

/* ---- solver ------------------------------------------------------------ */

typedef struct pmf_trajectory pmf_trajectory;

typedef enum pmf_scheme { PMF_EULER = 0, PMF_RK4 = 1 } pmf_scheme;

typedef struct pmf_solver_config {
  double p;
  pmf_scheme scheme;
  double dt; /* <= 0 selects the automatic step */
  double cfl_fraction;
  double t_end;
  double positivity_floor;
  int snapshot_stride;
} pmf_solver_config;

PMF_API void pmf_solver_config_default(pmf_solver_config* config);
PMF_API pmf_status pmf_solve(const pmf_manifold* manifold, const double* u0, size_t count,
                             const pmf_solver_config* config, pmf_trajectory** out);
PMF_API void pmf_trajectory_destroy(pmf_trajectory* trajectory);
PMF_API pmf_status pmf_trajectory_size(const pmf_trajectory* trajectory, size_t* out);
PMF_API pmf_status pmf_trajectory_time(const pmf_trajectory* trajectory, size_t k, double* out);
PMF_API pmf_status pmf_trajectory_dt(const pmf_trajectory* trajectory, double* out);
PMF_API pmf_status pmf_trajectory_snapshot(const pmf_trajectory* trajectory, size_t k,
                                           double* out, size_t count);
PMF_API pmf_status pmf_trajectory_write_csv(const pmf_trajectory* trajectory, const char* path);
/* max |pressure residual| and max |v| at snapshot k (1 <= k <= size-2). */
PMF_API pmf_status pmf_pressure_residual_norm(const pmf_trajectory* trajectory, size_t k,
                                              double* residual, double* pressure_max);

/* ---- gradient estimates ------------------------------------------------ */

PMF_API pmf_status pmf_a_tilde(double p, double m, double* out);

typedef struct pmf_estimate_params {
  double p;
  double m;
  double alpha;
  double K;
  double M;   /* <= 0: computed from the trajectory */
  double t_check_min;
  double tol; /* < 0: default tolerance */
} pmf_estimate_params;

/* theorem: "1.1" ... "1.7". M must be positive here. */
PMF_API pmf_status pmf_theorem_rhs(const char* theorem, const pmf_estimate_params* params,
                                   double t, double* alpha_out, double* rhs_out);

typedef struct pmf_estimate_summary {
  double global_min_margin;
  double argmin_time;
  size_t argmin_node;
  double M;
  double tol;
  int pass;
} pmf_estimate_summary;

PMF_API pmf_status pmf_check_estimate(const pmf_trajectory* trajectory, const char* theorem,
                                      const pmf_estimate_params* params,
                                      pmf_estimate_summary* out);
PMF_API pmf_status pmf_feasibility_A(double p, double m, double alpha, double eps1, double eps2,
                                     double* out);

/* ---- entropies --------------------------------------------------------- */

PMF_API pmf_status pmf_entropy_N(const pmf_trajectory* trajectory, size_t k, double m,
                                 double* out);
PMF_API pmf_status pmf_entropy_W(const pmf_trajectory* trajectory, size_t k, double m,
                                 double* out);
PMF_API pmf_status pmf_dN_formula(const pmf_trajectory* trajectory, size_t k, double m,
                                  double* out);
PMF_API pmf_status pmf_dW_formula(const pmf_trajectory* trajectory, size_t k, double m,
                                  double* out);
PMF_API pmf_status pmf_dW_upper_bound_fast(const pmf_trajectory* trajectory, size_t k, double m,
                                           double eps, double* out);
/* out[0..2] = finite difference, middle form, right form. */
PMF_API pmf_status pmf_lemma41(const pmf_trajectory* trajectory, size_t k, double out[3]);
/* out[0..1] = finite difference, formula. */
PMF_API pmf_status pmf_lemma42(const pmf_trajectory* trajectory, size_t k, double out[2]);

/* ---- harness ----------------------------------------------------------- */

typedef struct pmf_report pmf_report;

typedef struct pmf_check_info {
  const char* id;   /* owned by the report */
  const char* kind; /* owned by the report */
  int pass;
  double min_margin;
  double tol;
  double argmin_time;
} pmf_check_info;

/* out_dir and seed may be NULL (no files / scenario seed). */
PMF_API pmf_status pmf_run_scenario(const char* path, const char* out_dir, const uint64_t* seed,
                                    pmf_report** out);
PMF_API pmf_status pmf_run_scenario_text(const char* text, const char* base_dir,
                                         const char* out_dir, const uint64_t* seed,
                                         pmf_report** out);
PMF_API pmf_status pmf_identities(uint64_t seed, const char* out_dir, pmf_report** out);
PMF_API uint64_t pmf_default_identity_seed(void);
PMF_API void pmf_report_destroy(pmf_report* report);
PMF_API int pmf_report_pass(const pmf_report* report);
PMF_API size_t pmf_report_check_count(const pmf_report* report);
PMF_API pmf_status pmf_report_check(const pmf_report* report, size_t i, pmf_check_info* out);
/* JSON summary, owned by the report. */
PMF_API const char* pmf_report_json(const pmf_report* report);

typedef struct pmf_sweep pmf_sweep;

/* axis: "p", "m" or "alpha". */
PMF_API pmf_status pmf_sweep_run(const char* path, const char* axis, const double* values,
                                 size_t count, const char* out_dir, const uint64_t* seed,
                                 pmf_sweep** out);
PMF_API void pmf_sweep_destroy(pmf_sweep* sweep);
PMF_API size_t pmf_sweep_size(const pmf_sweep* sweep);
/* ran = 0 for skipped points; report is NULL then and owned by the sweep otherwise. */
PMF_API pmf_status pmf_sweep_point(const pmf_sweep* sweep, size_t i, double* value, int* ran,
                                   const pmf_report** report);
/* Reason for a skipped point ("" when it ran), owned by the sweep. */
PMF_API const char* pmf_sweep_skip_reason(const pmf_sweep* sweep, size_t i);

#ifdef __cplusplus
}
#endif

#endif
