/* SPDX-License-Identifier: Apache-2.0 */

#ifndef DDPGD_DDPGD_H
#define DDPGD_DDPGD_H

#include <stddef.h>
#include <stdint.h>

#if defined(DDPGD_BUILDING_LIBRARY)
#define DDPGD_API __attribute__((visibility("default")))
#else
#define DDPGD_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as process exit codes for the command-line driver. */
typedef enum ddpgd_status
{
  DDPGD_OK = 0,
  DDPGD_ERR_CONFIG = 2,
  DDPGD_ERR_SOLVER = 3,
  DDPGD_ERR_IO = 4,
  DDPGD_ERR_DOMAIN = 5,
  DDPGD_ERR_FORMAT = 6,
  DDPGD_ERR_ARGUMENT = 7,
  DDPGD_ERR_INTERNAL = 8
} ddpgd_status;

typedef struct ddpgd_experiment ddpgd_experiment;
typedef struct ddpgd_model ddpgd_model;
typedef struct ddpgd_online ddpgd_online;

DDPGD_API const char *ddpgd_version(void);

/* Message of the last failed call on this thread; empty after a success. */
DDPGD_API const char *ddpgd_last_error(void);

/* Releases strings returned through char ** out-parameters. */
DDPGD_API void ddpgd_string_free(char *s);

/* ---- experiments ---------------------------------------------------------------------- */

/* `spec` is a YAML config path or a built-in name ("bidomain", "chain9"). */
DDPGD_API ddpgd_status ddpgd_experiment_open(const char *spec, ddpgd_experiment **out);
DDPGD_API void ddpgd_experiment_free(ddpgd_experiment *e);

/* Overrides one setting. Keys: enrich_tol, compress_tol, gmres_tol, gmres_max_iters, fp_tol,
   fp_max_iters, max_modes, schwarz_tol, schwarz_max_iters, seed, workers. */
DDPGD_API ddpgd_status ddpgd_experiment_set(ddpgd_experiment *e, const char *key, double value);

/* JSON: name, parameters, subdomains, tolerances, seed, output_dir, queries. */
DDPGD_API ddpgd_status ddpgd_experiment_info(const ddpgd_experiment *e, char **json_out);

/* Builds and saves one model per subdomain as <out_dir>/<id>.ddpgd and returns the build
   report (per-subproblem mode counts and wall times) as JSON. */
DDPGD_API ddpgd_status ddpgd_offline_build(const ddpgd_experiment *e, const char *out_dir,
                                           char **report_json);

/* ---- models --------------------------------------------------------------------------- */

DDPGD_API ddpgd_status ddpgd_model_load(const char *path, ddpgd_model **out);
DDPGD_API void ddpgd_model_free(ddpgd_model *m);
/* Manifest of the model (geometry, grid, tolerances, mode counts) as JSON. */
DDPGD_API ddpgd_status ddpgd_model_info(const ddpgd_model *m, char **json_out);

/* ---- online phase --------------------------------------------------------------------- */

/* Interface problem at one parameter value. `mu` is "3", a comma-separated tuple in the
   experiment's parameter order, or "name=value,..." pairs. The experiment supplies parameter
   names, GMRES settings and the optional exact solution; the handle shares
   the models, so they may be freed after this call. */
DDPGD_API ddpgd_status ddpgd_online_create(const ddpgd_experiment *e,
                                           const ddpgd_model *const *models, size_t n_models,
                                           const char *mu, ddpgd_online **out);
DDPGD_API void ddpgd_online_free(ddpgd_online *o);

/* Size of the stacked interface vector and of subdomain i's block. */
DDPGD_API ddpgd_status ddpgd_online_sizes(const ddpgd_online *o, size_t *total,
                                          size_t *n_subdomains);
DDPGD_API ddpgd_status ddpgd_online_block(const ddpgd_online *o, size_t i, size_t *offset,
                                          size_t *length, size_t *n_nodes);

/* Nodal field sum_q lambda_q u_q(mu) on subdomain i. */
DDPGD_API ddpgd_status ddpgd_online_apply(const ddpgd_online *o, size_t i, const double *lambda,
                                          size_t n, double *out, size_t out_len);
DDPGD_API ddpgd_status ddpgd_online_matvec(const ddpgd_online *o, const double *lambda,
                                           size_t n, double *out);

/* Solves the interface system and reconstructs the global field. The report JSON holds the
   GMRES history, errors against the exact solution when known, the overlap mismatch, timings
   and the FEM assembly/factorization counts of the online phase. With compare_fem != 0 a
   full-order solve is run afterwards and its error fields are added. Non-convergence still
   fills the report but returns DDPGD_ERR_SOLVER. */
DDPGD_API ddpgd_status ddpgd_online_solve(ddpgd_online *o, int compare_fem, char **report_json);

/* Interface solution of the last solve; n must equal the total size. */
DDPGD_API ddpgd_status ddpgd_online_lambda(const ddpgd_online *o, double *out, size_t n);

/* Global field of the last solve as CSV "x,y,value". */
DDPGD_API ddpgd_status ddpgd_online_write_csv(const ddpgd_online *o, const char *path);

/* ---- reference solvers ---------------------------------------------------------------- */

/* method: "fem", "schwarz" or "both". Writes <prefix>_fem.csv and/or <prefix>_schwarz.csv
   when csv_prefix is non-NULL and returns a JSON report. */
DDPGD_API ddpgd_status ddpgd_reference_run(const ddpgd_experiment *e, const char *mu,
                                           const char *method, const char *csv_prefix,
                                           char **report_json);

/* ---- reporting ------------------------------------------------------------------------ */

/* Merges JSON run reports into a table; format is "markdown" or "csv". */
DDPGD_API ddpgd_status ddpgd_compare(const char *const *report_paths, size_t n,
                                     const char *format, char **table_out);

/* Process-wide FEM assembly and factorization counts. */
DDPGD_API ddpgd_status ddpgd_counters(uint64_t *assemblies, uint64_t *factorizations);

#ifdef __cplusplus
}
#endif

#endif /* DDPGD_DDPGD_H */
