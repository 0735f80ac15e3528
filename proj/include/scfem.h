/* C API of the adaptive stochastic collocation FEM solver.
 *
 * All functions are thread-compatible: distinct handles may be used from
 * distinct threads concurrently. On failure a function returns a nonzero
 * status code and leaves a detail message retrievable (per thread) through
 * scfem_last_error().
 */
#ifndef SCFEM_H
#define SCFEM_H

#ifdef __cplusplus
extern "C" {
#endif

typedef struct scfem_config scfem_config; /* opaque */
typedef struct scfem_run scfem_run;       /* opaque */

typedef enum scfem_status {
  SCFEM_OK = 0,
  SCFEM_ERR_INVALID_ARGUMENT = 1,
  SCFEM_ERR_CONFIG = 2,
  SCFEM_ERR_NUMERICS = 3,
  SCFEM_ERR_IO = 4,
  SCFEM_ERR_INTERNAL = 5
} scfem_status;

typedef enum scfem_refinement {
  SCFEM_REFINE_SPATIAL = 0,
  SCFEM_REFINE_PARAMETRIC = 1
} scfem_refinement;

typedef enum scfem_termination {
  SCFEM_TERMINATED_CONVERGED = 0,
  SCFEM_TERMINATED_MAX_ITERATIONS = 1,
  SCFEM_TERMINATED_ABORTED = 2
} scfem_termination;

typedef struct scfem_record {
  int iteration;
  int refinement; /* scfem_refinement */
  long long dof;
  long long dof_total_vertices;
  double mu_bar;
  double tau_bar;
  double mu;  /* NaN when skipped by estimate_period */
  double tau; /* NaN when skipped by estimate_period */
  double eta; /* NaN when skipped by estimate_period */
  int n_collocation_points;
  int n_triangles;
  double wall_ms;
} scfem_record;

/* Library version string, e.g. "1.0.0". */
const char* scfem_version(void);

/* Human-readable name of a status code. */
const char* scfem_status_name(scfem_status status);

/* Detail message of the most recent failure on the calling thread, or "". */
const char* scfem_last_error(void);

/* ---- configuration ----------------------------------------------------- */

/* New configuration with default marking parameters (theta_x = theta_y = 0.3,
 * vartheta = 1). Returns NULL on allocation failure. */
scfem_config* scfem_config_create(void);
void scfem_config_destroy(scfem_config* config);

/* Applies one key=value setting. Keys: problem, family, m, tol, theta_x,
 * theta_y, vartheta, estimate_period, max_iter, lshape_cells, out. */
scfem_status scfem_config_set(scfem_config* config, const char* key, const char* value);

/* Loads a flat key=value file ('#' comments) on top of current settings. */
scfem_status scfem_config_load_file(scfem_config* config, const char* path);

/* Validates all settings; SCFEM_ERR_CONFIG lists violations in the error
 * message. */
scfem_status scfem_config_validate(const scfem_config* config);

/* ---- runs --------------------------------------------------------------- */

/* Runs the adaptive loop to completion. On SCFEM_OK (and on
 * SCFEM_ERR_NUMERICS, when the solver aborted mid-run) *out receives a run
 * handle with the (possibly partial) history; the caller owns it. */
scfem_status scfem_run_execute(const scfem_config* config, scfem_run** out);
void scfem_run_destroy(scfem_run* run);

scfem_termination scfem_run_termination(const scfem_run* run);
int scfem_run_iteration_count(const scfem_run* run);
scfem_status scfem_run_get_record(const scfem_run* run, int index, scfem_record* out);

/* Hypothesis-check outcome for the run's problem (1 pass / 0 fail). */
int scfem_run_hypothesis_pass(const scfem_run* run);

/* ---- outputs ------------------------------------------------------------ */

scfem_status scfem_run_write_csv(const scfem_run* run, const char* path);
scfem_status scfem_run_write_manifest(const scfem_run* run, const char* path);
scfem_status scfem_run_write_svg(const scfem_run* run, const char* path);
scfem_status scfem_run_write_mesh(const scfem_run* run, const char* path);

/* Writes run.csv, manifest.json, convergence.svg and mesh_final.txt into the
 * directory (created if missing). */
scfem_status scfem_run_write_outputs(const scfem_run* run, const char* dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* SCFEM_H */
