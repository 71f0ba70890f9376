#ifndef SHAPEGEO_H
#define SHAPEGEO_H

/* C interface to the shapegeo library: geodesics between closed triangulated
 * surfaces under almost-local Riemannian metrics, plus the analytic sphere
 * theory used to validate them.
 *
 * Conventions: every fallible call returns sg_status; SG_OK means success.
 * On failure, sg_last_error() describes the problem for the calling thread.
 * Objects returned through out-parameters are owned by the caller and must
 * be released with the matching *_free function (safe on NULL).
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sg_status {
  SG_OK = 0,
  SG_ERR_INVALID_ARGUMENT,
  SG_ERR_NON_MANIFOLD_EDGE,
  SG_ERR_INCONSISTENT_ORIENTATION,
  SG_ERR_DEGENERATE_FACE,
  SG_ERR_PARSE,
  SG_ERR_UNSUPPORTED_ELEMENT,
  SG_ERR_LEVEL_TOO_LARGE,
  SG_ERR_DEGENERATE_ANGLE,
  SG_ERR_ZERO_VECTOR_AREA,
  SG_ERR_ZERO_LENGTH_EDGE,
  SG_ERR_DOMAIN,
  SG_ERR_NO_ANALYTIC_FORM,
  SG_ERR_FIT_FAILURE,
  SG_ERR_UNSUPPORTED_WEIGHT,
  SG_ERR_NO_POSITIVE_OPTIMUM,
  SG_ERR_BLOWUP_DETECTED,
  SG_ERR_STEP_FAILURE,
  SG_ERR_SHARED_COMBINATORICS_MISMATCH,
  SG_ERR_DEGENERATE_FRAME,
  SG_ERR_DEGENERATE_FRAME_ENCOUNTERED,
  SG_ERR_INAPPLICABLE_BOUND,
  SG_ERR_CONFIG,
  SG_ERR_IO,
  SG_ERR_UNKNOWN
} sg_status;

/* Message for the most recent failure on this thread; never NULL. */
const char* sg_last_error(void);

const char* sg_version(void);

/* ---- meshes -------------------------------------------------------- */

typedef struct sg_mesh sg_mesh;

sg_status sg_mesh_create(const double* positions, int vertex_count, const int* faces,
                         int face_count, sg_mesh** out);
sg_status sg_mesh_make_icosphere(int level, double radius, const double center[3], sg_mesh** out);
sg_status sg_mesh_read(const char* path, sg_mesh** out);
sg_status sg_mesh_write(const sg_mesh* mesh, const char* path);
void sg_mesh_free(sg_mesh* mesh);

int sg_mesh_vertex_count(const sg_mesh* mesh);
int sg_mesh_face_count(const sg_mesh* mesh);
int sg_mesh_edge_count(const sg_mesh* mesh);
/* out has room for 3 * vertex_count doubles (x y z per vertex). */
sg_status sg_mesh_positions(const sg_mesh* mesh, double* out);
sg_status sg_mesh_face(const sg_mesh* mesh, int face, int out[3]);
/* 1 when both meshes have identical face lists, else 0. */
int sg_mesh_same_faces(const sg_mesh* a, const sg_mesh* b);

/* ---- metric weights ------------------------------------------------- */

typedef struct sg_metric sg_metric;

/* Parses e.g. {"type":"GAPower","A":0.0625,"k":2}. */
sg_status sg_metric_parse_json(const char* json, sg_metric** out);
/* Writes the canonical JSON form; returns the full length (excluding the
 * terminator) like snprintf, truncating if cap is too small. */
int sg_metric_to_json(const sg_metric* metric, char* buf, int cap);
void sg_metric_free(sg_metric* metric);

double sg_metric_evaluate(const sg_metric* metric, double vol, double trl2);
void sg_metric_partials(const sg_metric* metric, double vol, double trl2, double* d_vol,
                        double* d_trl2);

/* ---- per-frame geometry --------------------------------------------- */

typedef struct sg_geometry sg_geometry;

/* positions may be NULL to use the mesh's own. */
sg_status sg_geometry_compute(const sg_mesh* mesh, const double* positions, sg_geometry** out);
void sg_geometry_free(sg_geometry* geo);

double sg_geometry_total_area(const sg_geometry* geo);
double sg_geometry_vertex_area(const sg_geometry* geo, int vertex);
double sg_geometry_trl2(const sg_geometry* geo, int vertex);
sg_status sg_geometry_vector_area(const sg_geometry* geo, int vertex, double out[3]);
sg_status sg_geometry_vector_mean_curvature(const sg_geometry* geo, int vertex, double out[3]);

/* ---- paths ----------------------------------------------------------- */

typedef struct sg_path sg_path;

/* A path with timesteps+1 frames, all initialized to the mesh positions. */
sg_status sg_path_new(const sg_mesh* mesh, int timesteps, sg_path** out);
sg_status sg_path_set_frame(sg_path* path, int t, const double* positions);
sg_status sg_path_get_frame(const sg_path* path, int t, double* out);
/* A standalone mesh whose positions are frame t. */
sg_status sg_path_frame_mesh(const sg_path* path, int t, sg_mesh** out);
int sg_path_timesteps(const sg_path* path);
int sg_path_vertex_count(const sg_path* path);
void sg_path_free(sg_path* path);

/* Energy + penalty of a path. Any output pointer may be NULL. */
sg_status sg_path_objective(const sg_path* path, const sg_metric* metric, double penalty_factor,
                            int penalty_exponent, double* energy, double* penalty,
                            double* objective);

/* ---- geodesic solver -------------------------------------------------- */

typedef struct sg_solver_config {
  int max_iterations;          /* default 2000 */
  double grad_tolerance;       /* 0 picks 1e-6 x endpoint bounding-box diagonal */
  double rel_energy_tolerance; /* default 1e-10 */
  int memory;                  /* quasi-Newton history, default 10 */
  double c1, c2;               /* Wolfe constants, defaults 1e-4 and 0.9 */
  int verbose;                 /* nonzero prints progress lines to stderr */
} sg_solver_config;

void sg_solver_config_default(sg_solver_config* config);

typedef struct sg_report sg_report;

/* start and end must share the face list; initial_path may be NULL for
 * linear initialization. Both outputs are optional. */
sg_status sg_solve_geodesic(const sg_mesh* start, const sg_mesh* end, int timesteps,
                            const sg_metric* metric, double penalty_factor, int penalty_exponent,
                            const sg_solver_config* config, const sg_path* initial_path,
                            sg_path** out_path, sg_report** out_report);

int sg_report_iterations(const sg_report* report);
double sg_report_energy(const sg_report* report);
double sg_report_penalty(const sg_report* report);
double sg_report_objective(const sg_report* report);
double sg_report_grad_inf_norm(const sg_report* report);
/* "Converged", "MaxIterations" or "LineSearchFailure"; static storage. */
const char* sg_report_reason(const sg_report* report);
int sg_report_history_size(const sg_report* report);
double sg_report_history(const sg_report* report, int i);
int sg_report_step_energy_count(const sg_report* report);
double sg_report_step_energy(const sg_report* report, int t);
void sg_report_free(sg_report* report);

/* ---- diagnostics ------------------------------------------------------ */

sg_status sg_diagnostics_write_csv(const sg_path* path, const sg_metric* metric,
                                   const char* csv_path);
/* Any output pointer may be NULL. */
sg_status sg_diagnostics_summary(const sg_path* path, const sg_metric* metric, double* swept_area,
                                 double* swept_area_full, double* path_length);

typedef struct sg_bound_check {
  int applicable;
  double lhs, rhs;
} sg_bound_check;

/* Pass NULL for constants that are not supplied. */
sg_status sg_swept_area_bounds(const sg_path* path, const sg_metric* metric, const double* c1,
                               const double* c2, const double* c,
                               sg_bound_check* swept_vs_max_vol, sg_bound_check* vol_lipschitz,
                               sg_bound_check* swept_vs_length);

/* Curvature quadrature of the unweighted metric for per-vertex coefficient
 * fields a1, a2 on the given frame (NULL positions = mesh positions). */
sg_status sg_g0_curvature(const sg_mesh* mesh, const double* positions, const double* a1,
                          const double* a2, double* out);

/* ---- sphere analytics -------------------------------------------------- */

sg_status sg_radius_ode_rhs(const sg_metric* metric, double r, double rdot, int n, double* out);
sg_status sg_translation_energy(const sg_metric* metric, double r, double ell, double* out);
sg_status sg_shrink_grow_energy(const sg_metric* metric, double r, double* out);
sg_status sg_crossover_length(const sg_metric* metric, double r, double* out);
sg_status sg_optimal_translation_radius(double A, int k, double* out);
sg_status sg_completeness(const sg_metric* metric, int n, int* complete_at_zero,
                          int* complete_at_infinity);

/* Boundary-value closed form r(0)=r0, r(1)=r1 sampled uniformly; writes a
 * t,r,r_t CSV. */
sg_status sg_sphere_bvp_csv(const sg_metric* metric, double r0, double r1, int samples,
                            const char* csv_path);
/* Initial-value integration; collapsed reports whether the radius hit zero
 * before t_end (may be NULL). */
sg_status sg_sphere_ivp_csv(const sg_metric* metric, double r0, double rdot0, double t_end,
                            int samples, const char* csv_path, int* collapsed);

#ifdef __cplusplus
}
#endif

#endif /* SHAPEGEO_H */
