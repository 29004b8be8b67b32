/* C interface to the bang-bang optimal control adaptive FEM library.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a bbafem_status; on
 * failure bbafem_last_error() describes the problem (thread-local). */
#ifndef BBAFEM_BBAFEM_H
#define BBAFEM_BBAFEM_H

#include <stddef.h>
#include <stdint.h>

#if defined(BBAFEM_BUILDING_LIBRARY)
#define BBAFEM_API __attribute__((visibility("default")))
#else
#define BBAFEM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bbafem_status {
  BBAFEM_OK = 0,
  BBAFEM_ERROR_INVALID_ARGUMENT = 1,
  BBAFEM_ERROR_SOLVER = 2,
  BBAFEM_ERROR_IO = 3,
  BBAFEM_ERROR_INTERNAL = 4
} bbafem_status;

typedef struct bbafem_mesh bbafem_mesh;
typedef struct bbafem_problem bbafem_problem;
typedef struct bbafem_solution bbafem_solution;
typedef struct bbafem_record bbafem_record;

BBAFEM_API const char* bbafem_last_error(void);
BBAFEM_API const char* bbafem_version(void);

/* ---- meshes ------------------------------------------------------------ */

/* domain: "unit_square", "lshape_sw" or "lshape_ne". */
BBAFEM_API bbafem_status bbafem_mesh_generate(const char* domain, int n, bbafem_mesh** out);
BBAFEM_API void bbafem_mesh_free(bbafem_mesh* mesh);
BBAFEM_API size_t bbafem_mesh_num_vertices(const bbafem_mesh* mesh);
BBAFEM_API size_t bbafem_mesh_num_elements(const bbafem_mesh* mesh);
/* Twice the number of interior vertices. */
BBAFEM_API size_t bbafem_mesh_ndofs(const bbafem_mesh* mesh);
BBAFEM_API double bbafem_mesh_total_area(const bbafem_mesh* mesh);
/* xy receives 2 * num_vertices values. */
BBAFEM_API bbafem_status bbafem_mesh_vertices(const bbafem_mesh* mesh, double* xy, size_t capacity);
/* tri receives 3 * num_elements zero-based vertex indices. */
BBAFEM_API bbafem_status bbafem_mesh_elements(const bbafem_mesh* mesh, int32_t* tri, size_t capacity);
BBAFEM_API bbafem_status bbafem_mesh_bisect(const bbafem_mesh* mesh, const int32_t* marked, size_t count,
                                            bbafem_mesh** out);
BBAFEM_API bbafem_status bbafem_mesh_uniform_refine(const bbafem_mesh* mesh, bbafem_mesh** out);
BBAFEM_API bbafem_status bbafem_mesh_export(const bbafem_mesh* mesh, const char* coordinates_path,
                                            const char* elements_path);

/* ---- problems and single-mesh solves ------------------------------------ */

/* name: "ex1", "ex2" or "ex3". */
BBAFEM_API bbafem_status bbafem_problem_create(const char* name, bbafem_problem** out);
BBAFEM_API void bbafem_problem_free(bbafem_problem* problem);
/* Domain name of the problem; valid while the handle lives. */
BBAFEM_API const char* bbafem_problem_domain(const bbafem_problem* problem);
BBAFEM_API int bbafem_problem_has_exact(const bbafem_problem* problem);

typedef struct bbafem_solver_options {
  double fp_tol;
  int fp_max_iter;
  double damping;
  int auto_damping;
  double cg_tol;
} bbafem_solver_options;

BBAFEM_API bbafem_solver_options bbafem_solver_options_default(void);

typedef struct bbafem_solution_info {
  int converged;
  int iterations;
  size_t ndofs;
  double est_y;
  double est_p_2;
  double est_p_inf;
  double total_estimate;
  double iota;
  /* NaN when the problem has no exact solution. */
  double error_y;
  double error_p;
  double error_u;
  double eff_index;
} bbafem_solution_info;

/* Returns BBAFEM_ERROR_SOLVER (and no solution) when the fixed point does not
 * converge; the message names the iteration count. */
BBAFEM_API bbafem_status bbafem_solve(const bbafem_problem* problem, const bbafem_mesh* mesh,
                                      const bbafem_solver_options* options, bbafem_solution** out);
BBAFEM_API void bbafem_solution_free(bbafem_solution* solution);
BBAFEM_API bbafem_status bbafem_solution_info_get(const bbafem_solution* solution, bbafem_solution_info* info);
/* Vertex values; capacity must be at least the vertex count. */
BBAFEM_API bbafem_status bbafem_solution_state(const bbafem_solution* solution, double* values, size_t capacity);
BBAFEM_API bbafem_status bbafem_solution_adjoint(const bbafem_solution* solution, double* values, size_t capacity);
/* Per-element E_T; capacity must be at least the element count. */
BBAFEM_API bbafem_status bbafem_solution_indicators(const bbafem_solution* solution, double* values, size_t capacity);

/* Maximum-strategy marking. marked must hold count entries; *marked_count
 * receives the number written. */
BBAFEM_API bbafem_status bbafem_mark(const double* indicators, size_t count, double fraction, int32_t* marked,
                                     size_t* marked_count);
BBAFEM_API bbafem_status bbafem_fit_rate(const double* dofs, const double* values, size_t count, size_t last,
                                         double* rate);

/* ---- convergence studies ------------------------------------------------ */

typedef struct bbafem_run_config {
  const char* problem;    /* "ex1" | "ex2" | "ex3" */
  const char* mode;       /* "uniform" | "adaptive" */
  size_t max_ndofs;
  double mark_fraction;
  double cg_tol;
  double fp_tol;
  int fp_max_iter;
  double fp_damping;   /* used when fp_auto_damping is 0 */
  int fp_auto_damping;
  int initial_n;
  const char* output_dir;
  int export_meshes;
  uint64_t seed;
} bbafem_run_config;

BBAFEM_API bbafem_run_config bbafem_run_config_default(void);

/* Writes errors_<problem>_<mode>.dat into output_dir. On BBAFEM_ERROR_SOLVER a
 * partial record is still returned through *out. */
BBAFEM_API bbafem_status bbafem_run(const bbafem_run_config* config, bbafem_record** out);
BBAFEM_API void bbafem_record_free(bbafem_record* record);
BBAFEM_API size_t bbafem_record_num_rows(const bbafem_record* record);
BBAFEM_API bbafem_status bbafem_record_value(const bbafem_record* record, size_t row, const char* column, double* value);
BBAFEM_API bbafem_status bbafem_record_fit_rate(const bbafem_record* record, const char* column, size_t last,
                                                double* rate);
BBAFEM_API const char* bbafem_record_table_path(const bbafem_record* record);

/* Renders the merged comparison table of the given .dat files. The string is
 * released with bbafem_string_free. */
BBAFEM_API bbafem_status bbafem_table_render(const char* const* paths, size_t count, size_t last, char** out);
BBAFEM_API void bbafem_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* BBAFEM_BBAFEM_H */
