/* C interface to the stokesvem solver.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every call returns an svem_status; on failure
 * svem_last_error() describes the problem for the calling thread. */
#ifndef STOKESVEM_H
#define STOKESVEM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define SVEM_API __declspec(dllexport)
#else
#define SVEM_API __attribute__((visibility("default")))
#endif

typedef enum svem_status {
  SVEM_OK = 0,
  SVEM_ERR_INVALID_ARGUMENT = 1,
  SVEM_ERR_PARSE = 2,
  SVEM_ERR_VALIDATION = 3,
  SVEM_ERR_GEOMETRY = 4,
  SVEM_ERR_SOLVER = 5,
  SVEM_ERR_IO = 6,
  SVEM_ERR_INTERNAL = 7
} svem_status;

typedef enum svem_method { SVEM_METHOD_STANDARD = 0, SVEM_METHOD_ROBUST = 1, SVEM_METHOD_REDUCED = 2 } svem_method;

typedef enum svem_mesh_kind {
  SVEM_MESH_TRIANGLES = 0, /* uniform diagonal split of an nx x ny grid */
  SVEM_MESH_HEXAGONS = 1,  /* hexagon tiling clipped to the rectangle, n rows */
  SVEM_MESH_LSHAPE_TRIANGLES = 2,
  SVEM_MESH_LSHAPE_POLYGONS = 3
} svem_mesh_kind;

typedef struct svem_mesh svem_mesh;
typedef struct svem_solution svem_solution;
typedef struct svem_report svem_report;

/* Vector field callback: writes the value at (x, y) into out[0], out[1]. */
typedef void (*svem_vector_fn)(double x, double y, void* ctx, double out[2]);
/* Scalar field callback. */
typedef double (*svem_scalar_fn)(double x, double y, void* ctx);

SVEM_API const char* svem_version(void);
/* Message of the most recent failure on this thread, "" if none. */
SVEM_API const char* svem_last_error(void);
SVEM_API const char* svem_status_string(svem_status status);

/* Meshes. For the rectangle kinds, n is the resolution and the domain is
 * [x0,x1] x [y0,y1]; for the L-shape kinds the rectangle is ignored. */
SVEM_API svem_status svem_mesh_generate(svem_mesh_kind kind, int n, double x0, double y0, double x1, double y1,
                                        svem_mesh** out);
SVEM_API svem_status svem_mesh_create(const double* xy, int num_vertices, const int* cell_offsets,
                                      const int* cell_indices, int num_cells, svem_mesh** out);
SVEM_API svem_status svem_mesh_load(const char* path, svem_mesh** out);
SVEM_API svem_status svem_mesh_save(const svem_mesh* mesh, const char* path);
SVEM_API svem_status svem_mesh_info(const svem_mesh* mesh, int* num_vertices, int* num_edges, int* num_cells,
                                    double* h_max, double* area);
/* Number of warnings produced while loading (e.g. reoriented cells). */
SVEM_API int svem_mesh_warning_count(const svem_mesh* mesh);
SVEM_API const char* svem_mesh_warning(const svem_mesh* mesh, int index);
SVEM_API void svem_mesh_free(svem_mesh* mesh);

/* Problem description for svem_solve. load and dirichlet may be NULL
 * (zero load, homogeneous boundary data). */
typedef struct svem_problem {
  int k;
  double nu;
  svem_method method;
  svem_vector_fn load;
  void* load_ctx;
  svem_vector_fn dirichlet;
  void* dirichlet_ctx;
  int iterative; /* nonzero: MINRES with a diagonal block preconditioner */
} svem_problem;

SVEM_API svem_problem svem_problem_default(void);
SVEM_API svem_status svem_solve(const svem_mesh* mesh, const svem_problem* problem, svem_solution** out);
SVEM_API void svem_solution_free(svem_solution* solution);

SVEM_API int svem_solution_num_dofs(const svem_solution* solution);
/* Copies the global velocity DoF vector into buffer (length >= num_dofs). */
SVEM_API svem_status svem_solution_velocity_dofs(const svem_solution* solution, double* buffer, int length);
/* Pi_h u_h and p_h evaluated at a point inside the given cell. */
SVEM_API svem_status svem_solution_eval(const svem_solution* solution, int cell, double x, double y, double velocity[2],
                                        double* pressure);
/* Cellwise mean pressure. */
SVEM_API svem_status svem_solution_pressure_mean(const svem_solution* solution, int cell, double* value);
SVEM_API double svem_solution_residual(const svem_solution* solution);

/* Errors against an exact pair: ||u - Pi u_h||, ||eps(u) - eps(Pi u_h)||,
 * ||p - p_h||. grad_u writes du_i/dx_j row-major into out[4]. */
typedef void (*svem_tensor_fn)(double x, double y, void* ctx, double out[4]);
SVEM_API svem_status svem_solution_errors(const svem_solution* solution, svem_vector_fn u, svem_tensor_fn grad_u,
                                          svem_scalar_fn p, void* ctx, double* err_u, double* err_eps, double* err_p);

/* Example drivers (noflow, lshape, patch, custom). */
typedef struct svem_example_config {
  const char* example;
  svem_method method;
  int k;
  int levels;
  const double* ra;
  int num_ra;
  int mesh_hexagons; /* 0: triangles, 1: hexagonal polygons */
  const char* mesh_file; /* custom example only; may be NULL */
  double nu;
  int iterative;
} svem_example_config;

SVEM_API svem_example_config svem_example_default(void);
SVEM_API svem_status svem_run_example(const svem_example_config* config, svem_report** out);
SVEM_API int svem_report_num_rows(const svem_report* report);
/* Row fields: cells, h, err_u, err_eps, err_p, err_p_reduced (NaN when not
 * applicable), ra (NaN when not applicable). */
SVEM_API svem_status svem_report_row(const svem_report* report, int row, int* cells, double* h, double* err_u,
                                     double* err_eps, double* err_p, double* err_p_reduced, double* ra);
SVEM_API svem_status svem_report_write_csv(const svem_report* report, const char* path);
/* Table text; valid until the report is freed. */
SVEM_API const char* svem_report_table(svem_report* report);
/* Runs the acceptance checks; *passed is 1 or 0. messages receives the
 * check log (valid until the report is freed) when non-NULL. */
SVEM_API svem_status svem_report_check(svem_report* report, int* passed, const char** messages);
SVEM_API void svem_report_free(svem_report* report);

#ifdef __cplusplus
}
#endif

#endif
