#include "stokesvem/stokesvem.h"

#include "stokesvem/error.hpp"
#include "stokesvem/harness.hpp"

#include <cmath>
#include <memory>
#include <sstream>

using namespace svem;

struct svem_mesh {
  PolyMesh mesh;
  std::vector<std::string> warnings;
};

struct svem_solution {
  std::unique_ptr<Discretization> disc;
  DiscreteSolution sol;
};

struct svem_report {
  Report report;
  ExampleConfig config;
  std::string table;
  std::string messages;
};

namespace {

thread_local std::string last_error;

svem_status status_of(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InvalidArgument: return SVEM_ERR_INVALID_ARGUMENT;
  case ErrorKind::Parse: return SVEM_ERR_PARSE;
  case ErrorKind::Validation: return SVEM_ERR_VALIDATION;
  case ErrorKind::Geometry: return SVEM_ERR_GEOMETRY;
  case ErrorKind::Solver: return SVEM_ERR_SOLVER;
  case ErrorKind::Io: return SVEM_ERR_IO;
  case ErrorKind::Internal: return SVEM_ERR_INTERNAL;
  }
  return SVEM_ERR_INTERNAL;
}

template <class F> svem_status guarded(F&& body) {
  last_error.clear();
  try {
    body();
    return SVEM_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return SVEM_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return SVEM_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::InvalidArgument, what);
}

Method to_method(svem_method m) {
  switch (m) {
  case SVEM_METHOD_STANDARD: return Method::Standard;
  case SVEM_METHOD_ROBUST: return Method::Robust;
  case SVEM_METHOD_REDUCED: return Method::Reduced;
  }
  fail(ErrorKind::InvalidArgument, "unknown method");
}

VectorFunction wrap(svem_vector_fn fn, void* ctx) {
  if (!fn) return {};
  return [fn, ctx](const Vec2& x) {
    double out[2] = {0.0, 0.0};
    fn(x.x(), x.y(), ctx, out);
    return Vec2(out[0], out[1]);
  };
}

} // namespace

extern "C" {

const char* svem_version(void) { return "0.1.0"; }

const char* svem_last_error(void) { return last_error.c_str(); }

const char* svem_status_string(svem_status status) {
  switch (status) {
  case SVEM_OK: return "ok";
  case SVEM_ERR_INVALID_ARGUMENT: return "invalid argument";
  case SVEM_ERR_PARSE: return "parse error";
  case SVEM_ERR_VALIDATION: return "validation error";
  case SVEM_ERR_GEOMETRY: return "geometry error";
  case SVEM_ERR_SOLVER: return "solver error";
  case SVEM_ERR_IO: return "i/o error";
  case SVEM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

svem_status svem_mesh_generate(svem_mesh_kind kind, int n, double x0, double y0, double x1, double y1,
                               svem_mesh** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(n > 0, "mesh resolution must be positive");
    *out = nullptr;
    const Rect rect{x0, y0, x1, y1};
    switch (kind) {
    case SVEM_MESH_TRIANGLES: *out = new svem_mesh{generate_uniform_triangles(n, n, rect), {}}; break;
    case SVEM_MESH_HEXAGONS: *out = new svem_mesh{generate_hex_dominant(n, rect), {}}; break;
    case SVEM_MESH_LSHAPE_TRIANGLES: *out = new svem_mesh{generate_lshape(n, LShapeCells::Triangles), {}}; break;
    case SVEM_MESH_LSHAPE_POLYGONS: *out = new svem_mesh{generate_lshape(n, LShapeCells::Polygons), {}}; break;
    default: fail(ErrorKind::InvalidArgument, "unknown mesh kind");
    }
  });
}

svem_status svem_mesh_create(const double* xy, int num_vertices, const int* cell_offsets, const int* cell_indices,
                             int num_cells, svem_mesh** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(xy && cell_offsets && cell_indices, "null input array");
    require(num_vertices > 0 && num_cells > 0, "empty mesh");
    *out = nullptr;
    std::vector<Vec2> verts(num_vertices);
    for (int i = 0; i < num_vertices; ++i) verts[i] = Vec2(xy[2 * i], xy[2 * i + 1]);
    std::vector<std::vector<int>> cells(num_cells);
    for (int c = 0; c < num_cells; ++c) {
      require(cell_offsets[c + 1] >= cell_offsets[c], "cell offsets must be nondecreasing");
      cells[c].assign(cell_indices + cell_offsets[c], cell_indices + cell_offsets[c + 1]);
    }
    *out = new svem_mesh{PolyMesh(std::move(verts), std::move(cells)), {}};
  });
}

svem_status svem_mesh_load(const char* path, svem_mesh** out) {
  return guarded([&] {
    require(out != nullptr && path != nullptr, "null argument");
    *out = nullptr;
    LoadedMesh loaded = load_mesh(path);
    *out = new svem_mesh{std::move(loaded.mesh), std::move(loaded.warnings)};
  });
}

svem_status svem_mesh_save(const svem_mesh* mesh, const char* path) {
  return guarded([&] {
    require(mesh != nullptr && path != nullptr, "null argument");
    save_mesh(mesh->mesh, path);
  });
}

svem_status svem_mesh_info(const svem_mesh* mesh, int* num_vertices, int* num_edges, int* num_cells, double* h_max,
                           double* area) {
  return guarded([&] {
    require(mesh != nullptr, "mesh is null");
    if (num_vertices) *num_vertices = mesh->mesh.num_vertices();
    if (num_edges) *num_edges = mesh->mesh.num_edges();
    if (num_cells) *num_cells = mesh->mesh.num_cells();
    if (h_max) *h_max = mesh->mesh.h_max();
    if (area) *area = mesh->mesh.total_area();
  });
}

int svem_mesh_warning_count(const svem_mesh* mesh) { return mesh ? static_cast<int>(mesh->warnings.size()) : 0; }

const char* svem_mesh_warning(const svem_mesh* mesh, int index) {
  if (!mesh || index < 0 || index >= static_cast<int>(mesh->warnings.size())) return nullptr;
  return mesh->warnings[index].c_str();
}

void svem_mesh_free(svem_mesh* mesh) { delete mesh; }

svem_problem svem_problem_default(void) {
  svem_problem p{};
  p.k = 2;
  p.nu = 1.0;
  p.method = SVEM_METHOD_STANDARD;
  return p;
}

svem_status svem_solve(const svem_mesh* mesh, const svem_problem* problem, svem_solution** out) {
  return guarded([&] {
    require(mesh && problem && out, "null argument");
    require(problem->k >= 2, "k must be at least 2");
    require(problem->nu > 0.0, "nu must be positive");
    *out = nullptr;
    auto result = std::make_unique<svem_solution>();
    result->disc = std::make_unique<Discretization>(mesh->mesh, problem->k);
    ProblemData data;
    data.nu = problem->nu;
    data.load = wrap(problem->load, problem->load_ctx);
    data.dirichlet = wrap(problem->dirichlet, problem->dirichlet_ctx);
    SolverOptions opts;
    opts.iterative = problem->iterative != 0;
    result->sol = solve_stokes(*result->disc, data, to_method(problem->method), opts);
    *out = result.release();
  });
}

void svem_solution_free(svem_solution* solution) { delete solution; }

int svem_solution_num_dofs(const svem_solution* solution) {
  return solution ? static_cast<int>(solution->sol.velocity.size()) : 0;
}

svem_status svem_solution_velocity_dofs(const svem_solution* solution, double* buffer, int length) {
  return guarded([&] {
    require(solution && buffer, "null argument");
    const Eigen::VectorXd& v = solution->sol.velocity;
    require(length >= v.size(), "buffer too small");
    std::copy(v.data(), v.data() + v.size(), buffer);
  });
}

svem_status svem_solution_eval(const svem_solution* solution, int cell, double x, double y, double velocity[2],
                               double* pressure) {
  return guarded([&] {
    require(solution != nullptr, "solution is null");
    require(cell >= 0 && cell < solution->disc->mesh().num_cells(), "cell index out of range");
    const VemElement& el = solution->disc->cell(cell).element;
    const Vec2 p(x, y);
    if (velocity) {
      const Vec2 u = eval_vector(el.basis_k(), solution->sol.pi[cell], p);
      velocity[0] = u.x();
      velocity[1] = u.y();
    }
    if (pressure) *pressure = el.basis_k1().eval(p).dot(solution->sol.pressure[cell]);
  });
}

svem_status svem_solution_pressure_mean(const svem_solution* solution, int cell, double* value) {
  return guarded([&] {
    require(solution && value, "null argument");
    require(cell >= 0 && cell < solution->sol.pressure_mean.size(), "cell index out of range");
    *value = solution->sol.pressure_mean[cell];
  });
}

double svem_solution_residual(const svem_solution* solution) { return solution ? solution->sol.residual : NAN; }

svem_status svem_solution_errors(const svem_solution* solution, svem_vector_fn u, svem_tensor_fn grad_u,
                                 svem_scalar_fn p, void* ctx, double* err_u, double* err_eps, double* err_p) {
  return guarded([&] {
    require(solution && u && grad_u && p, "null argument");
    ExactSolution exact;
    exact.name = "user";
    exact.u = wrap(u, ctx);
    exact.grad_u = [grad_u, ctx](const Vec2& x) {
      double g[4] = {0, 0, 0, 0};
      grad_u(x.x(), x.y(), ctx, g);
      Eigen::Matrix2d m;
      m << g[0], g[1], g[2], g[3];
      return m;
    };
    exact.p = [p, ctx](const Vec2& x) { return p(x.x(), x.y(), ctx); };
    const ErrorNorms n = error_norms(*solution->disc, solution->sol, exact);
    if (err_u) *err_u = n.u_l2;
    if (err_eps) *err_eps = n.eps;
    if (err_p) *err_p = n.p;
  });
}

svem_example_config svem_example_default(void) {
  svem_example_config c{};
  c.example = "lshape";
  c.method = SVEM_METHOD_STANDARD;
  c.k = 2;
  c.levels = 4;
  c.nu = 1.0;
  return c;
}

svem_status svem_run_example(const svem_example_config* config, svem_report** out) {
  return guarded([&] {
    require(config && out, "null argument");
    require(config->example != nullptr, "example name is null");
    require(config->levels > 0, "levels must be positive");
    *out = nullptr;
    ExampleConfig cfg;
    cfg.example = config->example;
    cfg.method = to_method(config->method);
    cfg.k = config->k;
    cfg.levels = config->levels;
    if (config->ra && config->num_ra > 0) cfg.ra.assign(config->ra, config->ra + config->num_ra);
    cfg.mesh = config->mesh_hexagons ? MeshKind::Hexagons : MeshKind::Triangles;
    if (config->mesh_file) cfg.mesh_file = config->mesh_file;
    cfg.nu = config->nu;
    cfg.iterative = config->iterative != 0;
    auto rep = std::make_unique<svem_report>();
    rep->report = run_example(cfg);
    rep->config = cfg;
    *out = rep.release();
  });
}

int svem_report_num_rows(const svem_report* report) {
  return report ? static_cast<int>(report->report.rows.size()) : 0;
}

svem_status svem_report_row(const svem_report* report, int row, int* cells, double* h, double* err_u,
                            double* err_eps, double* err_p, double* err_p_reduced, double* ra) {
  return guarded([&] {
    require(report != nullptr, "report is null");
    require(row >= 0 && row < static_cast<int>(report->report.rows.size()), "row index out of range");
    const ReportRow& r = report->report.rows[row];
    if (cells) *cells = r.cells;
    if (h) *h = r.h;
    if (err_u) *err_u = r.err.u_l2;
    if (err_eps) *err_eps = r.err.eps;
    if (err_p) *err_p = r.err.p;
    if (err_p_reduced) *err_p_reduced = r.err.p_reduced;
    if (ra) *ra = r.ra;
  });
}

svem_status svem_report_write_csv(const svem_report* report, const char* path) {
  return guarded([&] {
    require(report && path, "null argument");
    write_csv(report->report, std::string(path));
  });
}

const char* svem_report_table(svem_report* report) {
  if (!report) return nullptr;
  report->table = format_table(report->report);
  return report->table.c_str();
}

svem_status svem_report_check(svem_report* report, int* passed, const char** messages) {
  return guarded([&] {
    require(report && passed, "null argument");
    const CheckResult res = check_report(report->report, report->config);
    *passed = res.passed ? 1 : 0;
    std::ostringstream os;
    for (const std::string& m : res.messages) os << m << '\n';
    report->messages = os.str();
    if (messages) *messages = report->messages.c_str();
  });
}

void svem_report_free(svem_report* report) { delete report; }

} // extern "C"
