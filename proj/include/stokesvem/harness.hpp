// Manufactured solutions, error norms and the example drivers behind the CLI.
#pragma once

#include "stokesvem/system.hpp"

#include <iosfwd>
#include <limits>

namespace svem {

/// Exact Stokes pair. grad_u(x)(i, j) = d u_i / d x_j. The load is
/// f = -nu div eps(u) - grad p, matching nu (eps u, eps v) + (div v, p) = (f, v).
struct ExactSolution {
  std::string name;
  VectorFunction u;
  std::function<Eigen::Matrix2d(const Vec2&)> grad_u;
  ScalarFunction p;
  /// Load for a given viscosity.
  std::function<VectorFunction(double nu)> load;
  /// Whether u has a nonzero trace on the domain boundary.
  bool inhomogeneous = false;
};

/// k = 2: u = (x^2, -2xy), p = x - y. k >= 3: u = (2x^2 y, -2xy^2), p = x^2 - y^2.
ExactSolution patch_solution(int k);
/// Smooth divergence-free flow on the unit square with zero trace.
ExactSolution square_solution();
/// Stream-function flow on the L-shaped domain with p = 1/(x^2+1) - pi/4.
ExactSolution lshape_solution();
/// u = 0 with load (0, Ra (1 - y + 3y^2)); the pressure balancing it is
/// -Ra (y^3 - y^2/2 + y - 7/12).
ExactSolution noflow_solution(double ra);

constexpr double no_value = std::numeric_limits<double>::quiet_NaN();

struct ErrorNorms {
  double u_l2 = 0.0;
  double eps = 0.0;
  double p = 0.0;
  double p_neg = 0.0;              ///< ||p + p_h||
  double p_reduced = no_value;     ///< ||p - p_tilde|| for the reduced method
  double div_max = 0.0;            ///< max over cells of ||div Pi u_h||_{0,K}
};

/// L2 errors of Pi_h u_h, eps(Pi_h u_h) and p_h by per-cell quadrature.
ErrorNorms error_norms(const Discretization& disc, const DiscreteSolution& sol, const ExactSolution& exact,
                       int quad_degree = -1);

enum class MeshKind { Triangles, Hexagons };

MeshKind parse_mesh_kind(const std::string& name);

struct ExampleConfig {
  std::string example = "lshape"; ///< noflow | lshape | patch | custom
  Method method = Method::Standard;
  int k = 2;
  int levels = 4;
  std::vector<double> ra{1.0};
  MeshKind mesh = MeshKind::Triangles;
  std::string mesh_file; ///< custom example only
  double nu = 1.0;
  bool iterative = false;
};

struct ReportRow {
  std::string method;
  int k = 2;
  int level = 0;
  int cells = 0;
  double h = 0.0;
  double ra = no_value;
  ErrorNorms err;
  double order_u = no_value, order_eps = no_value, order_p = no_value, order_p_reduced = no_value;
  double equiv_velocity = no_value; ///< max DoF difference to the standard solution
  double equiv_mean = no_value;     ///< ||p_tilde - Q0 p_h||
  double equiv_pressure = no_value; ///< ||p_recovered - p_h||
  double residual = 0.0;
  double seconds = 0.0;
};

struct Report {
  std::string example;
  std::vector<ReportRow> rows;
  std::vector<std::string> notes;
};

/// Fills observed orders within each (method, ra) series when h halves within 5%.
void compute_orders(std::vector<ReportRow>& rows);

Report run_example(const ExampleConfig& config);
Report run_example_noflow(const ExampleConfig& config);
Report run_example_lshape(const ExampleConfig& config);
Report run_example_patch(const ExampleConfig& config);
Report run_example_custom(const ExampleConfig& config);

/// Deterministic CSV with one line per row.
void write_csv(const Report& report, std::ostream& os);
void write_csv(const Report& report, const std::string& path);

/// Levels-as-columns table with order rows, one block per method.
std::string format_table(const Report& report);

struct CheckResult {
  bool passed = true;
  std::vector<std::string> messages;
};

/// Acceptance logic for a finished run: rates within +-0.25 of target over the
/// last two orders, round-off bounds for patch and no-flow runs.
CheckResult check_report(const Report& report, const ExampleConfig& config);

} // namespace svem
