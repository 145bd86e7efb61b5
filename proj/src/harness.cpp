#include "stokesvem/harness.hpp"

#include "stokesvem/error.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

namespace svem {

namespace {

using std::numbers::pi;

// One-variable polynomial with ascending coefficients.
struct Poly1 {
  std::vector<double> c;

  double eval(double x, int derivative = 0) const {
    double s = 0.0;
    for (int i = static_cast<int>(c.size()) - 1; i >= derivative; --i) {
      double f = 1.0;
      for (int d = 0; d < derivative; ++d) f *= i - d;
      s = s * x + f * c[i];
    }
    return s;
  }
};

// Values of A = a^2 and its first three derivatives.
std::array<double, 4> squared(const Poly1& a, double x) {
  const double v = a.eval(x), d1 = a.eval(x, 1), d2 = a.eval(x, 2), d3 = a.eval(x, 3);
  return {v * v, 2 * v * d1, 2 * d1 * d1 + 2 * v * d2, 6 * d1 * d2 + 2 * v * d3};
}

// u = curl(a(x)^2 b(y)^2) = (A B', -A' B).
ExactSolution stream_solution(std::string name, Poly1 a, Poly1 b, ScalarFunction p, VectorFunction grad_p) {
  ExactSolution s;
  s.name = std::move(name);
  s.u = [a, b](const Vec2& x) {
    const auto A = squared(a, x.x());
    const auto B = squared(b, x.y());
    return Vec2(A[0] * B[1], -A[1] * B[0]);
  };
  s.grad_u = [a, b](const Vec2& x) {
    const auto A = squared(a, x.x());
    const auto B = squared(b, x.y());
    Eigen::Matrix2d g;
    g << A[1] * B[1], A[0] * B[2], -A[2] * B[0], -A[1] * B[1];
    return g;
  };
  s.p = std::move(p);
  s.load = [a, b, grad_p](double nu) -> VectorFunction {
    return [a, b, grad_p, nu](const Vec2& x) {
      const auto A = squared(a, x.x());
      const auto B = squared(b, x.y());
      // div eps(u) = Laplacian(u) / 2 for divergence-free u.
      const Vec2 lap(A[2] * B[1] + A[0] * B[3], -A[3] * B[0] - A[1] * B[2]);
      return Vec2(-0.5 * nu * lap - grad_p(x));
    };
  };
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

ExactSolution patch_solution(int k) {
  ExactSolution s;
  s.inhomogeneous = true;
  if (k <= 2) {
    s.name = "patch2";
    s.u = [](const Vec2& x) { return Vec2(x.x() * x.x(), -2.0 * x.x() * x.y()); };
    s.grad_u = [](const Vec2& x) {
      Eigen::Matrix2d g;
      g << 2.0 * x.x(), 0.0, -2.0 * x.y(), -2.0 * x.x();
      return g;
    };
    s.p = [](const Vec2& x) { return x.x() - x.y(); };
    s.load = [](double nu) -> VectorFunction { return [nu](const Vec2&) { return Vec2(-nu - 1.0, 1.0); }; };
  } else {
    s.name = "patch3";
    s.u = [](const Vec2& x) { return Vec2(2.0 * x.x() * x.x() * x.y(), -2.0 * x.x() * x.y() * x.y()); };
    s.grad_u = [](const Vec2& x) {
      Eigen::Matrix2d g;
      g << 4.0 * x.x() * x.y(), 2.0 * x.x() * x.x(), -2.0 * x.y() * x.y(), -4.0 * x.x() * x.y();
      return g;
    };
    s.p = [](const Vec2& x) { return x.x() * x.x() - x.y() * x.y(); };
    s.load = [](double nu) -> VectorFunction {
      return [nu](const Vec2& x) {
        return Vec2(-2.0 * nu * x.y() - 2.0 * x.x(), 2.0 * nu * x.x() + 2.0 * x.y());
      };
    };
  }
  return s;
}

ExactSolution square_solution() {
  const Poly1 a{{0.0, -1.0, 1.0}};
  return stream_solution(
      "square", a, a, [](const Vec2& x) { return std::cos(pi * x.x()) * std::cos(pi * x.y()); },
      [](const Vec2& x) {
        return Vec2(-pi * std::sin(pi * x.x()) * std::cos(pi * x.y()), -pi * std::cos(pi * x.x()) * std::sin(pi * x.y()));
      });
}

ExactSolution lshape_solution() {
  const Poly1 a{{0.0, -1.0, 0.0, 1.0}};
  return stream_solution(
      "lshape", a, a, [](const Vec2& x) { return 1.0 / (x.x() * x.x() + 1.0) - pi / 4.0; },
      [](const Vec2& x) {
        const double d = x.x() * x.x() + 1.0;
        return Vec2(-2.0 * x.x() / (d * d), 0.0);
      });
}

ExactSolution noflow_solution(double ra) {
  ExactSolution s;
  s.name = "noflow";
  s.u = [](const Vec2&) { return Vec2(0.0, 0.0); };
  s.grad_u = [](const Vec2&) { return Eigen::Matrix2d::Zero().eval(); };
  s.p = [ra](const Vec2& x) {
    const double y = x.y();
    return -ra * (y * y * y - y * y / 2.0 + y - 7.0 / 12.0);
  };
  s.load = [ra](double) -> VectorFunction {
    return [ra](const Vec2& x) { return Vec2(0.0, ra * (1.0 - x.y() + 3.0 * x.y() * x.y())); };
  };
  return s;
}

ErrorNorms error_norms(const Discretization& disc, const DiscreteSolution& sol, const ExactSolution& exact,
                       int quad_degree) {
  const int k = disc.k();
  const int qd = quad_degree < 0 ? 2 * k + 4 : quad_degree;
  const PolyMesh& mesh = disc.mesh();

  // The discrete pressure has zero mean; compare against the zero-mean exact one.
  double p_int = 0.0, area = 0.0;
  std::vector<QuadratureRule> rules(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    rules[c] = cell_quadrature(mesh.geometry(c), qd);
    for (std::size_t q = 0; q < rules[c].size(); ++q) p_int += rules[c].weights[q] * exact.p(rules[c].points[q]);
    area += mesh.geometry(c).area;
  }
  const double p_mean = p_int / area;

  ErrorNorms n;
  double eu = 0.0, ee = 0.0, ep = 0.0, en = 0.0, er = 0.0;
  const bool reduced = sol.method == Method::Reduced;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const VemElement& el = disc.cell(c).element;
    const int nk = el.basis_k().dim();
    const Eigen::VectorXd& pc = sol.pi[c];
    const Eigen::VectorXd dc = divergence_coeffs(el.basis_k(), pc);
    n.div_max = std::max(n.div_max, std::sqrt(std::max(dc.dot(el.scalar_gram(k - 1) * dc), 0.0)));
    for (std::size_t q = 0; q < rules[c].size(); ++q) {
      const Vec2& x = rules[c].points[q];
      const double w = rules[c].weights[q];
      const Eigen::VectorXd m = el.basis_k().eval(x);
      const Eigen::MatrixX2d g = el.basis_k().eval_grad(x);
      const Vec2 uh(m.dot(pc.head(nk)), m.dot(pc.tail(nk)));
      const Eigen::Vector2d g1 = g.transpose() * pc.head(nk);
      const Eigen::Vector2d g2 = g.transpose() * pc.tail(nk);
      const Eigen::Matrix2d gu = exact.grad_u(x);
      const double dxx = gu(0, 0) - g1.x();
      const double dyy = gu(1, 1) - g2.y();
      const double dxy = 0.5 * (gu(0, 1) + gu(1, 0)) - 0.5 * (g1.y() + g2.x());
      eu += w * (exact.u(x) - uh).squaredNorm();
      ee += w * (dxx * dxx + dyy * dyy + 2.0 * dxy * dxy);
      const double p = exact.p(x) - p_mean;
      const double ph = el.basis_k1().eval(x).dot(sol.pressure[c]);
      ep += w * (p - ph) * (p - ph);
      en += w * (p + ph) * (p + ph);
      if (reduced) er += w * (p - sol.pressure_mean[c]) * (p - sol.pressure_mean[c]);
    }
  }
  n.u_l2 = std::sqrt(eu);
  n.eps = std::sqrt(ee);
  n.p = std::sqrt(ep);
  n.p_neg = std::sqrt(en);
  if (reduced) n.p_reduced = std::sqrt(er);
  return n;
}

MeshKind parse_mesh_kind(const std::string& name) {
  if (name == "tri") return MeshKind::Triangles;
  if (name == "hex") return MeshKind::Hexagons;
  fail(ErrorKind::InvalidArgument, "unknown mesh kind '" + name + "' (expected tri or hex)");
}

void compute_orders(std::vector<ReportRow>& rows) {
  std::map<std::pair<std::string, double>, int> last;
  auto order = [](double prev, double cur) {
    if (!(prev > 0.0) || !(cur > 0.0)) return no_value;
    return std::log2(prev / cur);
  };
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    ReportRow& r = rows[i];
    const auto key = std::make_pair(r.method, std::isnan(r.ra) ? -1.0 : r.ra);
    const auto it = last.find(key);
    if (it != last.end()) {
      const ReportRow& p = rows[it->second];
      if (std::abs(p.h / r.h - 2.0) <= 0.1) {
        r.order_u = order(p.err.u_l2, r.err.u_l2);
        r.order_eps = order(p.err.eps, r.err.eps);
        r.order_p = order(p.err.p, r.err.p);
        r.order_p_reduced = order(p.err.p_reduced, r.err.p_reduced);
      }
    }
    last[key] = i;
  }
}

namespace {

PolyMesh square_mesh(MeshKind kind, int level, int base) {
  const int n = base << level;
  return kind == MeshKind::Triangles ? generate_uniform_triangles(n, n) : generate_hex_dominant(n);
}

struct LevelRun {
  DiscreteSolution sol;
  ReportRow row;
};

LevelRun run_level(const Discretization& disc, const ExactSolution& exact, const ExampleConfig& cfg, Method method,
                   int level, double ra) {
  const auto t0 = std::chrono::steady_clock::now();
  ProblemData data;
  data.nu = cfg.nu;
  data.load = exact.load(cfg.nu);
  if (exact.inhomogeneous) data.dirichlet = exact.u;
  SolverOptions opt;
  opt.iterative = cfg.iterative;
  LevelRun run{solve_stokes(disc, data, method, opt), {}};
  ReportRow& r = run.row;
  r.method = method_name(method);
  r.k = disc.k();
  r.level = level;
  r.cells = disc.mesh().num_cells();
  r.h = disc.mesh().h_max();
  r.ra = ra;
  r.err = error_norms(disc, run.sol, exact);
  r.residual = run.sol.residual;
  r.seconds = seconds_since(t0);
  return run;
}

// Theorem-style equivalence numbers between a reduced and a standard solution.
void fill_equivalence(const Discretization& disc, const DiscreteSolution& reduced, const DiscreteSolution& standard,
                      ReportRow& row) {
  row.equiv_velocity = (reduced.velocity - standard.velocity).cwiseAbs().maxCoeff();
  double mean = 0.0, full = 0.0;
  for (int c = 0; c < disc.mesh().num_cells(); ++c) {
    const double area = disc.mesh().geometry(c).area;
    const double dm = reduced.pressure_mean[c] - standard.pressure_mean[c];
    mean += area * dm * dm;
    const Eigen::VectorXd d = reduced.pressure[c] - standard.pressure[c];
    full += d.dot(disc.cell(c).element.scalar_gram(disc.k() - 1) * d);
  }
  row.equiv_mean = std::sqrt(mean);
  row.equiv_pressure = std::sqrt(std::max(full, 0.0));
}

} // namespace

Report run_example_noflow(const ExampleConfig& cfg) {
  if (cfg.method == Method::Reduced)
    fail(ErrorKind::InvalidArgument, "the no-flow example compares the standard and robust methods only");
  Report rep;
  rep.example = "noflow";
  for (int level = 0; level < cfg.levels; ++level) {
    const Discretization disc(square_mesh(cfg.mesh, level, cfg.mesh == MeshKind::Triangles ? 4 : 2), cfg.k);
    for (double ra : cfg.ra) rep.rows.push_back(run_level(disc, noflow_solution(ra), cfg, cfg.method, level, ra).row);
  }
  compute_orders(rep.rows);
  double pos = 0.0, neg = 0.0;
  for (const auto& r : rep.rows) {
    pos += r.err.p;
    neg += r.err.p_neg;
  }
  rep.notes.push_back(pos <= neg ? "pressure sign: p_h approximates -Ra (y^3 - y^2/2 + y - 7/12), i.e. ||p - p_h|| is the small one"
                                 : "pressure sign: p_h approximates +Ra (y^3 - y^2/2 + y - 7/12), i.e. ||p + p_h|| is the small one");
  return rep;
}

Report run_example_lshape(const ExampleConfig& cfg) {
  Report rep;
  rep.example = "lshape";
  const ExactSolution exact = lshape_solution();
  const LShapeCells kind = cfg.mesh == MeshKind::Triangles ? LShapeCells::Triangles : LShapeCells::Polygons;
  std::vector<ReportRow> standard_rows, other_rows;
  for (int level = 0; level < cfg.levels; ++level) {
    const Discretization disc(generate_lshape((kind == LShapeCells::Triangles ? 4 : 2) << level, kind), cfg.k);
    if (cfg.method == Method::Robust) {
      other_rows.push_back(run_level(disc, exact, cfg, Method::Robust, level, no_value).row);
      continue;
    }
    LevelRun std_run = run_level(disc, exact, cfg, Method::Standard, level, no_value);
    standard_rows.push_back(std_run.row);
    if (cfg.method == Method::Reduced) {
      LevelRun red = run_level(disc, exact, cfg, Method::Reduced, level, no_value);
      fill_equivalence(disc, red.sol, std_run.sol, red.row);
      other_rows.push_back(red.row);
    }
  }
  rep.rows = standard_rows;
  rep.rows.insert(rep.rows.end(), other_rows.begin(), other_rows.end());
  compute_orders(rep.rows);
  return rep;
}

Report run_example_patch(const ExampleConfig& cfg) {
  Report rep;
  rep.example = "patch";
  const ExactSolution exact = patch_solution(cfg.k);
  for (int level = 0; level < cfg.levels; ++level) {
    const Discretization disc(square_mesh(cfg.mesh, level, 2), cfg.k);
    rep.rows.push_back(run_level(disc, exact, cfg, cfg.method, level, no_value).row);
  }
  compute_orders(rep.rows);
  return rep;
}

Report run_example_custom(const ExampleConfig& cfg) {
  Report rep;
  rep.example = "custom";
  ExactSolution exact = square_solution();
  exact.inhomogeneous = true;
  if (!cfg.mesh_file.empty()) {
    LoadedMesh loaded = load_mesh(cfg.mesh_file);
    for (auto& w : loaded.warnings) rep.notes.push_back("mesh: " + w);
    const Discretization disc(loaded.mesh, cfg.k);
    rep.rows.push_back(run_level(disc, exact, cfg, cfg.method, 0, no_value).row);
    return rep;
  }
  for (int level = 0; level < cfg.levels; ++level) {
    const Discretization disc(square_mesh(cfg.mesh, level, cfg.mesh == MeshKind::Triangles ? 4 : 2), cfg.k);
    rep.rows.push_back(run_level(disc, exact, cfg, cfg.method, level, no_value).row);
  }
  compute_orders(rep.rows);
  return rep;
}

Report run_example(const ExampleConfig& cfg) {
  if (cfg.k < 2) fail(ErrorKind::InvalidArgument, "k must be >= 2");
  if (cfg.levels < 1) fail(ErrorKind::InvalidArgument, "levels must be >= 1");
  if (!(cfg.nu > 0.0)) fail(ErrorKind::InvalidArgument, "viscosity must be positive");
  if (cfg.example == "noflow") return run_example_noflow(cfg);
  if (cfg.example == "lshape") return run_example_lshape(cfg);
  if (cfg.example == "patch") return run_example_patch(cfg);
  if (cfg.example == "custom") return run_example_custom(cfg);
  fail(ErrorKind::InvalidArgument, "unknown example '" + cfg.example + "' (expected noflow, lshape, patch or custom)");
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10e", v);
  return buf;
}

std::string short_num(double v, const char* fmt) {
  if (std::isnan(v)) return "--";
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

} // namespace

void write_csv(const Report& report, std::ostream& os) {
  os << "method,k,level,cells,h,err_u_L2,err_eps,err_p,err_p_reduced,order_u_L2,order_eps,order_p,order_p_reduced,"
        "ra,err_p_neg,equiv_velocity,equiv_mean,equiv_pressure\n";
  for (const auto& r : report.rows) {
    os << r.method << ',' << r.k << ',' << r.level << ',' << r.cells << ',' << num(r.h) << ',' << num(r.err.u_l2) << ','
       << num(r.err.eps) << ',' << num(r.err.p) << ',' << num(r.err.p_reduced) << ',' << num(r.order_u) << ','
       << num(r.order_eps) << ',' << num(r.order_p) << ',' << num(r.order_p_reduced) << ',' << num(r.ra) << ','
       << num(r.err.p_neg) << ',' << num(r.equiv_velocity) << ',' << num(r.equiv_mean) << ','
       << num(r.equiv_pressure) << '\n';
  }
}

void write_csv(const Report& report, const std::string& path) {
  std::ofstream f(path);
  if (!f) fail(ErrorKind::Io, "cannot open '" + path + "' for writing");
  write_csv(report, f);
  if (!f) fail(ErrorKind::Io, "failed writing '" + path + "'");
}

std::string format_table(const Report& report) {
  std::map<std::pair<std::string, double>, std::vector<const ReportRow*>> series;
  std::vector<std::pair<std::string, double>> order;
  for (const auto& r : report.rows) {
    const auto key = std::make_pair(r.method, std::isnan(r.ra) ? -1.0 : r.ra);
    if (!series.count(key)) order.push_back(key);
    series[key].push_back(&r);
  }
  std::ostringstream os;
  for (const auto& key : order) {
    const auto& rows = series[key];
    os << "method " << key.first << ", k = " << rows.front()->k;
    if (key.second >= 0.0) os << ", Ra = " << short_num(key.second, "%g");
    os << "\n";
    auto line = [&](const std::string& label, auto get, const char* fmt) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%-26s", label.c_str());
      os << buf;
      for (const ReportRow* r : rows) {
        std::snprintf(buf, sizeof buf, " %12s", short_num(get(*r), fmt).c_str());
        os << buf;
      }
      os << "\n";
    };
    line("#cells", [](const ReportRow& r) { return static_cast<double>(r.cells); }, "%.0f");
    line("||u - Pi u_h||_0", [](const ReportRow& r) { return r.err.u_l2; }, "%.4e");
    line("  order", [](const ReportRow& r) { return r.order_u; }, "%.2f");
    const bool reduced = key.first == "reduced";
    if (reduced) {
      line("||p - p~_h||_0", [](const ReportRow& r) { return r.err.p_reduced; }, "%.4e");
      line("  order", [](const ReportRow& r) { return r.order_p_reduced; }, "%.2f");
    }
    line("||eps(u) - eps(Pi u_h)||_0", [](const ReportRow& r) { return r.err.eps; }, "%.4e");
    line("  order", [](const ReportRow& r) { return r.order_eps; }, "%.2f");
    line("||p - p_h||_0", [](const ReportRow& r) { return r.err.p; }, "%.4e");
    line("  order", [](const ReportRow& r) { return r.order_p; }, "%.2f");
    if (reduced) {
      line("max |u~_h - u_h| (DoF)", [](const ReportRow& r) { return r.equiv_velocity; }, "%.2e");
      line("||p~_h - Q0 p_h||_0", [](const ReportRow& r) { return r.equiv_mean; }, "%.2e");
    }
    os << "\n";
  }
  for (const auto& n : report.notes) os << n << "\n";
  return os.str();
}

CheckResult check_report(const Report& report, const ExampleConfig& cfg) {
  CheckResult res;
  auto require = [&](bool ok, const std::string& msg) {
    res.messages.push_back(std::string(ok ? "ok:   " : "FAIL: ") + msg);
    if (!ok) res.passed = false;
  };
  auto fmt = [](double v) { return short_num(v, "%.3e"); };

  if (report.example == "patch") {
    for (const auto& r : report.rows) {
      const double worst = std::max({r.err.u_l2, r.err.eps, r.err.p});
      require(worst < 1e-9, "patch level " + std::to_string(r.level) + " max error " + fmt(worst) + " < 1e-9");
    }
    return res;
  }

  if (report.example == "noflow") {
    std::map<int, std::vector<const ReportRow*>> by_level;
    for (const auto& r : report.rows) by_level[r.level].push_back(&r);
    for (const auto& [level, rows] : by_level) {
      for (const ReportRow* r : rows) {
        if (r->ra == 0.0) require(r->err.eps < 1e-12, "Ra = 0 gives zero velocity error");
        else if (r->method == "robust")
          require(r->err.eps < 1e-7, "robust level " + std::to_string(level) + " Ra " + short_num(r->ra, "%g") +
                                         " eps error " + fmt(r->err.eps) + " < 1e-7");
      }
      if (rows.front()->method != "standard") continue;
      const ReportRow* base = nullptr;
      for (const ReportRow* r : rows)
        if (r->ra > 0.0) {
          if (!base) {
            base = r;
            continue;
          }
          const double ratio = (r->err.eps / base->err.eps) / (r->ra / base->ra);
          require(std::abs(ratio - 1.0) < 0.01, "standard level " + std::to_string(level) + " error scales with Ra (ratio " +
                                                    short_num(ratio, "%.6f") + ")");
        }
    }
    return res;
  }

  // Convergence runs: last two orders within 0.25 of the target.
  const int k = cfg.k;
  std::map<std::string, std::vector<const ReportRow*>> series;
  for (const auto& r : report.rows) series[r.method].push_back(&r);
  auto rate = [&](const std::string& what, const std::vector<const ReportRow*>& rows, auto get, double target) {
    std::vector<double> orders;
    for (const ReportRow* r : rows)
      if (!std::isnan(get(*r))) orders.push_back(get(*r));
    if (orders.size() < 2) {
      require(false, what + ": need at least two observed orders (run 3 or more levels)");
      return;
    }
    const double a = orders[orders.size() - 2], b = orders.back();
    require(std::abs(a - target) <= 0.25 && std::abs(b - target) <= 0.25,
            what + " orders " + short_num(a, "%.2f") + ", " + short_num(b, "%.2f") + " target " + short_num(target, "%g"));
  };
  for (const auto& [method, rows] : series) {
    rate(method + " eps", rows, [](const ReportRow& r) { return r.order_eps; }, k);
    rate(method + " p", rows, [](const ReportRow& r) { return r.order_p; }, k);
    if (method == "reduced") {
      rate(method + " p~", rows, [](const ReportRow& r) { return r.order_p_reduced; }, 1.0);
      for (const ReportRow* r : rows) {
        if (std::isnan(r->equiv_velocity)) continue;
        require(r->equiv_velocity < 1e-9, "level " + std::to_string(r->level) + " reduced vs standard velocity " +
                                              fmt(r->equiv_velocity) + " < 1e-9");
        require(r->equiv_mean < 1e-9,
                "level " + std::to_string(r->level) + " ||p~_h - Q0 p_h|| " + fmt(r->equiv_mean) + " < 1e-9");
        require(r->equiv_pressure < 1e-8, "level " + std::to_string(r->level) + " recovered pressure vs p_h " +
                                              fmt(r->equiv_pressure) + " < 1e-8");
      }
    }
  }
  return res;
}

} // namespace svem
