#include "support.hpp"

#include "stokesvem/error.hpp"

#include <doctest.h>

using namespace svem;
using namespace svem::test;

namespace {

double max_pressure_gap(const DiscreteSolution& a, const DiscreteSolution& b) {
  double m = 0.0;
  for (std::size_t c = 0; c < a.pressure.size(); ++c) m = std::max(m, (a.pressure[c] - b.pressure[c]).cwiseAbs().maxCoeff());
  return m;
}

double max_cell_divergence(const Discretization& disc, const DiscreteSolution& sol) {
  double m = 0.0;
  for (int c = 0; c < disc.mesh().num_cells(); ++c)
    m = std::max(m, (local_div_matrix(disc.cell(c).pack) * disc.gather(sol.velocity, c)).cwiseAbs().maxCoeff());
  return m;
}

} // namespace

TEST_CASE("unknown counts on the two-triangle square") {
  const Discretization disc(generate_uniform_triangles(1, 1), 2);
  const GlobalSystem sys = assemble(disc, ProblemData{}, Method::Standard);
  CHECK(sys.num_velocity == 8);
  CHECK(sys.num_pressure == 6);
  CHECK(sys.size() == 15);
  CHECK(disc.num_dofs() == 5 * 4 + 2 * 2);
}

TEST_CASE("degree below two is rejected") {
  try {
    Discretization disc(generate_uniform_triangles(1, 1), 1);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("global stiffness annihilates global rigid motions") {
  for (int k = 2; k <= 3; ++k) {
    const Discretization disc(generate_hex_dominant(3), k);
    std::vector<Eigen::Triplet<double>> trip;
    for (const CellBlock& cb : disc.cells())
      for (std::size_t i = 0; i < cb.dofs.size(); ++i)
        for (std::size_t j = 0; j < cb.dofs.size(); ++j)
          trip.emplace_back(cb.dofs[i], cb.dofs[j], cb.local.stiffness(i, j));
    Eigen::SparseMatrix<double> A(disc.num_dofs(), disc.num_dofs());
    A.setFromTriplets(trip.begin(), trip.end());
    for (const VectorFunction& rm : {VectorFunction([](const Vec2&) { return Vec2(1, 0); }),
                                     VectorFunction([](const Vec2&) { return Vec2(0, 1); }),
                                     VectorFunction([](const Vec2& x) { return Vec2(-x.y(), x.x()); })}) {
      const Eigen::VectorXd r = disc.interpolate(rm);
      CHECK((A * r).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("assembled matrix is symmetric") {
  const Discretization disc(generate_lshape(2, LShapeCells::Polygons), 3);
  const GlobalSystem sys = assemble(disc, ProblemData{}, Method::Robust);
  const Eigen::SparseMatrix<double> t = sys.matrix.transpose();
  CHECK((sys.matrix - t).norm() < 1e-13 * sys.matrix.norm());
}

TEST_CASE("zero data gives the zero solution") {
  const Discretization disc(generate_hex_dominant(2), 2);
  for (Method m : {Method::Standard, Method::Robust, Method::Reduced}) {
    const DiscreteSolution sol = solve_stokes(disc, ProblemData{}, m);
    CHECK(sol.velocity.cwiseAbs().maxCoeff() == 0.0);
    for (const auto& p : sol.pressure) CHECK(p.cwiseAbs().maxCoeff() == 0.0);
  }
  CHECK(recover_pressure(disc, ProblemData{}, Eigen::VectorXd::Zero(disc.num_dofs()))[0].norm() == 0.0);
}

TEST_CASE("polynomial Stokes pairs are reproduced") {
  for (int k = 2; k <= 3; ++k) {
    const ExactSolution ex = patch_solution(k);
    for (const PolyMesh& mesh : {generate_uniform_triangles(4, 4), generate_hex_dominant(4)}) {
      const Discretization disc(mesh, k);
      ProblemData data;
      data.nu = 1.0;
      data.load = ex.load(data.nu);
      data.dirichlet = ex.u;
      const Eigen::VectorXd target = disc.interpolate(ex.u);
      for (Method m : {Method::Standard, Method::Robust, Method::Reduced}) {
        CAPTURE(k);
        CAPTURE(method_name(m));
        const DiscreteSolution sol = solve_stokes(disc, data, m);
        CHECK((sol.velocity - target).cwiseAbs().maxCoeff() < 1e-9);
        const ErrorNorms err = error_norms(disc, sol, ex);
        CHECK(err.u_l2 < 1e-9);
        CHECK(err.eps < 1e-9);
        CHECK(err.p < 1e-9);
      }
    }
  }
}

TEST_CASE("discrete solutions are divergence free cell by cell") {
  const Discretization disc(generate_lshape(2, LShapeCells::Polygons), 2);
  const ExactSolution ex = lshape_solution();
  ProblemData data;
  data.load = ex.load(1.0);
  for (Method m : {Method::Standard, Method::Robust, Method::Reduced}) {
    const DiscreteSolution sol = solve_stokes(disc, data, m);
    CHECK(max_cell_divergence(disc, sol) < 1e-11);
    for (const auto& dc : sol.divergence) CHECK(dc.cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("pressure robustness: gradient loads leave the robust velocity at zero") {
  const Discretization disc(generate_hex_dominant(3), 2);
  for (double ra : {1.0, 1e4, 1e8}) {
    const ExactSolution ex = noflow_solution(ra);
    ProblemData data;
    data.load = ex.load(1.0);
    const DiscreteSolution robust = solve_stokes(disc, data, Method::Robust);
    const DiscreteSolution standard = solve_stokes(disc, data, Method::Standard);
    CHECK(robust.velocity.cwiseAbs().maxCoeff() < 1e-14 * ra);
    CHECK(standard.velocity.cwiseAbs().maxCoeff() > 1e-6 * ra);
  }
}

TEST_CASE("reduced method: extension, equivalence and pressure recovery") {
  for (int k = 2; k <= 3; ++k) {
    const VemElement el(generate_hex_dominant(2).geometry(2), k);
    const Eigen::MatrixXd E = reduced_extension(el);
    CHECK(E.rows() == el.layout().size());
    CHECK(E.cols() == el.layout().interior_offset() + el.layout().num_complement);
    if (k == 2) CHECK(E.cols() == el.layout().size() - 2);
    // Extended fields have constant divergence.
    Rng rng(40 + k);
    const Eigen::VectorXd v = E * rng.vector(static_cast<int>(E.cols()));
    const Eigen::VectorXd d = el.compute_projector().div * v;
    CHECK(d.tail(d.size() - 1).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, std::abs(d[0])));
  }

  for (int k = 2; k <= 3; ++k) {
    const Discretization disc(generate_lshape(2, LShapeCells::Triangles), k);
    const ExactSolution ex = lshape_solution();
    ProblemData data;
    data.load = ex.load(1.0);
    const DiscreteSolution full = solve_stokes(disc, data, Method::Standard);
    const DiscreteSolution red = solve_stokes(disc, data, Method::Reduced);
    CAPTURE(k);
    CHECK((full.velocity - red.velocity).cwiseAbs().maxCoeff() < 1e-9);
    CHECK((full.pressure_mean - red.pressure_mean).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(max_pressure_gap(full, red) < 1e-8);

    // p_perp has zero mean on every cell.
    const auto perp = recover_pressure(disc, data, full.velocity);
    for (int c = 0; c < disc.mesh().num_cells(); ++c) {
      const VemElement& el = disc.cell(c).element;
      const double mean = el.scalar_gram(k - 1).row(0).dot(perp[c]) / el.cell().area;
      CHECK(std::abs(mean) < 1e-12 * std::max(1.0, perp[c].cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("iterative solver agrees with the direct solver") {
  const Discretization disc(generate_hex_dominant(3), 2);
  const ExactSolution ex = square_solution();
  ProblemData data;
  data.load = ex.load(1.0);
  SolverOptions it;
  it.iterative = true;
  for (Method m : {Method::Standard, Method::Robust}) {
    const DiscreteSolution a = solve_stokes(disc, data, m);
    const DiscreteSolution b = solve_stokes(disc, data, m, it);
    CHECK(b.iterations > 0);
    CHECK((a.velocity - b.velocity).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(max_pressure_gap(a, b) < 1e-7);
  }
}

TEST_CASE("viscosity scaling") {
  // u solves the problem with (nu, f) iff u / 2 solves it with (2 nu, f) and the same pressure.
  const Discretization disc(generate_uniform_triangles(3, 3), 2);
  const ExactSolution ex = square_solution();
  ProblemData a, b;
  a.nu = 1.0;
  a.load = ex.load(1.0);
  b.nu = 2.0;
  b.load = ex.load(1.0);
  const DiscreteSolution sa = solve_stokes(disc, a, Method::Robust);
  const DiscreteSolution sb = solve_stokes(disc, b, Method::Robust);
  CHECK((0.5 * sa.velocity - sb.velocity).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(max_pressure_gap(sa, sb) < 1e-10);
}
