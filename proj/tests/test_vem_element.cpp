#include "support.hpp"

#include <doctest.h>

using namespace svem;
using namespace svem::test;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

// (eps u, eps v)_K by quadrature for vector polynomials given by their gradients.
double energy(const CellGeometry& cell, const std::function<Eigen::Matrix2d(const Vec2&)>& gu,
              const std::function<Eigen::Matrix2d(const Vec2&)>& gv, int degree) {
  const QuadratureRule q = cell_quadrature(cell, degree);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Eigen::Matrix2d a = gu(q.points[i]), b = gv(q.points[i]);
    const Eigen::Matrix2d ea = 0.5 * (a + a.transpose()), eb = 0.5 * (b + b.transpose());
    s += q.weights[i] * (ea.cwiseProduct(eb)).sum();
  }
  return s;
}

Eigen::MatrixXd rigid_dofs(const VemElement& el) {
  Eigen::MatrixXd r(el.layout().size(), 3);
  const Vec2 c = el.cell().centroid;
  r.col(0) = el.dof_evaluate([](const Vec2&) { return Vec2(1, 0); });
  r.col(1) = el.dof_evaluate([](const Vec2&) { return Vec2(0, 1); });
  r.col(2) = el.dof_evaluate([c](const Vec2& x) { return Vec2(-(x.y() - c.y()), x.x() - c.x()); });
  return r;
}

} // namespace

TEST_CASE("DoF layout sizes") {
  const CellGeometry sq = unit_square_cell().geometry(0);
  for (int k = 2; k <= 4; ++k) {
    const VemElement el(sq, k);
    CHECK(el.layout().size() == 4 * 2 * k + (k - 1) * k);
    CHECK(el.layout().num_complement == poly_dim(k - 3));
  }
  // No G-complement moments, hence no interior stabilization term, at k = 2.
  CHECK(VemElement(sq, 2).layout().num_complement == 0);
}

TEST_CASE("DoFs of a constant field") {
  const VemElement el(unit_square_cell().geometry(0), 2);
  const Eigen::VectorXd d = el.dof_evaluate([](const Vec2&) { return Vec2(1, 0); });
  const DofLayout& L = el.layout();
  for (int e = 0; e < 4; ++e) {
    CHECK(std::abs(d[L.edge_dof(e, 0, 0)] - 1.0) < 1e-14);
    CHECK(std::abs(d[L.edge_dof(e, 0, 1)]) < 1e-14);
    CHECK(std::abs(d[L.edge_dof(e, 1, 0)]) < 1e-14);
    CHECK(std::abs(d[L.edge_dof(e, 1, 1)]) < 1e-14);
  }
}

TEST_CASE("DoFs of (sin y, cos x) match the symbolic moments") {
  const auto& fx = fixtures()["dof_moments_sin_cos"];
  const VemElement el(unit_square_cell().geometry(0), fx["k"]);
  const Eigen::VectorXd d = el.dof_evaluate([](const Vec2& x) { return Vec2(std::sin(x.y()), std::cos(x.x())); }, 30);
  const DofLayout& L = el.layout();
  for (int e = 0; e < 4; ++e)
    for (int c = 0; c < 2; ++c)
      for (int j = 0; j < el.k(); ++j)
        CHECK(std::abs(d[L.edge_dof(e, c, j)] - fx["edges"][e]["moments"][c][j].get<double>()) < 1e-10);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(d[L.gradient_offset() + i] - fx["interior"][i].get<double>()) < 1e-10);
}

TEST_CASE("projector identities on generated and random cells") {
  Rng rng(21);
  std::vector<CellGeometry> cells = sample_cells();
  for (int i = 0; i < 20; ++i) cells.push_back(single_cell_mesh(random_convex_polygon(rng, rng.integer(3, 9))).geometry(0));
  for (int k = 2; k <= 4; ++k) {
    for (std::size_t c = 0; c < cells.size(); c += (k == 4 ? 7 : 3)) {
      const VemElement el(cells[c], k);
      const ProjectorPack p = el.compute_projector();
      const int n = el.layout().size();
      const int nk = el.basis_k().dim();
      CAPTURE(k);
      CAPTURE(c);
      // Round-off bound: absolute on mesh cells, scaled by the operator sizes on
      // the badly shaped random ones.
      const double tol = std::max(1e-10, 1e-14 * max_abs(p.pi) * max_abs(p.dof_of_poly));
      // Polynomials are reproduced and carry no multiplier.
      CHECK(max_abs(p.pi * p.dof_of_poly - Eigen::MatrixXd::Identity(2 * nk, 2 * nk)) < tol);
      CHECK(max_abs(p.multiplier * p.dof_of_poly) < 1e-14 * max_abs(p.multiplier) * max_abs(p.dof_of_poly) + 1e-9);
      // D columns are the DoFs of the monomials.
      const Eigen::VectorXd coeffs = rng.vector(2 * nk);
      const Eigen::VectorXd direct = el.dof_evaluate(vector_polynomial(el.basis_k(), coeffs));
      CHECK((direct - p.dof_of_poly * coeffs).norm() < 1e-11 * (1.0 + direct.norm()));
      // div Pi v equals Div v as a P_{k-1} polynomial.
      const Eigen::VectorXd v = rng.vector(n);
      const Eigen::VectorXd lhs = divergence_coeffs(el.basis_k(), p.pi * v);
      const Eigen::VectorXd rhs = p.div * v;
      CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, rhs.cwiseAbs().maxCoeff()));
      // Rigid motions: zero strain.
      const Eigen::MatrixXd rd = rigid_dofs(el);
      CHECK(max_abs(p.eps * rd) < std::max(1e-10, 1e-14 * max_abs(p.eps) * max_abs(rd)));
    }
  }
}

TEST_CASE("rigid motion is reproduced with zero strain") {
  const VemElement el(unit_square_cell().geometry(0), 2);
  const ProjectorPack p = el.compute_projector();
  const Eigen::VectorXd d = el.dof_evaluate([](const Vec2& x) { return Vec2(-x.y(), x.x()); });
  const Eigen::VectorXd pi = p.pi * d;
  for (const Vec2& x : {Vec2(0.1, 0.2), Vec2(0.9, 0.4), Vec2(0.5, 0.5)})
    CHECK((eval_vector(el.basis_k(), pi, x) - Vec2(-x.y(), x.x())).norm() < 1e-13);
  CHECK((p.eps * d).norm() < 1e-13);
}

TEST_CASE("local stiffness: kernel, symmetry and consistency") {
  Rng rng(4);
  std::vector<CellGeometry> cells = sample_cells();
  for (int i = 0; i < 10; ++i) cells.push_back(single_cell_mesh(random_convex_polygon(rng, rng.integer(3, 9))).geometry(0));
  for (int k = 2; k <= 4; ++k) {
    for (std::size_t c = 0; c < cells.size(); c += 5) {
      const VemElement el(cells[c], k);
      const ProjectorPack p = el.compute_projector();
      const LocalMatrices m = local_stiffness(el, p);
      const Eigen::MatrixXd& A = m.stiffness;
      const double scale = A.cwiseAbs().maxCoeff();
      CHECK(max_abs(A - A.transpose()) <= 1e-14 * scale);
      CHECK(max_abs(A * rigid_dofs(el)) < 1e-11 * scale);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
      const Eigen::VectorXd ev = es.eigenvalues();
      int zero = 0;
      for (Eigen::Index i = 0; i < ev.size(); ++i) zero += ev[i] < 1e-10 * ev.maxCoeff();
      CHECK(zero == 3);
      CHECK(ev.minCoeff() > -1e-12 * ev.maxCoeff());
      // Stabilization vanishes on polynomials.
      CHECK(max_abs(m.stabilization * p.dof_of_poly) < 1e-10 * scale);
    }
  }
}

TEST_CASE("stiffness reproduces the symbolic energy product") {
  const auto& fx = fixtures()["energy_product"];
  const CellGeometry sq = unit_square_cell().geometry(0);
  for (int k = 2; k <= 3; ++k) {
    const VemElement el(sq, k);
    const LocalMatrices m = local_stiffness(el, el.compute_projector());
    const Eigen::VectorXd u = el.dof_evaluate([](const Vec2& x) { return Vec2(x.x() * x.x(), -2.0 * x.x() * x.y()); });
    const Eigen::VectorXd v =
        el.dof_evaluate([](const Vec2& x) { return Vec2(x.x() * x.y() - x.y() * x.y(), x.x() * x.x() + x.y()); });
    CHECK(std::abs(v.dot(m.stiffness * u) - fx["value"].get<double>()) < 1e-11);
  }
  // Same identity on random polygons against direct quadrature.
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const CellGeometry g = single_cell_mesh(random_convex_polygon(rng, rng.integer(3, 8))).geometry(0);
    const int k = rng.integer(2, 3);
    const VemElement el(g, k);
    const LocalMatrices m = local_stiffness(el, el.compute_projector());
    const Eigen::VectorXd cu = rng.vector(2 * el.basis_k().dim()), cv = rng.vector(2 * el.basis_k().dim());
    const auto grad = [&](const Eigen::VectorXd& c) {
      return [&el, c](const Vec2& x) {
        const int n = el.basis_k().dim();
        const Eigen::MatrixX2d g = el.basis_k().eval_grad(x);
        Eigen::Matrix2d out;
        out.row(0) = g.transpose() * c.head(n);
        out.row(1) = g.transpose() * c.tail(n);
        return out;
      };
    };
    const double exact = energy(g, grad(cu), grad(cv), 2 * k);
    const Eigen::VectorXd du = el.dof_evaluate(vector_polynomial(el.basis_k(), cu));
    const Eigen::VectorXd dv = el.dof_evaluate(vector_polynomial(el.basis_k(), cv));
    CHECK(std::abs(dv.dot(m.stiffness * du) - exact) < 1e-10 * (1.0 + std::abs(exact)));
  }
}

TEST_CASE("divergence matrix") {
  const auto& fx = fixtures()["divergence_moment"];
  const VemElement sq(unit_square_cell().geometry(0), 2);
  const ProjectorPack ps = sq.compute_projector();
  const Eigen::VectorXd d = sq.dof_evaluate([](const Vec2& x) { return Vec2(x.x() * x.x(), 0.0); });
  CHECK(std::abs((local_div_matrix(ps) * d)[0] - fx["value"].get<double>()) < 1e-12);

  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const CellGeometry g = single_cell_mesh(random_convex_polygon(rng, rng.integer(3, 8))).geometry(0);
    const VemElement el(g, rng.integer(2, 4));
    const ProjectorPack p = el.compute_projector();
    const Eigen::VectorXd dx = el.dof_evaluate([](const Vec2& x) { return x; });
    CHECK(std::abs((local_div_matrix(p) * dx)[0] - 2.0 * g.area) < 1e-12 * std::max(1.0, g.area));
    CHECK(max_abs(local_div_matrix(p) * rigid_dofs(el)) < 1e-11 * std::max(1.0, g.area));
  }
}

TEST_CASE("standard load vector") {
  const CellGeometry sq = unit_square_cell().geometry(0);
  const VemElement el(sq, 2);
  const ProjectorPack p = el.compute_projector();
  CHECK(local_load(el, p, [](const Vec2&) { return Vec2(0, 0); }).norm() == 0.0);

  SUBCASE("polynomial test functions against the symbolic integrals") {
    const auto& fx = fixtures()["polynomial_loads"];
    const VectorFunction f = [](const Vec2& x) { return Vec2(0.0, 1.0 - x.y() + 3.0 * x.y() * x.y()); };
    const Eigen::VectorXd F = local_load(el, p, f);
    const std::vector<VectorFunction> vs{
        [](const Vec2&) { return Vec2(1, 0); }, [](const Vec2&) { return Vec2(0, 1); },
        [](const Vec2& x) { return x; }, [](const Vec2& x) { return Vec2(x.x() * x.x(), -2.0 * x.x() * x.y()); },
        [](const Vec2& x) { return Vec2(x.y() * x.y(), x.x() * x.x()); }};
    for (std::size_t i = 0; i < vs.size(); ++i)
      CHECK(std::abs(F.dot(el.dof_evaluate(vs[i])) - fx["cases"][i]["value"].get<double>()) < 1e-12);
  }
  SUBCASE("random DoF vectors against quadrature of f . Pi v") {
    Rng rng(17);
    const VectorFunction f = [](const Vec2& x) { return Vec2(0.0, 1.0 - x.y() + 3.0 * x.y() * x.y()); };
    const Eigen::VectorXd F = local_load(el, p, f);
    const QuadratureRule q = cell_quadrature(sq, 10);
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd v = rng.vector(el.layout().size());
      const Eigen::VectorXd pi = p.pi * v;
      double oracle = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) oracle += q.weights[i] * f(q.points[i]).dot(eval_vector(el.basis_k(), pi, q.points[i]));
      CHECK(std::abs(F.dot(v) - oracle) < 1e-10);
    }
  }
  SUBCASE("constant load sees the cell mean of v") {
    Rng rng(18);
    const Vec2 f0(0.7, -1.3);
    const Eigen::VectorXd F = local_load(el, p, [f0](const Vec2&) { return f0; });
    for (int trial = 0; trial < 5; ++trial) {
      const Eigen::VectorXd v = rng.vector(el.layout().size());
      // For k = 2 the interior DoFs are the component means.
      const Vec2 mean(v[el.layout().gradient_offset()], v[el.layout().gradient_offset() + 1]);
      CHECK(std::abs(F.dot(v) - f0.dot(mean) * sq.area) < 1e-12);
    }
  }
  SUBCASE("k >= 3 tests against Q_{k-2} v") {
    Rng rng(19);
    for (int k = 3; k <= 4; ++k) {
      const CellGeometry g = single_cell_mesh(random_convex_polygon(rng, 6)).geometry(0);
      const VemElement e3(g, k);
      const ProjectorPack p3 = e3.compute_projector();
      const MonomialBasis bf = e3.basis_k2();
      const Eigen::VectorXd cf = rng.vector(2 * bf.dim());
      const VectorFunction f = vector_polynomial(bf, cf);
      const VectorFunction v = [](const Vec2& x) { return Vec2(std::sin(x.y()), std::cos(x.x())); };
      const QuadratureRule q = cell_quadrature(g, 30);
      double oracle = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) oracle += q.weights[i] * f(q.points[i]).dot(v(q.points[i]));
      CHECK(std::abs(local_load(e3, p3, f).dot(e3.dof_evaluate(v, 30)) - oracle) < 1e-10 * (1.0 + std::abs(oracle)));
    }
  }
}
