#include "stokesvem/rt_interp.hpp"

#include "stokesvem/error.hpp"

#include <sstream>

namespace svem {

namespace {

constexpr double rank_tol = 1e-10;

// Orthonormal basis of the null space of m, together with its numeric rank.
Eigen::MatrixXd null_space(const Eigen::MatrixXd& m, int* rank) {
  if (m.rows() == 0) {
    *rank = 0;
    return Eigen::MatrixXd::Identity(m.cols(), m.cols());
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s[i] > rank_tol * s[0]) ++r;
  *rank = r;
  return svd.matrixV().rightCols(m.cols() - r);
}

[[noreturn]] void geometry_failure(const CellGeometry& cell, const std::string& what) {
  std::ostringstream os;
  os << what << " (cell with centroid " << cell.centroid.transpose() << ")";
  fail(ErrorKind::Geometry, os.str());
}

// Fields of one subtriangle block at x: 2 x block.
Eigen::Matrix2Xd block_fields(const RtSpace& s, const Vec2& x) {
  const int n1 = s.basis.dim();
  const int hom = poly_dim(s.k - 2);
  const Eigen::VectorXd m = s.basis.eval(x);
  const Vec2 xh = (x - s.basis.center()) / s.basis.scale();
  Eigen::Matrix2Xd f = Eigen::Matrix2Xd::Zero(2, s.block);
  f.row(0).head(n1) = m.transpose();
  f.row(1).segment(n1, n1) = m.transpose();
  for (int i = 0; i < s.k; ++i) {
    f(0, 2 * n1 + i) = xh.x() * m[hom + i];
    f(1, 2 * n1 + i) = xh.y() * m[hom + i];
  }
  return f;
}

// Divergence of one block as P_{k-1} coefficients: n1 x block.
Eigen::MatrixXd block_divergence(const RtSpace& s) {
  const int n1 = s.basis.dim();
  const int hom = poly_dim(s.k - 2);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n1, s.block);
  d.block(0, 0, poly_dim(s.k - 2), n1) = s.basis.derivative_matrix(0);
  d.block(0, n1, poly_dim(s.k - 2), n1) = s.basis.derivative_matrix(1);
  // div(x_hat q) = (k + 1) q / h for q homogeneous of degree k-1.
  for (int i = 0; i < s.k; ++i) d(hom + i, 2 * n1 + i) = (s.k + 1) / s.basis.scale();
  return d;
}

} // namespace

Eigen::Matrix2Xd rt_eval_basis(const RtSpace& space, int t, const Vec2& x) {
  Eigen::Matrix2Xd f = Eigen::Matrix2Xd::Zero(2, space.num_triangles() * space.block);
  f.middleCols(t * space.block, space.block) = block_fields(space, x);
  return f;
}

Vec2 rt_eval(const RtSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs, int t, const Vec2& x) {
  return block_fields(space, x) * coeffs.segment(t * space.block, space.block);
}

Eigen::MatrixXd rt_divergence(const RtSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  const Eigen::MatrixXd d = block_divergence(space);
  Eigen::MatrixXd out(space.basis.dim(), space.num_triangles());
  for (int t = 0; t < space.num_triangles(); ++t) out.col(t) = d * coeffs.segment(t * space.block, space.block);
  return out;
}

RtSpace build_rt_space(const CellGeometry& cell, int k) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "RT reconstruction needs k >= 2");
  RtSpace s{k, subtriangulate(cell), MonomialBasis(k - 1, cell), 0, {}};
  const int n1 = s.basis.dim();
  s.block = 2 * n1 + k;
  const int nt = s.num_triangles();
  const int cols = nt * s.block;
  if (nt == 1) {
    s.span = Eigen::MatrixXd::Identity(cols, cols);
    return s;
  }

  // Normal continuity across the sub-edges centroid -> vertex i, shared by
  // triangles i-1 and i, then equal divergence on every subtriangle.
  Eigen::MatrixXd cons = Eigen::MatrixXd::Zero(nt * k + (nt - 1) * n1, cols);
  for (int i = 0; i < nt; ++i) {
    const Vec2& a = cell.centroid;
    const Vec2& b = cell.vertices[i];
    const Vec2 tan = b - a;
    const Vec2 nrm = Vec2(tan.y(), -tan.x()).normalized();
    const EdgeBasis psi(k - 1, a, b);
    const auto quad = edge_quadrature(a, b, 2 * k);
    const int left = (i + nt - 1) % nt;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Eigen::VectorXd pv = psi.eval(quad.points[q]);
      const Eigen::RowVectorXd fn = nrm.transpose() * block_fields(s, quad.points[q]);
      for (int j = 0; j < k; ++j) {
        const double w = quad.weights[q] * pv[j] / psi.length();
        cons.row(i * k + j).segment(i * s.block, s.block) += w * fn;
        cons.row(i * k + j).segment(left * s.block, s.block) -= w * fn;
      }
    }
  }
  const Eigen::MatrixXd d = block_divergence(s);
  for (int t = 1; t < nt; ++t) {
    const int r = nt * k + (t - 1) * n1;
    cons.block(r, 0, n1, s.block) = d;
    cons.block(r, t * s.block, n1, s.block) = -d;
  }
  int rank = 0;
  s.span = null_space(cons, &rank);
  if (rank != cons.rows()) geometry_failure(cell, "dependent continuity constraints in the RT reconstruction");
  return s;
}

RtInterpolation rt_interpolation(const VemElement& el, const ProjectorPack& pack) {
  const CellGeometry& cell = el.cell();
  const int k = el.k();
  const DofLayout& L = el.layout();
  RtInterpolation out{build_rt_space(cell, k), {}, {}, {}};
  const RtSpace& s = out.space;
  const int stacked = s.num_triangles() * s.block;
  const int m = s.dim();
  const int n = el.basis_k().dim(), n2 = el.basis_k2().dim();

  // Boundary normal moments (1/h_F) int_F v.n psi_j.
  Eigen::MatrixXd normal_rows = Eigen::MatrixXd::Zero(L.num_edges * k, stacked);
  for (int e = 0; e < L.num_edges; ++e) {
    const CellEdge& ce = cell.edges[e];
    const EdgeBasis psi = el.edge_basis(e);
    const int t = s.triangle_of_edge(e);
    const auto quad = edge_quadrature(ce.a, ce.b, 2 * k);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Eigen::VectorXd pv = psi.eval(quad.points[q]);
      const Eigen::RowVectorXd fn = ce.normal.transpose() * block_fields(s, quad.points[q]);
      for (int j = 0; j < k; ++j)
        normal_rows.row(e * k + j).segment(t * s.block, s.block) += (quad.weights[q] * pv[j] / ce.length) * fn;
    }
  }

  // Interior moments (1/|K|)(v, m_b e_c), the RT Gram matrix and the cross
  // Gram against vector monomials of degree k.
  Eigen::MatrixXd moment_rows = Eigen::MatrixXd::Zero(2 * n2, stacked);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(stacked, stacked);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(2 * n, stacked);
  for (int t = 0; t < s.num_triangles(); ++t) {
    const auto quad = triangle_quadrature(s.triangles[t], 2 * k);
    const int off = t * s.block;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Vec2& x = quad.points[q];
      const double w = quad.weights[q];
      const Eigen::Matrix2Xd f = block_fields(s, x);
      const Eigen::VectorXd m2 = el.basis_k2().eval(x);
      const Eigen::VectorXd mk = el.basis_k().eval(x);
      moment_rows.block(0, off, n2, s.block) += (w / cell.area) * m2 * f.row(0);
      moment_rows.block(n2, off, n2, s.block) += (w / cell.area) * m2 * f.row(1);
      gram.block(off, off, s.block, s.block) += w * f.transpose() * f;
      cross.block(0, off, n, s.block) += w * mk * f.row(0);
      cross.block(n, off, n, s.block) += w * mk * f.row(1);
    }
  }

  Eigen::MatrixXd fixed(normal_rows.rows() + moment_rows.rows(), m);
  fixed << normal_rows * s.span, moment_rows * s.span;
  int rank = 0;
  out.bubbles = null_space(fixed, &rank);
  if (rank != fixed.rows()) geometry_failure(cell, "RT boundary and interior moments are not independent");
  const Eigen::MatrixXd gz = s.span.transpose() * gram * s.span;
  out.dof_matrix.resize(m, m);
  out.dof_matrix << fixed, out.bubbles.transpose() * gz / cell.area;

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, L.size());
  for (int e = 0; e < L.num_edges; ++e) {
    const Vec2& nv = cell.edges[e].normal;
    for (int j = 0; j < k; ++j) {
      rhs(e * k + j, L.edge_dof(e, 0, j)) = nv.x();
      rhs(e * k + j, L.edge_dof(e, 1, j)) = nv.y();
    }
  }
  rhs.middleRows(L.num_edges * k, 2 * n2) = pack.moments / cell.area;
  rhs.bottomRows(out.bubbles.cols()) = out.bubbles.transpose() * s.span.transpose() * cross.transpose() * pack.pi / cell.area;

  const Eigen::FullPivLU<Eigen::MatrixXd> lu(out.dof_matrix);
  if (!lu.isInvertible()) geometry_failure(cell, "RT degrees of freedom are not unisolvent");
  out.matrix = s.span * lu.solve(rhs);
  return out;
}

Eigen::VectorXd rt_load(const RtInterpolation& interp, const VectorFunction& f, int quad_degree) {
  const RtSpace& s = interp.space;
  const int qd = quad_degree < 0 ? 2 * s.k + 6 : quad_degree;
  Eigen::VectorXd fr = Eigen::VectorXd::Zero(s.num_triangles() * s.block);
  for (int t = 0; t < s.num_triangles(); ++t) {
    const auto quad = triangle_quadrature(s.triangles[t], qd);
    for (std::size_t q = 0; q < quad.size(); ++q)
      fr.segment(t * s.block, s.block) += quad.weights[q] * block_fields(s, quad.points[q]).transpose() * f(quad.points[q]);
  }
  return interp.matrix.transpose() * fr;
}

} // namespace svem
