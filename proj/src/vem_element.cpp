#include "stokesvem/vem_element.hpp"

#include "stokesvem/error.hpp"

#include <sstream>

namespace svem {

namespace {

Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

// Evaluates m vector fields at a point as a 2 x m matrix.
using FieldBatch = std::function<Eigen::Matrix2Xd(int edge, const Vec2& x)>;

} // namespace

VemElement::VemElement(const CellGeometry& cell, int k)
    : k_(k), cell_(cell), pk_(k, cell), pk1_(std::max(k - 1, 0), cell), pk2_(std::max(k - 2, 0), cell),
      split_(make_grad_split_basis(std::max(k, 2))) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "virtual element degree must be >= 2 (got " + std::to_string(k) + ")");
  layout_.k = k;
  layout_.num_edges = static_cast<int>(cell.edges.size());
  layout_.num_complement = split_.num_complement;
  layout_.num_gradient = split_.num_gradient;
  quad_ = cell_quadrature(cell_, 2 * k);
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(split_.coeffs.transpose());
  interior_to_moments_ = cell_.area * lu.inverse();
}

EdgeBasis VemElement::edge_basis(int e) const {
  const CellEdge& ce = cell_.edges[e];
  return ce.sign > 0 ? EdgeBasis(k_ - 1, ce.a, ce.b) : EdgeBasis(k_ - 1, ce.b, ce.a);
}

Eigen::MatrixXd VemElement::scalar_gram(int degree) const {
  const MonomialBasis b = pk_.with_degree(degree);
  return gram_matrix(b, b, quad_);
}

namespace {

// DoF values of a batch of m fields: N x m.
Eigen::MatrixXd evaluate_dofs(const VemElement& el, int m, const std::function<Eigen::Matrix2Xd(const Vec2&)>& fields,
                              int quad_degree) {
  const DofLayout& L = el.layout();
  const CellGeometry& cell = el.cell();
  const int k = el.k();
  Eigen::MatrixXd dofs = Eigen::MatrixXd::Zero(L.size(), m);
  for (int e = 0; e < L.num_edges; ++e) {
    const CellEdge& ce = cell.edges[e];
    const EdgeBasis psi = el.edge_basis(e);
    const auto quad = edge_quadrature(ce.a, ce.b, quad_degree);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Eigen::VectorXd pv = psi.eval(quad.points[q]);
      const Eigen::Matrix2Xd f = fields(quad.points[q]);
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < k; ++j)
          dofs.row(L.edge_dof(e, c, j)) += (quad.weights[q] * pv[j] / ce.length) * f.row(c);
    }
  }
  const auto quad = cell_quadrature(cell, quad_degree);
  const auto& split = el.grad_split();
  const int n2 = el.basis_k2().dim();
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Eigen::VectorXd m2 = el.basis_k2().eval(quad.points[q]);
    const Eigen::Matrix2Xd f = fields(quad.points[q]);
    for (int i = 0; i < split.size(); ++i) {
      const double gx = m2.dot(split.coeffs.col(i).head(n2));
      const double gy = m2.dot(split.coeffs.col(i).tail(n2));
      dofs.row(L.interior_offset() + i) += (quad.weights[q] / cell.area) * (gx * f.row(0) + gy * f.row(1));
    }
  }
  return dofs;
}

// Rows r_i with r_i * dofs == sum_F (w, g_i)_F for a batch of edge fields.
Eigen::MatrixXd boundary_rows(const VemElement& el, int m, const FieldBatch& fields) {
  const DofLayout& L = el.layout();
  const int k = el.k();
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(m, L.size());
  for (int e = 0; e < L.num_edges; ++e) {
    const CellEdge& ce = el.cell().edges[e];
    const EdgeBasis psi = el.edge_basis(e);
    const auto quad = edge_quadrature(ce.a, ce.b, 2 * k);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Eigen::VectorXd pv = psi.eval(quad.points[q]);
      const Eigen::Matrix2Xd g = fields(e, quad.points[q]);
      for (int c = 0; c < 2; ++c)
        for (int j = 0; j < k; ++j) rows.col(L.edge_dof(e, c, j)) += (quad.weights[q] * pv[j]) * g.row(c).transpose();
    }
  }
  return rows;
}

} // namespace

Eigen::VectorXd VemElement::dof_evaluate(const VectorFunction& u, int quad_degree) const {
  const int qd = quad_degree < 0 ? 2 * k_ + 6 : quad_degree;
  return evaluate_dofs(*this, 1, [&](const Vec2& x) { return Eigen::Matrix2Xd(u(x)); }, qd).col(0);
}

Eigen::RowVectorXd VemElement::interior_functional(const Eigen::Ref<const Eigen::VectorXd>& g) const {
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(layout_.size());
  row.tail(layout_.num_interior()) = g.transpose() * interior_to_moments_;
  return row;
}

Eigen::RowVectorXd VemElement::boundary_functional(const std::function<Vec2(int, const Vec2&)>& g) const {
  return boundary_rows(*this, 1, [&](int e, const Vec2& x) { return Eigen::Matrix2Xd(g(e, x)); }).row(0);
}

ProjectorPack VemElement::compute_projector() const {
  const int n = pk_.dim(), n1 = pk1_.dim(), n2 = pk2_.dim();
  const int N = layout_.size();
  const double area = cell_.area;
  const double h = cell_.diameter;
  ProjectorPack pack;

  // D: DoFs of the vector monomials.
  pack.dof_of_poly = evaluate_dofs(
      *this, 2 * n,
      [&](const Vec2& x) {
        Eigen::Matrix2Xd f = Eigen::Matrix2Xd::Zero(2, 2 * n);
        const Eigen::VectorXd m = pk_.eval(x);
        f.row(0).head(n) = m.transpose();
        f.row(1).tail(n) = m.transpose();
        return f;
      },
      2 * k_);

  pack.moments = Eigen::MatrixXd::Zero(2 * n2, N);
  pack.moments.rightCols(layout_.num_interior()) = interior_to_moments_;

  const Eigen::MatrixXd dx = pk_.derivative_matrix(0), dy = pk_.derivative_matrix(1);
  const Eigen::MatrixXd dx1 = pk1_.derivative_matrix(0), dy1 = pk1_.derivative_matrix(1);

  // Polynomial-side matrices by quadrature: strain Gram, rotation and mean integrals, divergence coupling.
  Eigen::MatrixXd strain_gram = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  Eigen::VectorXd rot_int = Eigen::VectorXd::Zero(2 * n);
  Eigen::MatrixXd mean_int = Eigen::MatrixXd::Zero(2, 2 * n);
  Eigen::MatrixXd coupling = Eigen::MatrixXd::Zero(n1, 2 * n);
  for (std::size_t q = 0; q < quad_.size(); ++q) {
    const Vec2& x = quad_.points[q];
    const double w = quad_.weights[q];
    const Eigen::VectorXd m = pk_.eval(x);
    const Eigen::MatrixX2d g = pk_.eval_grad(x);
    const Eigen::VectorXd m1 = pk1_.eval(x);
    // Strain (xx, yy, xy) of each field: phi = m e_0 for i < n, m e_1 otherwise.
    Eigen::Matrix3Xd strain = Eigen::Matrix3Xd::Zero(3, 2 * n);
    Eigen::RowVectorXd div(2 * n), rot(2 * n);
    for (int i = 0; i < n; ++i) {
      strain(0, i) = g(i, 0);
      strain(2, i) = 0.5 * g(i, 1);
      strain(1, n + i) = g(i, 1);
      strain(2, n + i) = 0.5 * g(i, 0);
      div[i] = g(i, 0);
      div[n + i] = g(i, 1);
      rot[i] = -g(i, 1);
      rot[n + i] = g(i, 0);
    }
    strain_gram.noalias() += w * (strain.row(0).transpose() * strain.row(0) + strain.row(1).transpose() * strain.row(1) +
                                  2.0 * strain.row(2).transpose() * strain.row(2));
    rot_int += w * rot.transpose();
    mean_int.row(0).head(n) += w * m.transpose();
    mean_int.row(1).tail(n) += w * m.transpose();
    coupling.noalias() += w * m1 * div;
  }
  const double rot_weight = 1.0 / area;
  const double mean_weight = 1.0 / (h * h * area);
  const Eigen::MatrixXd energy_gram =
      strain_gram + rot_weight * rot_int * rot_int.transpose() + mean_weight * mean_int.transpose() * mean_int;

  // DoF-side right-hand sides.
  // (eps w, eps phi_i) = -(w, div eps phi_i)_K + sum_F (w, eps(phi_i) n)_F
  Eigen::MatrixXd rhs_energy = boundary_rows(*this, 2 * n, [&](int e, const Vec2& x) {
    const Vec2& nv = cell_.edges[e].normal;
    const Eigen::MatrixX2d g = pk_.eval_grad(x);
    Eigen::Matrix2Xd f(2, 2 * n);
    for (int i = 0; i < n; ++i) {
      f(0, i) = g(i, 0) * nv.x() + 0.5 * g(i, 1) * nv.y();
      f(1, i) = 0.5 * g(i, 1) * nv.x();
      f(0, n + i) = 0.5 * g(i, 0) * nv.y();
      f(1, n + i) = 0.5 * g(i, 0) * nv.x() + g(i, 1) * nv.y();
    }
    return f;
  });
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd ddx = dx.col(i), ddy = dy.col(i);
    const Eigen::VectorXd dxx = dx1 * ddx, dyy = dy1 * ddy, dxy = dy1 * ddx;
    Eigen::VectorXd div_eps(2 * n2);
    div_eps << dxx + 0.5 * dyy, 0.5 * dxy;
    rhs_energy.row(i) -= interior_functional(div_eps);
    div_eps << 0.5 * dxy, 0.5 * dxx + dyy;
    rhs_energy.row(n + i) -= interior_functional(div_eps);
  }
  const Eigen::RowVectorXd rot_row =
      boundary_functional([&](int e, const Vec2&) { return cell_.edges[e].tangent; });
  Eigen::MatrixXd mean_rows(2, N);
  for (int c = 0; c < 2; ++c) {
    Eigen::VectorXd unit = Eigen::VectorXd::Zero(2 * n2);
    unit[c * n2] = 1.0;
    mean_rows.row(c) = interior_functional(unit);
  }
  rhs_energy += rot_weight * rot_int * rot_row + mean_weight * mean_int.transpose() * mean_rows;

  // (div w, m_q) = -(w, grad m_q)_K + sum_F (w.n, m_q)_F
  Eigen::MatrixXd rhs_div = boundary_rows(*this, n1, [&](int e, const Vec2& x) {
    const Vec2& nv = cell_.edges[e].normal;
    const Eigen::VectorXd m1 = pk1_.eval(x);
    Eigen::Matrix2Xd f(2, n1);
    f.row(0) = nv.x() * m1.transpose();
    f.row(1) = nv.y() * m1.transpose();
    return f;
  });
  for (int q = 0; q < n1; ++q) {
    Eigen::VectorXd grad(2 * n2);
    grad << dx1.col(q), dy1.col(q);
    rhs_div.row(q) -= interior_functional(grad);
  }

  // Saddle system [M C^T; C 0].
  Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(2 * n + n1, 2 * n + n1);
  saddle.topLeftCorner(2 * n, 2 * n) = energy_gram;
  saddle.topRightCorner(2 * n, n1) = coupling.transpose();
  saddle.bottomLeftCorner(n1, 2 * n) = coupling;
  Eigen::MatrixXd rhs(2 * n + n1, N);
  rhs << rhs_energy, rhs_div;
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(saddle);
  if (!lu.isInvertible()) {
    std::ostringstream os;
    os << "singular local projector system (cell with centroid " << cell_.centroid.transpose() << ")";
    fail(ErrorKind::Geometry, os.str());
  }
  const Eigen::MatrixXd sol = lu.solve(rhs);
  pack.pi = sol.topRows(2 * n);
  pack.multiplier = sol.bottomRows(n1);

  const Eigen::MatrixXd g1 = scalar_gram(k_ - 1);
  const Eigen::LDLT<Eigen::MatrixXd> g1_ldlt(g1);
  pack.div_moments = rhs_div;
  pack.div = g1_ldlt.solve(rhs_div);

  // Q_{k-1} eps: test with m_q T for T in {E_xx, E_yy, E_xy + E_yx}.
  Eigen::MatrixXd rhs_xx = boundary_rows(*this, n1, [&](int e, const Vec2& x) {
    const Eigen::VectorXd m1 = pk1_.eval(x);
    Eigen::Matrix2Xd f = Eigen::Matrix2Xd::Zero(2, n1);
    f.row(0) = cell_.edges[e].normal.x() * m1.transpose();
    return f;
  });
  Eigen::MatrixXd rhs_yy = boundary_rows(*this, n1, [&](int e, const Vec2& x) {
    const Eigen::VectorXd m1 = pk1_.eval(x);
    Eigen::Matrix2Xd f = Eigen::Matrix2Xd::Zero(2, n1);
    f.row(1) = cell_.edges[e].normal.y() * m1.transpose();
    return f;
  });
  Eigen::MatrixXd rhs_xy = boundary_rows(*this, n1, [&](int e, const Vec2& x) {
    const Eigen::VectorXd m1 = pk1_.eval(x);
    Eigen::Matrix2Xd f(2, n1);
    f.row(0) = cell_.edges[e].normal.y() * m1.transpose();
    f.row(1) = cell_.edges[e].normal.x() * m1.transpose();
    return f;
  });
  for (int q = 0; q < n1; ++q) {
    Eigen::VectorXd t(2 * n2);
    t << dx1.col(q), Eigen::VectorXd::Zero(n2);
    rhs_xx.row(q) -= interior_functional(t);
    t << Eigen::VectorXd::Zero(n2), dy1.col(q);
    rhs_yy.row(q) -= interior_functional(t);
    t << dy1.col(q), dx1.col(q);
    rhs_xy.row(q) -= interior_functional(t);
  }
  pack.eps.resize(3 * n1, N);
  pack.eps << g1_ldlt.solve(rhs_xx), g1_ldlt.solve(rhs_yy), 0.5 * g1_ldlt.solve(rhs_xy);
  return pack;
}

LocalMatrices local_stiffness(const VemElement& el, const ProjectorPack& pack) {
  const DofLayout& L = el.layout();
  const int N = L.size();
  const int n1 = el.basis_k1().dim(), n2 = el.basis_k2().dim();
  const CellGeometry& cell = el.cell();

  const Eigen::MatrixXd g1 = el.scalar_gram(el.k() - 1);
  Eigen::MatrixXd strain_gram = Eigen::MatrixXd::Zero(3 * n1, 3 * n1);
  strain_gram.block(0, 0, n1, n1) = g1;
  strain_gram.block(n1, n1, n1, n1) = g1;
  strain_gram.block(2 * n1, 2 * n1, n1, n1) = 2.0 * g1;

  LocalMatrices out;
  out.consistency = pack.eps.transpose() * strain_gram * pack.eps;

  // Edge part: h_F^{-1} ||Q_F w||^2 equals the squared edge DoFs.
  Eigen::MatrixXd stab_dofs = Eigen::MatrixXd::Zero(N, N);
  stab_dofs.topLeftCorner(L.interior_offset(), L.interior_offset()).setIdentity();
  if (L.num_complement > 0) {
    const Eigen::MatrixXd g2 = el.scalar_gram(el.k() - 2);
    const Eigen::MatrixXd comp = el.grad_split().coeffs.leftCols(L.num_complement);
    const Eigen::MatrixXd h_gram = comp.transpose() * block_diag(g2, g2) * comp;
    const double s = cell.area * cell.area / (cell.diameter * cell.diameter);
    stab_dofs.block(L.complement_offset(), L.complement_offset(), L.num_complement, L.num_complement) =
        s * h_gram.ldlt().solve(Eigen::MatrixXd::Identity(L.num_complement, L.num_complement));
  }
  (void)n2;
  const Eigen::MatrixXd residual = Eigen::MatrixXd::Identity(N, N) - pack.dof_of_poly * pack.pi;
  out.stabilization = residual.transpose() * stab_dofs * residual;
  out.consistency = 0.5 * (out.consistency + out.consistency.transpose()).eval();
  out.stabilization = 0.5 * (out.stabilization + out.stabilization.transpose()).eval();
  out.stiffness = out.consistency + out.stabilization;
  return out;
}

Eigen::VectorXd vector_moments(const CellGeometry& cell, const MonomialBasis& basis, const VectorFunction& f,
                               int quad_degree) {
  const int n = basis.dim();
  Eigen::VectorXd mom = Eigen::VectorXd::Zero(2 * n);
  const auto quad = cell_quadrature(cell, quad_degree);
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Eigen::VectorXd m = basis.eval(quad.points[q]);
    const Vec2 fv = f(quad.points[q]);
    mom.head(n) += quad.weights[q] * fv.x() * m;
    mom.tail(n) += quad.weights[q] * fv.y() * m;
  }
  return mom;
}

Eigen::VectorXd local_load(const VemElement& el, const ProjectorPack& pack, const VectorFunction& f, int quad_degree) {
  const int qd = quad_degree < 0 ? 2 * el.k() + 6 : quad_degree;
  if (el.k() == 2) return pack.pi.transpose() * vector_moments(el.cell(), el.basis_k(), f, qd);
  const Eigen::MatrixXd g2 = el.scalar_gram(el.k() - 2);
  const Eigen::MatrixXd gram = block_diag(g2, g2);
  const Eigen::VectorXd fm = vector_moments(el.cell(), el.basis_k2(), f, qd);
  return pack.moments.transpose() * gram.ldlt().solve(fm);
}

Eigen::Vector3d eval_strain(const VemElement& el, const Eigen::Ref<const Eigen::VectorXd>& eps_coeffs, const Vec2& x) {
  const int n1 = el.basis_k1().dim();
  const Eigen::VectorXd m = el.basis_k1().eval(x);
  return Eigen::Vector3d(m.dot(eps_coeffs.segment(0, n1)), m.dot(eps_coeffs.segment(n1, n1)),
                         m.dot(eps_coeffs.segment(2 * n1, n1)));
}

} // namespace svem
