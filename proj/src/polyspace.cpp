#include "stokesvem/polyspace.hpp"

#include "stokesvem/error.hpp"

#include <cmath>

namespace svem {

MonomialBasis::MonomialBasis(int degree, const Vec2& center, double scale)
    : degree_(degree), center_(center), scale_(scale) {
  if (degree < 0) fail(ErrorKind::InvalidArgument, "monomial degree must be >= 0");
  if (!(scale > 0.0)) fail(ErrorKind::InvalidArgument, "monomial scale must be positive");
  exponents_.reserve(poly_dim(degree));
  for (int l = 0; l <= degree; ++l)
    for (int i = 0; i <= l; ++i) exponents_.push_back({l - i, i});
}

Eigen::VectorXd MonomialBasis::eval(const Vec2& x) const {
  const Vec2 s = (x - center_) / scale_;
  Eigen::VectorXd px(degree_ + 1), py(degree_ + 1);
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) {
    px[i] = px[i - 1] * s.x();
    py[i] = py[i - 1] * s.y();
  }
  Eigen::VectorXd v(dim());
  for (int i = 0; i < dim(); ++i) v[i] = px[exponents_[i].px] * py[exponents_[i].py];
  return v;
}

Eigen::MatrixX2d MonomialBasis::eval_grad(const Vec2& x) const {
  const Vec2 s = (x - center_) / scale_;
  Eigen::VectorXd px(degree_ + 1), py(degree_ + 1);
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) {
    px[i] = px[i - 1] * s.x();
    py[i] = py[i - 1] * s.y();
  }
  Eigen::MatrixX2d g(dim(), 2);
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b] = exponents_[i];
    g(i, 0) = a > 0 ? a * px[a - 1] * py[b] / scale_ : 0.0;
    g(i, 1) = b > 0 ? b * px[a] * py[b - 1] / scale_ : 0.0;
  }
  return g;
}

Eigen::MatrixXd MonomialBasis::eval(const std::vector<Vec2>& pts) const {
  Eigen::MatrixXd m(dim(), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t q = 0; q < pts.size(); ++q) m.col(static_cast<Eigen::Index>(q)) = eval(pts[q]);
  return m;
}

Eigen::MatrixXd MonomialBasis::derivative_matrix(int axis) const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(poly_dim(degree_ - 1), dim());
  for (int i = 0; i < dim(); ++i) {
    const auto [a, b] = exponents_[i];
    if (axis == 0 && a > 0) d(index(a - 1, b), i) = a / scale_;
    if (axis == 1 && b > 0) d(index(a, b - 1), i) = b / scale_;
  }
  return d;
}

EdgeBasis::EdgeBasis(int degree, const Vec2& origin, const Vec2& end)
    : degree_(degree), origin_(origin), length_((end - origin).norm()) {
  if (degree < 0) fail(ErrorKind::InvalidArgument, "edge degree must be >= 0");
  tangent_ = (end - origin) / length_;
}

Eigen::VectorXd EdgeBasis::eval(const Vec2& x) const {
  const double z = 2.0 * (x - origin_).dot(tangent_) / length_ - 1.0;
  Eigen::VectorXd v(dim());
  double p0 = 1.0, p1 = 0.0;
  for (int j = 0; j <= degree_; ++j) {
    if (j > 0) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p2) / j;
    }
    v[j] = std::sqrt(2.0 * j + 1.0) * p0;
  }
  return v;
}

Eigen::MatrixXd gram_matrix(const MonomialBasis& a, const MonomialBasis& b, const QuadratureRule& quad) {
  if (quad.degree < a.degree() + b.degree())
    fail(ErrorKind::InvalidArgument, "gram_matrix: quadrature degree " + std::to_string(quad.degree) +
                                         " is below the product degree " + std::to_string(a.degree() + b.degree()));
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(a.dim(), b.dim());
  for (std::size_t q = 0; q < quad.size(); ++q) {
    const Eigen::VectorXd va = a.eval(quad.points[q]);
    const Eigen::VectorXd vb = b.eval(quad.points[q]);
    g.noalias() += quad.weights[q] * va * vb.transpose();
  }
  return g;
}

Eigen::VectorXd l2_project(const CellGeometry& cell, const ScalarFunction& f, int k, int quad_degree) {
  const MonomialBasis basis(k, cell);
  const auto quad = cell_quadrature(cell, quad_degree < 0 ? 2 * k + 6 : quad_degree);
  if (quad.degree < 2 * k) fail(ErrorKind::InvalidArgument, "quadrature degree too low for l2_project");
  // Weighted least squares on the quadrature nodes; same minimizer as the Gram system.
  const Eigen::Index nq = static_cast<Eigen::Index>(quad.size());
  Eigen::MatrixXd a(nq, basis.dim());
  Eigen::VectorXd b(nq);
  for (Eigen::Index q = 0; q < nq; ++q) {
    const double sw = std::sqrt(quad.weights[q]);
    a.row(q) = sw * basis.eval(quad.points[q]).transpose();
    b[q] = sw * f(quad.points[q]);
  }
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < basis.dim()) fail(ErrorKind::Internal, "singular Gram matrix in l2_project");
  return qr.solve(b);
}

Eigen::VectorXd l2_project_edge(const Vec2& a, const Vec2& b, const ScalarFunction& f, int k, int quad_degree) {
  const EdgeBasis basis(k, a, b);
  const auto quad = edge_quadrature(a, b, quad_degree < 0 ? 2 * k + 6 : quad_degree);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.dim());
  for (std::size_t q = 0; q < quad.size(); ++q) c += quad.weights[q] * f(quad.points[q]) * basis.eval(quad.points[q]);
  return c / basis.length();
}

GradSplitBasis make_grad_split_basis(int k) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "grad split basis needs k >= 2");
  GradSplitBasis g;
  g.k = k;
  const int n = poly_dim(k - 2);
  g.num_complement = poly_dim(k - 3);
  g.num_gradient = poly_dim(k - 1) - 1;
  g.coeffs = Eigen::MatrixXd::Zero(2 * n, g.size());
  int col = 0;
  // x_perp * m_b = (y m_b, -x m_b) in scaled coordinates.
  for (int l = 0; l <= k - 3; ++l)
    for (int i = 0; i <= l; ++i, ++col) {
      const int a = l - i, b = i;
      g.coeffs(MonomialBasis::index(a, b + 1), col) = 1.0;
      g.coeffs(n + MonomialBasis::index(a + 1, b), col) = -1.0;
    }
  // h * grad m_a.
  for (int l = 1; l <= k - 1; ++l)
    for (int i = 0; i <= l; ++i, ++col) {
      const int a = l - i, b = i;
      if (a > 0) g.coeffs(MonomialBasis::index(a - 1, b), col) = a;
      if (b > 0) g.coeffs(n + MonomialBasis::index(a, b - 1), col) = b;
    }
  return g;
}

Vec2 eval_vector(const MonomialBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Vec2& x) {
  const Eigen::VectorXd m = basis.eval(x);
  const int n = basis.dim();
  return Vec2(m.dot(coeffs.head(n)), m.dot(coeffs.segment(n, n)));
}

Eigen::VectorXd divergence_coeffs(const MonomialBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& coeffs) {
  const int n = basis.dim();
  return basis.derivative_matrix(0) * coeffs.head(n) + basis.derivative_matrix(1) * coeffs.segment(n, n);
}

} // namespace svem
