// Scaled monomials on cells, Legendre bases on edges, quadrature rules and
// the gradient / complement split of vector polynomials.
#pragma once

#include "stokesvem/mesh.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace svem {

/// dim P_k in two variables; 0 for k < 0.
constexpr int poly_dim(int k) { return k < 0 ? 0 : (k + 1) * (k + 2) / 2; }

struct Exponent {
  int px = 0;
  int py = 0;
};

/// Scaled monomials m_a(x) = ((x - center) / scale)^a with graded ordering:
/// degree 0, then degree 1 as (1,0),(0,1), degree l as (l,0),(l-1,1),...,(0,l).
/// The P_{l} coefficients are therefore a prefix of the P_{k} coefficients.
class MonomialBasis {
public:
  MonomialBasis(int degree, const Vec2& center, double scale);
  MonomialBasis(int degree, const CellGeometry& cell) : MonomialBasis(degree, cell.centroid, cell.diameter) {}

  int degree() const { return degree_; }
  int dim() const { return poly_dim(degree_); }
  const Vec2& center() const { return center_; }
  double scale() const { return scale_; }
  const std::vector<Exponent>& exponents() const { return exponents_; }

  static int index(int px, int py) { return (px + py) * (px + py + 1) / 2 + py; }

  Eigen::VectorXd eval(const Vec2& x) const;
  /// Row i holds the gradient of basis function i (physical coordinates).
  Eigen::MatrixX2d eval_grad(const Vec2& x) const;
  /// dim() x pts.size() matrix of values.
  Eigen::MatrixXd eval(const std::vector<Vec2>& pts) const;

  /// Coefficient map for d/dx (axis 0) or d/dy (axis 1): P_degree -> P_{degree-1}.
  Eigen::MatrixXd derivative_matrix(int axis) const;
  /// Same basis with a different degree.
  MonomialBasis with_degree(int degree) const { return MonomialBasis(degree, center_, scale_); }

private:
  int degree_;
  Vec2 center_;
  double scale_;
  std::vector<Exponent> exponents_;
};

/// Basis of P_k(F) orthonormal for the averaged inner product (1/h_F) int_F:
/// psi_j = sqrt(2j+1) P_j(2t-1), t the arclength fraction from `origin`.
class EdgeBasis {
public:
  EdgeBasis(int degree, const Vec2& origin, const Vec2& end);

  int degree() const { return degree_; }
  int dim() const { return degree_ + 1; }
  double length() const { return length_; }
  Eigen::VectorXd eval(const Vec2& x) const;

private:
  int degree_;
  Vec2 origin_;
  Vec2 tangent_;
  double length_;
};

struct QuadratureRule {
  std::vector<Vec2> points;
  std::vector<double> weights;
  int degree = 0;

  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

constexpr int max_quadrature_degree = 60;

/// Gauss-Legendre nodes and weights on [0, 1] exact for polynomials of `degree`.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre_unit(int degree);

QuadratureRule triangle_quadrature(const Triangle& tri, int degree);
/// Composite rule over the centroid fan of the cell.
QuadratureRule cell_quadrature(const CellGeometry& cell, int degree);
QuadratureRule edge_quadrature(const Vec2& a, const Vec2& b, int degree);

/// Gram matrix (a_i, b_j) of two monomial bases. Throws Error
/// (InvalidArgument) when the rule is not exact for the products.
Eigen::MatrixXd gram_matrix(const MonomialBasis& a, const MonomialBasis& b, const QuadratureRule& quad);

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Coefficients of the L2 projection of f onto P_k(K) in the scaled monomial basis.
Eigen::VectorXd l2_project(const CellGeometry& cell, const ScalarFunction& f, int k, int quad_degree = -1);
/// Coefficients of the L2 projection of f onto P_k(F) in the edge Legendre basis.
Eigen::VectorXd l2_project_edge(const Vec2& a, const Vec2& b, const ScalarFunction& f, int k, int quad_degree = -1);

/// Basis of P_{k-2}(K;R^2) split as G-complement (x_perp P_{k-3}) followed by
/// G = grad P_{k-1}, both rescaled to O(1) size. Columns of `coeffs` are the
/// basis fields in the component-major vector monomial basis of degree k-2:
/// entries [0, n) hold the x component, [n, 2n) the y component.
struct GradSplitBasis {
  int k = 2;
  int num_complement = 0;
  int num_gradient = 0;
  Eigen::MatrixXd coeffs;

  int size() const { return num_complement + num_gradient; }
};

GradSplitBasis make_grad_split_basis(int k);

/// Evaluates a component-major vector polynomial (coefficients over `basis`).
Vec2 eval_vector(const MonomialBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& coeffs, const Vec2& x);

/// Coefficients (degree - 1) of the divergence of a component-major vector polynomial.
Eigen::VectorXd divergence_coeffs(const MonomialBasis& basis, const Eigen::Ref<const Eigen::VectorXd>& coeffs);

} // namespace svem
