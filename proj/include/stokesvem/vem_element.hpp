// Per-cell divergence-free nonconforming virtual element: degrees of freedom,
// the Stokes-based energy projector, stabilization and local matrices.
#pragma once

#include "stokesvem/mesh.hpp"
#include "stokesvem/polyspace.hpp"

#include <Eigen/Dense>

#include <functional>

namespace svem {

/// Local DoF ordering. For local edge e, component c in {0,1} and edge
/// Legendre index j < k: e*2k + c*k + j, value (1/h_F) int_F v_c psi_j.
/// Then (k-1)k interior values (1/|K|)(v, g_i)_K over the GradSplitBasis
/// (complement part first, gradient part second).
struct DofLayout {
  int k = 2;
  int num_edges = 0;
  int num_complement = 0;
  int num_gradient = 0;

  int edge_block() const { return 2 * k; }
  int edge_dof(int edge, int comp, int j) const { return edge * 2 * k + comp * k + j; }
  int interior_offset() const { return num_edges * 2 * k; }
  int complement_offset() const { return interior_offset(); }
  int gradient_offset() const { return interior_offset() + num_complement; }
  int num_interior() const { return num_complement + num_gradient; }
  int size() const { return interior_offset() + num_interior(); }
};

/// DoF-to-polynomial maps of one cell. All matrices act on local DoF vectors.
struct ProjectorPack {
  Eigen::MatrixXd pi;          ///< Pi^K v, 2 dim P_k rows (component-major monomials)
  Eigen::MatrixXd multiplier;  ///< P^K v, dim P_{k-1} rows
  Eigen::MatrixXd eps;         ///< Q_{k-1} eps(v), blocks xx | yy | xy of dim P_{k-1}
  Eigen::MatrixXd div;         ///< Q_{k-1} div v coefficients
  Eigen::MatrixXd div_moments; ///< (div v, m_q)_K
  Eigen::MatrixXd moments;     ///< (v, m_b e_c)_K for vector monomials of degree k-2
  Eigen::MatrixXd dof_of_poly; ///< D: DoFs of the vector monomials of degree k (columns)
};

struct LocalMatrices {
  Eigen::MatrixXd stiffness;     ///< A_K (without viscosity)
  Eigen::MatrixXd consistency;   ///< (Q eps w, Q eps v)_K part
  Eigen::MatrixXd stabilization; ///< S_K(w - Pi w, v - Pi v) part
};

class VemElement {
public:
  VemElement(const CellGeometry& cell, int k);

  int k() const { return k_; }
  const CellGeometry& cell() const { return cell_; }
  const DofLayout& layout() const { return layout_; }
  const MonomialBasis& basis_k() const { return pk_; }
  const MonomialBasis& basis_k1() const { return pk1_; }
  const MonomialBasis& basis_k2() const { return pk2_; }
  const GradSplitBasis& grad_split() const { return split_; }

  /// Edge basis for local edge e, parametrised from the globally lower vertex
  /// so both neighbouring cells see the same functions.
  EdgeBasis edge_basis(int e) const;

  /// DoF values of a smooth vector field.
  Eigen::VectorXd dof_evaluate(const VectorFunction& u, int quad_degree = -1) const;

  /// Row r with r * dofs == (w, g)_K for g in P_{k-2}(K;R^2) given by its
  /// component-major coefficients (degree k-2).
  Eigen::RowVectorXd interior_functional(const Eigen::Ref<const Eigen::VectorXd>& g) const;

  /// Row r with r * dofs == sum_F (w, g)_F where g restricted to each edge lies
  /// in P_{k-1}(F;R^2); g receives the local edge index and the point.
  Eigen::RowVectorXd boundary_functional(const std::function<Vec2(int, const Vec2&)>& g) const;

  ProjectorPack compute_projector() const;

  /// Scalar L2 Gram matrix on P_l(K), l in {k-2, k-1, k}.
  Eigen::MatrixXd scalar_gram(int degree) const;

private:
  int k_;
  CellGeometry cell_;
  DofLayout layout_;
  MonomialBasis pk_, pk1_, pk2_;
  GradSplitBasis split_;
  QuadratureRule quad_;
  // |K| * S^{-T}, mapping interior DoFs to monomial moments.
  Eigen::MatrixXd interior_to_moments_;
};

LocalMatrices local_stiffness(const VemElement& el, const ProjectorPack& pack);

/// B_K: row q gives (div v, m_q)_K.
inline const Eigen::MatrixXd& local_div_matrix(const ProjectorPack& pack) { return pack.div_moments; }

/// Load vector for the standard method: (f, Pi v) for k = 2, (f, Q_{k-2} v) for k >= 3.
Eigen::VectorXd local_load(const VemElement& el, const ProjectorPack& pack, const VectorFunction& f,
                           int quad_degree = -1);

/// Component-major vector monomial moments int_K f . phi_i up to `degree`.
Eigen::VectorXd vector_moments(const CellGeometry& cell, const MonomialBasis& basis, const VectorFunction& f,
                               int quad_degree);

/// Values of Q_{k-1} eps as a symmetric tensor (xx, yy, xy) at x.
Eigen::Vector3d eval_strain(const VemElement& el, const Eigen::Ref<const Eigen::VectorXd>& eps_coeffs, const Vec2& x);

} // namespace svem
