// Generalized Raviart-Thomas reconstruction on the centroid fan of a cell and
// the divergence-preserving load it induces.
#pragma once

#include "stokesvem/vem_element.hpp"

namespace svem {

/// Piecewise RT_{k-1} fields on the subtriangles of a cell with continuous
/// normal components and a single P_{k-1}(K) divergence.
///
/// On each subtriangle a field is stored as a block of 2 dim P_{k-1} + k
/// coefficients [p_x | p_y | q] in the cell-scaled monomials, meaning
/// v = (p_x + x_hat q, p_y + y_hat q) with q homogeneous of degree k-1 and
/// x_hat = (x - x_K) / h_K.
struct RtSpace {
  int k = 2;
  std::vector<Triangle> triangles;
  MonomialBasis basis; // P_{k-1}, cell-scaled
  int block = 0;       // coefficients per subtriangle
  /// Columns span the constrained space in the stacked per-triangle coordinates.
  Eigen::MatrixXd span;

  int dim() const { return static_cast<int>(span.cols()); }
  int num_triangles() const { return static_cast<int>(triangles.size()); }
  /// Subtriangle carrying the local cell edge e on its boundary.
  int triangle_of_edge(int e) const { return num_triangles() == 1 ? 0 : e; }
};

RtSpace build_rt_space(const CellGeometry& cell, int k);

/// Value of the field with stacked coefficients `coeffs` at x in subtriangle t.
Vec2 rt_eval(const RtSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs, int t, const Vec2& x);

/// 2 x (stacked size) matrix of the per-coefficient fields at x in subtriangle t.
Eigen::Matrix2Xd rt_eval_basis(const RtSpace& space, int t, const Vec2& x);

/// Divergence coefficients (P_{k-1}, cell-scaled) of the field on each
/// subtriangle, one column per subtriangle.
Eigen::MatrixXd rt_divergence(const RtSpace& space, const Eigen::Ref<const Eigen::VectorXd>& coeffs);

struct RtInterpolation {
  RtSpace space;
  /// Stacked RT coefficients of I^RT v for the local VEM DoF vector v.
  Eigen::MatrixXd matrix;
  /// Matching conditions in span coordinates (square when unisolvent).
  Eigen::MatrixXd dof_matrix;
  /// Span coordinates of a basis of the bubble fields.
  Eigen::MatrixXd bubbles;
};

/// Builds I^RT from boundary normal moments, interior moments against
/// P_{k-2}(K;R^2) and bubble moments matched against Pi^K v.
RtInterpolation rt_interpolation(const VemElement& el, const ProjectorPack& pack);

/// Load vector (f, I^RT phi_i)_K for every local DoF.
Eigen::VectorXd rt_load(const RtInterpolation& interp, const VectorFunction& f, int quad_degree = -1);

} // namespace svem
