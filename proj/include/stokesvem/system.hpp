// Global numbering, saddle-point assembly and solution of the standard,
// pressure-robust and reduced methods, plus elementwise pressure recovery.
#pragma once

#include "stokesvem/rt_interp.hpp"
#include "stokesvem/vem_element.hpp"

#include <Eigen/Sparse>

#include <optional>

namespace svem {

enum class Method { Standard, Robust, Reduced };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct ProblemData {
  double nu = 1.0;
  VectorFunction load;      ///< f; empty means zero
  VectorFunction dirichlet; ///< boundary velocity; empty means homogeneous
};

struct SolverOptions {
  bool iterative = false; ///< preconditioned MINRES instead of sparse LU
  double tolerance = 1e-13;
  int max_iterations = 20000;
};

/// Per-cell data shared by every method on a fixed mesh and degree.
struct CellBlock {
  VemElement element;
  ProjectorPack pack;
  LocalMatrices local;
  std::vector<int> dofs; ///< local DoF -> global DoF
};

/// Global DoFs: edge e, component c, Legendre index j at e*2k + c*k + j;
/// then the interior block of each cell.
class Discretization {
public:
  Discretization(const PolyMesh& mesh, int k);

  const PolyMesh& mesh() const { return mesh_; }
  int k() const { return k_; }
  int num_dofs() const { return num_dofs_; }
  int pressure_dim() const { return poly_dim(k_ - 1); }
  const std::vector<CellBlock>& cells() const { return cells_; }
  const CellBlock& cell(int c) const { return cells_[c]; }
  const std::vector<bool>& boundary_mask() const { return boundary_; }

  int edge_dof(int edge, int comp, int j) const { return edge * 2 * k_ + comp * k_ + j; }
  Eigen::VectorXd gather(const Eigen::VectorXd& global, int c) const;

  /// Global DoF values of a smooth field.
  Eigen::VectorXd interpolate(const VectorFunction& u) const;
  /// Global DoF values on boundary edges (zero elsewhere).
  Eigen::VectorXd boundary_values(const VectorFunction& g) const;

  /// Per-cell load vectors for the standard or the pressure-robust method.
  std::vector<Eigen::VectorXd> loads(const VectorFunction& f, Method method) const;

private:
  PolyMesh mesh_;
  int k_;
  int num_dofs_ = 0;
  std::vector<CellBlock> cells_;
  std::vector<bool> boundary_;
};

/// Symmetric saddle-point system [nu A, B^T, 0; B, 0, m; 0, m^T, 0].
struct GlobalSystem {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<int> velocity_dofs;  ///< unknown -> global velocity DoF
  Eigen::VectorXd fixed_values;    ///< Dirichlet values on all global DoFs
  int num_velocity = 0;
  int num_pressure = 0;
  int pressure_block = 0;          ///< pressure coefficients per cell
  Eigen::VectorXd pressure_weights; ///< block-diagonal pressure mass for preconditioning
  double nu = 1.0;
  int size() const { return static_cast<int>(matrix.rows()); }
};

struct DiscreteSolution {
  Method method = Method::Standard;
  int k = 2;
  Eigen::VectorXd velocity;              ///< all global DoFs, boundary values included
  std::vector<Eigen::VectorXd> pressure; ///< per-cell P_{k-1} coefficients
  Eigen::VectorXd pressure_mean;         ///< per-cell mean of the pressure
  std::vector<Eigen::VectorXd> pi;       ///< per-cell Pi^K u_h coefficients
  std::vector<Eigen::VectorXd> strain;   ///< per-cell Q_{k-1} eps(u_h) coefficients
  std::vector<Eigen::VectorXd> divergence; ///< per-cell Q_{k-1} div u_h coefficients
  double residual = 0.0;
  int iterations = 0;
};

/// Assembles the standard or robust system. Boundary edge DoFs are eliminated
/// using ProblemData::dirichlet.
GlobalSystem assemble(const Discretization& disc, const ProblemData& data, Method method);

/// Solves an assembled system and post-processes the per-cell fields.
DiscreteSolution solve(const Discretization& disc, const GlobalSystem& system, Method method,
                       const SolverOptions& options = {});

/// Reduced method: edge and G-complement DoFs with piecewise constant pressure,
/// followed by elementwise recovery of the full pressure.
DiscreteSolution solve_reduced(const Discretization& disc, const ProblemData& data, const SolverOptions& options = {});

/// Maps reduced local DoFs (edges, then G-complement) to the full local DoFs,
/// filling the gradient moments from boundary data under div v in P_0.
Eigen::MatrixXd reduced_extension(const VemElement& el);

/// Per-cell zero-mean correction p_K^perp so that p_h = p_perp + p_mean.
std::vector<Eigen::VectorXd> recover_pressure(const Discretization& disc, const ProblemData& data,
                                              const Eigen::VectorXd& velocity);

/// Convenience wrapper: build, assemble and solve in one call.
DiscreteSolution solve_stokes(const Discretization& disc, const ProblemData& data, Method method,
                              const SolverOptions& options = {});

} // namespace svem
