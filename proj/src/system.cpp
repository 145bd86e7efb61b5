#include "stokesvem/system.hpp"

#include "stokesvem/error.hpp"

#include <unsupported/Eigen/IterativeSolvers>
#ifdef STOKESVEM_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include <sstream>

namespace svem {

const char* method_name(Method m) {
  switch (m) {
  case Method::Standard:
    return "standard";
  case Method::Robust:
    return "robust";
  case Method::Reduced:
    return "reduced";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "standard") return Method::Standard;
  if (name == "robust") return Method::Robust;
  if (name == "reduced") return Method::Reduced;
  fail(ErrorKind::InvalidArgument, "unknown method '" + name + "' (expected standard, robust or reduced)");
}

Discretization::Discretization(const PolyMesh& mesh, int k) : mesh_(mesh), k_(k) {
  if (k < 2) fail(ErrorKind::InvalidArgument, "degree k must be >= 2; the discrete Korn inequality fails for k = 1");
  const int nc = mesh_.num_cells();
  const int interior = (k - 1) * k;
  num_dofs_ = mesh_.num_edges() * 2 * k + nc * interior;
  boundary_.assign(num_dofs_, false);
  for (int e = 0; e < mesh_.num_edges(); ++e)
    if (mesh_.is_boundary_edge(e))
      for (int i = 0; i < 2 * k; ++i) boundary_[e * 2 * k + i] = true;

  std::vector<std::optional<CellBlock>> blocks(nc);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int c = 0; c < nc; ++c) {
    VemElement el(mesh_.geometry(c), k);
    ProjectorPack pack = el.compute_projector();
    LocalMatrices local = local_stiffness(el, pack);
    std::vector<int> dofs;
    dofs.reserve(el.layout().size());
    for (const auto& ce : mesh_.geometry(c).edges)
      for (int i = 0; i < 2 * k; ++i) dofs.push_back(ce.edge * 2 * k + i);
    const int off = mesh_.num_edges() * 2 * k + c * interior;
    for (int i = 0; i < interior; ++i) dofs.push_back(off + i);
    blocks[c].emplace(CellBlock{std::move(el), std::move(pack), std::move(local), std::move(dofs)});
  }
  cells_.reserve(nc);
  for (auto& b : blocks) cells_.push_back(std::move(*b));
}

Eigen::VectorXd Discretization::gather(const Eigen::VectorXd& global, int c) const {
  const auto& dofs = cells_[c].dofs;
  Eigen::VectorXd local(dofs.size());
  for (std::size_t i = 0; i < dofs.size(); ++i) local[i] = global[dofs[i]];
  return local;
}

Eigen::VectorXd Discretization::interpolate(const VectorFunction& u) const {
  Eigen::VectorXd g(num_dofs_);
  for (int c = 0; c < mesh_.num_cells(); ++c) {
    const Eigen::VectorXd d = cells_[c].element.dof_evaluate(u);
    for (Eigen::Index i = 0; i < d.size(); ++i) g[cells_[c].dofs[i]] = d[i];
  }
  return g;
}

Eigen::VectorXd Discretization::boundary_values(const VectorFunction& g) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(num_dofs_);
  if (!g) return v;
  for (int e = 0; e < mesh_.num_edges(); ++e) {
    if (!mesh_.is_boundary_edge(e)) continue;
    const Edge& edge = mesh_.edges()[e];
    const Vec2& a = mesh_.vertices()[edge.v[0]];
    const Vec2& b = mesh_.vertices()[edge.v[1]];
    for (int c = 0; c < 2; ++c) {
      const Eigen::VectorXd m = l2_project_edge(a, b, [&](const Vec2& x) { return g(x)[c]; }, k_ - 1);
      for (int j = 0; j < k_; ++j) v[edge_dof(e, c, j)] = m[j];
    }
  }
  return v;
}

std::vector<Eigen::VectorXd> Discretization::loads(const VectorFunction& f, Method method) const {
  const int nc = mesh_.num_cells();
  std::vector<Eigen::VectorXd> out(nc);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int c = 0; c < nc; ++c) {
    const CellBlock& cb = cells_[c];
    if (!f) {
      out[c] = Eigen::VectorXd::Zero(cb.element.layout().size());
    } else if (method == Method::Robust) {
      out[c] = rt_load(rt_interpolation(cb.element, cb.pack), f);
    } else {
      out[c] = local_load(cb.element, cb.pack, f);
    }
  }
  return out;
}

namespace {

struct LocalSystem {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::VectorXd f;
  Eigen::RowVectorXd mean; // integrals of the pressure basis
  std::vector<int> map;    // local velocity DoF -> global DoF
};

// Generic saddle-point assembly over cells with eliminated fixed DoFs.
GlobalSystem build_saddle(int num_dofs, const std::vector<bool>& fixed, const Eigen::VectorXd& fixed_values, int num_cells,
                          int pblock, double nu, const std::function<LocalSystem(int)>& local_of) {
  GlobalSystem sys;
  sys.nu = nu;
  sys.pressure_block = pblock;
  sys.fixed_values = fixed_values;
  std::vector<int> unknown(num_dofs, -1);
  for (int i = 0; i < num_dofs; ++i)
    if (!fixed[i]) {
      unknown[i] = static_cast<int>(sys.velocity_dofs.size());
      sys.velocity_dofs.push_back(i);
    }
  sys.num_velocity = static_cast<int>(sys.velocity_dofs.size());
  sys.num_pressure = num_cells * pblock;
  const int nv = sys.num_velocity;
  const int lambda = nv + sys.num_pressure;
  const int n = lambda + 1;
  sys.rhs = Eigen::VectorXd::Zero(n);
  sys.pressure_weights = Eigen::VectorXd::Zero(sys.num_pressure);

  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < num_cells; ++c) {
    const LocalSystem loc = local_of(c);
    const int nl = static_cast<int>(loc.map.size());
    for (int i = 0; i < nl; ++i) {
      const int gi = unknown[loc.map[i]];
      if (gi < 0) continue;
      sys.rhs[gi] += loc.f[i];
      for (int j = 0; j < nl; ++j) {
        const double v = nu * loc.a(i, j);
        const int gj = unknown[loc.map[j]];
        if (gj >= 0)
          trip.emplace_back(gi, gj, v);
        else
          sys.rhs[gi] -= v * fixed_values[loc.map[j]];
      }
    }
    for (int q = 0; q < pblock; ++q) {
      const int gp = nv + c * pblock + q;
      for (int j = 0; j < nl; ++j) {
        const double v = loc.b(q, j);
        const int gj = unknown[loc.map[j]];
        if (gj >= 0) {
          trip.emplace_back(gp, gj, v);
          trip.emplace_back(gj, gp, v);
        } else {
          sys.rhs[gp] -= v * fixed_values[loc.map[j]];
        }
      }
      trip.emplace_back(gp, lambda, loc.mean[q]);
      trip.emplace_back(lambda, gp, loc.mean[q]);
    }
    sys.pressure_weights.segment(c * pblock, pblock) = loc.mean.transpose();
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(trip.begin(), trip.end());
  return sys;
}

// Diagonal SPD preconditioner for MINRES: diag(nu A) on velocities, a
// lumped pressure mass over nu on pressures, the induced Schur value for
// the multiplier.
class SaddlePreconditioner {
public:
  using StorageIndex = int;
  SaddlePreconditioner() = default;

  void configure(int num_velocity, Eigen::VectorXd pressure_diag, double multiplier_diag) {
    nv_ = num_velocity;
    pressure_diag_ = std::move(pressure_diag);
    multiplier_diag_ = multiplier_diag;
  }
  template <typename M> SaddlePreconditioner& analyzePattern(const M&) { return *this; }
  template <typename M> SaddlePreconditioner& factorize(const M& m) { return compute(m); }
  template <typename M> SaddlePreconditioner& compute(const M& m) {
    inv_.resize(m.rows());
    for (int i = 0; i < nv_; ++i) inv_[i] = 1.0 / m.coeff(i, i);
    for (Eigen::Index i = 0; i < pressure_diag_.size(); ++i) inv_[nv_ + i] = 1.0 / pressure_diag_[i];
    inv_[m.rows() - 1] = 1.0 / multiplier_diag_;
    return *this;
  }
  template <typename Rhs> Eigen::VectorXd solve(const Rhs& b) const { return inv_.cwiseProduct(b); }
  Eigen::ComputationInfo info() const { return Eigen::Success; }

private:
  int nv_ = 0;
  Eigen::VectorXd pressure_diag_;
  double multiplier_diag_ = 1.0;
  Eigen::VectorXd inv_;
};

double relative_residual(const Eigen::SparseMatrix<double>& m, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double r = (m * x - b).norm();
  return nb > 0.0 ? r / nb : r;
}

#ifdef STOKESVEM_HAVE_UMFPACK
using SparseFactor = Eigen::UmfPackLU<Eigen::SparseMatrix<double>>;
#else
using SparseFactor = Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>>;
#endif

// Direct solver for [K0 m; m^T 0] where K0 = [nu A, B^T; B, 0] is singular
// exactly along z, the piecewise constant pressure equal to 1. The dense
// border row is kept out of the factorization: K0 is factored with one
// pressure coefficient pinned, and the border is handled in closed form.
class BorderedSolver {
public:
  explicit BorderedSolver(const GlobalSystem& sys) : n_(sys.size() - 1) {
    k0_ = sys.matrix.topLeftCorner(n_, n_);
    m_ = sys.matrix.col(n_).head(n_);
    z_ = Eigen::VectorXd::Zero(n_);
    for (int c = 0; c < sys.num_pressure / sys.pressure_block; ++c) z_[sys.num_velocity + c * sys.pressure_block] = 1.0;
    pin_ = sys.num_velocity;
    const double scale = std::max(m_.cwiseAbs().maxCoeff(), 1e-300);
    k0_.coeffRef(pin_, pin_) += scale;
    k0_.makeCompressed();
    factor_.compute(k0_);
    if (factor_.info() != Eigen::Success) fail(ErrorKind::Solver, "sparse LU factorization failed");
    mz_ = m_.dot(z_);
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const {
    const Eigen::VectorXd b = rhs.head(n_);
    const double lambda = z_.dot(b) / mz_;
    const Eigen::VectorXd shifted = b - lambda * m_;
    const Eigen::VectorXd y = factor_.solve(shifted);
    Eigen::VectorXd x(n_ + 1);
    x.head(n_) = y + ((rhs[n_] - m_.dot(y)) / mz_) * z_;
    x[n_] = lambda;
    return x;
  }

private:
  int n_;
  int pin_ = 0;
  Eigen::VectorXd m_, z_;
  double mz_ = 1.0;
  // The factorization keeps pointers into this matrix.
  Eigen::SparseMatrix<double> k0_;
  SparseFactor factor_;
};

Eigen::VectorXd solve_saddle(const GlobalSystem& sys, const std::vector<Eigen::VectorXd>& pressure_gram,
                             const SolverOptions& opt, double* residual, int* iterations) {
  Eigen::VectorXd x;
  *iterations = 0;
  if (opt.iterative) {
    Eigen::VectorXd pdiag(sys.num_pressure);
    double schur = 0.0;
    for (int i = 0; i < sys.num_pressure; ++i) {
      pdiag[i] = pressure_gram[i / sys.pressure_block][i % sys.pressure_block] / sys.nu;
      schur += sys.pressure_weights[i] * sys.pressure_weights[i] / pdiag[i];
    }
    Eigen::MINRES<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, SaddlePreconditioner> minres;
    minres.preconditioner().configure(sys.num_velocity, pdiag, schur);
    minres.setTolerance(opt.tolerance);
    minres.setMaxIterations(opt.max_iterations);
    minres.compute(sys.matrix);
    x = minres.solve(sys.rhs);
    *iterations = static_cast<int>(minres.iterations());
    if (minres.info() != Eigen::Success)
      fail(ErrorKind::Solver, "MINRES did not converge in " + std::to_string(minres.iterations()) + " iterations");
  } else {
    const BorderedSolver lu(sys);
    x = lu.solve(sys.rhs);
    // A few steps of iterative refinement against round-off growth.
    for (int it = 0; it < 3; ++it) {
      const Eigen::VectorXd r = sys.rhs - sys.matrix * x;
      if (r.norm() <= 1e-15 * sys.rhs.norm()) break;
      x += lu.solve(r);
      ++*iterations;
    }
  }
  *residual = relative_residual(sys.matrix, x, sys.rhs);
  return x;
}

void postprocess(const Discretization& disc, DiscreteSolution& sol) {
  const int nc = disc.mesh().num_cells();
  sol.pi.resize(nc);
  sol.strain.resize(nc);
  sol.divergence.resize(nc);
  for (int c = 0; c < nc; ++c) {
    const Eigen::VectorXd u = disc.gather(sol.velocity, c);
    const ProjectorPack& p = disc.cell(c).pack;
    sol.pi[c] = p.pi * u;
    sol.strain[c] = p.eps * u;
    sol.divergence[c] = p.div * u;
  }
}

std::vector<Eigen::VectorXd> pressure_gram_diagonals(const Discretization& disc, int degree) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& cb : disc.cells()) out.push_back(cb.element.scalar_gram(degree).diagonal());
  return out;
}

} // namespace

GlobalSystem assemble(const Discretization& disc, const ProblemData& data, Method method) {
  if (method == Method::Reduced) fail(ErrorKind::InvalidArgument, "assemble: use solve_reduced for the reduced method");
  const auto loads = disc.loads(data.load, method);
  const int pblock = disc.pressure_dim();
  return build_saddle(disc.num_dofs(), disc.boundary_mask(), disc.boundary_values(data.dirichlet),
                      disc.mesh().num_cells(), pblock, data.nu, [&](int c) {
                        const CellBlock& cb = disc.cell(c);
                        LocalSystem loc;
                        loc.a = cb.local.stiffness;
                        loc.b = cb.pack.div_moments;
                        loc.f = loads[c];
                        loc.mean = cb.element.scalar_gram(disc.k() - 1).row(0);
                        loc.map = cb.dofs;
                        return loc;
                      });
}

DiscreteSolution solve(const Discretization& disc, const GlobalSystem& system, Method method, const SolverOptions& options) {
  DiscreteSolution sol;
  sol.method = method;
  sol.k = disc.k();
  const Eigen::VectorXd x =
      solve_saddle(system, pressure_gram_diagonals(disc, disc.k() - 1), options, &sol.residual, &sol.iterations);
  sol.velocity = system.fixed_values;
  for (int i = 0; i < system.num_velocity; ++i) sol.velocity[system.velocity_dofs[i]] = x[i];
  const int nc = disc.mesh().num_cells();
  sol.pressure.resize(nc);
  sol.pressure_mean.resize(nc);
  for (int c = 0; c < nc; ++c) {
    sol.pressure[c] = x.segment(system.num_velocity + c * system.pressure_block, system.pressure_block);
    const CellBlock& cb = disc.cell(c);
    sol.pressure_mean[c] =
        cb.element.scalar_gram(disc.k() - 1).row(0).dot(sol.pressure[c]) / cb.element.cell().area;
  }
  postprocess(disc, sol);
  return sol;
}

Eigen::MatrixXd reduced_extension(const VemElement& el) {
  const DofLayout& L = el.layout();
  const int nr = L.interior_offset() + L.num_complement;
  Eigen::MatrixXd ext = Eigen::MatrixXd::Zero(L.size(), nr);
  ext.topLeftCorner(nr, nr).setIdentity();
  const CellGeometry& cell = el.cell();
  const MonomialBasis& pk1 = el.basis_k1();
  const Eigen::RowVectorXd mean = el.scalar_gram(el.k() - 1).row(0) / cell.area;
  // Gradient DoF i pairs with h grad m_{i+1}; its value is
  // (h/|K|) (v.n, m - Q_0 m)_{dK} whenever div v is constant.
  for (int i = 0; i < L.num_gradient; ++i) {
    const int a = i + 1;
    const Eigen::RowVectorXd row = el.boundary_functional([&](int e, const Vec2& x) {
      return Vec2((pk1.eval(x)[a] - mean[a]) * cell.edges[e].normal);
    });
    ext.row(L.gradient_offset() + i).head(L.interior_offset()) =
        (cell.diameter / cell.area) * row.head(L.interior_offset());
  }
  return ext;
}

std::vector<Eigen::VectorXd> recover_pressure(const Discretization& disc, const ProblemData& data,
                                              const Eigen::VectorXd& velocity) {
  const auto loads = disc.loads(data.load, Method::Standard);
  const int nc = disc.mesh().num_cells();
  const int n1 = disc.pressure_dim();
  std::vector<Eigen::VectorXd> out(nc);
  for (int c = 0; c < nc; ++c) {
    const CellBlock& cb = disc.cell(c);
    const DofLayout& L = cb.element.layout();
    const Eigen::VectorXd u = disc.gather(velocity, c);
    const Eigen::VectorXd au = cb.local.stiffness * u;
    Eigen::MatrixXd m(n1, n1);
    Eigen::VectorXd rhs(n1);
    for (int i = 0; i < L.num_gradient; ++i) {
      const int d = L.gradient_offset() + i;
      m.row(i) = cb.pack.div_moments.col(d).transpose();
      rhs[i] = loads[c][d] - data.nu * au[d];
    }
    m.row(n1 - 1) = cb.element.scalar_gram(disc.k() - 1).row(0);
    rhs[n1 - 1] = 0.0;
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible()) {
      std::ostringstream os;
      os << "local pressure recovery is singular on cell " << c;
      fail(ErrorKind::Geometry, os.str());
    }
    out[c] = lu.solve(rhs);
  }
  return out;
}

DiscreteSolution solve_reduced(const Discretization& disc, const ProblemData& data, const SolverOptions& options) {
  const PolyMesh& mesh = disc.mesh();
  const int k = disc.k();
  const int nc = mesh.num_cells();
  const int edge_dofs = mesh.num_edges() * 2 * k;
  const int ncomp = poly_dim(k - 3);
  const int nr = edge_dofs + nc * ncomp;

  std::vector<Eigen::MatrixXd> ext(nc);
  for (int c = 0; c < nc; ++c) ext[c] = reduced_extension(disc.cell(c).element);
  std::vector<bool> fixed(nr, false);
  for (int i = 0; i < edge_dofs; ++i) fixed[i] = disc.boundary_mask()[i];
  Eigen::VectorXd fixed_values = Eigen::VectorXd::Zero(nr);
  fixed_values.head(edge_dofs) = disc.boundary_values(data.dirichlet).head(edge_dofs);
  const auto loads = disc.loads(data.load, Method::Standard);

  const GlobalSystem sys = build_saddle(nr, fixed, fixed_values, nc, 1, data.nu, [&](int c) {
    const CellBlock& cb = disc.cell(c);
    const Eigen::MatrixXd& e = ext[c];
    LocalSystem loc;
    loc.a = e.transpose() * cb.local.stiffness * e;
    loc.b = cb.pack.div_moments.topRows(1) * e;
    loc.f = e.transpose() * loads[c];
    loc.mean = Eigen::RowVectorXd::Constant(1, cb.element.cell().area);
    const int ne = cb.element.layout().interior_offset();
    loc.map.assign(cb.dofs.begin(), cb.dofs.begin() + ne);
    for (int j = 0; j < ncomp; ++j) loc.map.push_back(edge_dofs + c * ncomp + j);
    return loc;
  });

  std::vector<Eigen::VectorXd> area_diag(nc);
  for (int c = 0; c < nc; ++c) area_diag[c] = Eigen::VectorXd::Constant(1, mesh.geometry(c).area);
  DiscreteSolution sol;
  sol.method = Method::Reduced;
  sol.k = k;
  const Eigen::VectorXd x = solve_saddle(sys, area_diag, options, &sol.residual, &sol.iterations);
  Eigen::VectorXd reduced = fixed_values;
  for (int i = 0; i < sys.num_velocity; ++i) reduced[sys.velocity_dofs[i]] = x[i];

  // Lift to the full DoF vector.
  sol.velocity = Eigen::VectorXd::Zero(disc.num_dofs());
  sol.velocity.head(edge_dofs) = reduced.head(edge_dofs);
  for (int c = 0; c < nc; ++c) {
    const CellBlock& cb = disc.cell(c);
    const int ne = cb.element.layout().interior_offset();
    Eigen::VectorXd r(ne + ncomp);
    for (int i = 0; i < ne; ++i) r[i] = reduced[cb.dofs[i]];
    r.tail(ncomp) = reduced.segment(edge_dofs + c * ncomp, ncomp);
    const Eigen::VectorXd full = ext[c] * r;
    for (std::size_t i = ne; i < cb.dofs.size(); ++i) sol.velocity[cb.dofs[i]] = full[i];
  }
  sol.pressure_mean = x.segment(sys.num_velocity, nc);
  const auto perp = recover_pressure(disc, data, sol.velocity);
  sol.pressure.resize(nc);
  for (int c = 0; c < nc; ++c) {
    sol.pressure[c] = perp[c];
    sol.pressure[c][0] += sol.pressure_mean[c];
  }
  postprocess(disc, sol);
  return sol;
}

DiscreteSolution solve_stokes(const Discretization& disc, const ProblemData& data, Method method,
                              const SolverOptions& options) {
  if (method == Method::Reduced) return solve_reduced(disc, data, options);
  return solve(disc, assemble(disc, data, method), method, options);
}

} // namespace svem
