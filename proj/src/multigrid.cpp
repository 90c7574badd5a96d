#include "stvanka/multigrid.hpp"

#include <cmath>

#include "stvanka/parallel.hpp"

namespace stvanka {

MultilevelSpace::MultilevelSpace(const MeshHierarchy &hierarchy, int r, int k) {
  for (const Mesh &m : hierarchy.levels) spaces_.push_back(std::make_unique<SlabSpace>(m, r, k));
  transfers_.resize(spaces_.size());
  for (std::size_t l = 1; l < spaces_.size(); ++l)
    transfers_[l] = Transfer(*spaces_[l - 1], *spaces_[l], hierarchy.parents[l]);
}

Eigen::MatrixXd VankaSmoother::local_matrix(const SlabSpace &space, const SlabBlockMatrix &J,
                                            int K) {
  const DofMap &dofs = space.dofs();
  const int nb = dofs.local_block();
  const int nt = dofs.n_time();
  const auto pos = J.pattern().element_positions(K);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nt * nb, nt * nb);
  for (int b = 0; b < nt; ++b)
    for (int a = 0; a < nt; ++a) {
      const auto block = J.block(b, a);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
          const int p = pos[i * nb + j];
          if (p >= 0) A(b * nb + i, a * nb + j) = block[p];
        }
    }
  return A;
}

VankaSmoother::VankaSmoother(const SlabSpace &space, const SlabBlockMatrix &J, double omega,
                             int threads)
    : space_(&space), J_(&J), omega_(omega), threads_(threads) {
  const int ne = space.dofs().n_elements();
  lu_.resize(ne);
  std::vector<char> singular(ne, 0);
  parallel_for(ne, threads_, [&](int K) {
    lu_[K].compute(local_matrix(space, J, K));
    const double rc = lu_[K].rcond();
    if (!std::isfinite(rc) || rc < 1e-15) singular[K] = 1;
  });
  for (int K = 0; K < ne; ++K)
    if (singular[K])
      throw SolverError("singular local Vanka matrix on element " + std::to_string(K), {}, K);
}

LocalSlabVector VankaSmoother::local_update_from_defect(int K, const SlabVector &d,
                                                        const SlabVector &defect) const {
  const DofMap &dofs = space_->dofs();
  LocalSlabVector y = restrict_local(d, K, dofs);
  if (omega_ != 0.0) y += omega_ * lu_[K].solve(restrict_local(defect, K, dofs));
  return y;
}

LocalSlabVector VankaSmoother::local_update(int K, const SlabVector &d, const SlabVector &b) const {
  const SlabVector defect = b - (*J_) * d;
  return local_update_from_defect(K, d, defect);
}

void VankaSmoother::smooth(const SlabVector &b, SlabVector &d, int sweeps) const {
  if (sweeps < 1) throw std::invalid_argument("Vanka smoothing needs at least one sweep");
  const DofMap &dofs = space_->dofs();
  const int ne = dofs.n_elements();
  const int n = dofs.size();
  std::vector<LocalSlabVector> updates(ne);
  SlabVector z(n);
  std::vector<int> counter(n);
  for (int sweep = 0; sweep < sweeps; ++sweep) {
    const SlabVector defect = b - (*J_) * d;
    parallel_for(ne, threads_, [&](int K) { updates[K] = local_update_from_defect(K, d, defect); });
    z.setZero();
    std::fill(counter.begin(), counter.end(), 0);
    for (int K = 0; K < ne; ++K) extend_accumulate(updates[K], K, dofs, z, counter);
    for (int mu = 0; mu < n; ++mu) {
      if (counter[mu] == 0)
        throw std::logic_error("degree of freedom " + std::to_string(mu) +
                               " is not covered by any element");
      d[mu] = z[mu] / counter[mu];
    }
  }
}

DirectSolver::DirectSolver(const SlabBlockMatrix &J) {
  Eigen::SparseMatrix<double> A = J.to_sparse();
  A.makeCompressed();
  lu_.analyzePattern(A);
  lu_.factorize(A);
  if (lu_.info() != Eigen::Success) throw SolverError("singular coarse matrix: " + lu_.lastErrorMessage());
}

SlabVector DirectSolver::solve(const SlabVector &b) const {
  SlabVector x = lu_.solve(b);
  if (!x.allFinite()) throw SolverError("direct solve produced non-finite values");
  return x;
}

MultigridPreconditioner::MultigridPreconditioner(const MultilevelSpace &spaces,
                                                 const SlabBlockMatrix &fine_jacobian,
                                                 const SlabVector &X, const TimeSlab &slab,
                                                 const ProblemData &data,
                                                 const MultigridOptions &options)
    : spaces_(&spaces), options_(options), fine_(&fine_jacobian) {
  if (options.smoothing_steps < 1) throw std::invalid_argument("J_max must be at least 1");
  if (!(options.omega > 0.0 && options.omega <= 1.0))
    throw std::invalid_argument("relaxation factor must lie in (0, 1]");
  const int L = spaces.finest();
  coarse_matrices_.resize(L);
  SlabVector Xl = X;
  TimeSlab sl = slab;
  for (int l = L - 1; l >= 0; --l) {
    const Transfer &T = spaces.transfer(l + 1);
    Xl = T.inject_slab(Xl);
    sl.trace = T.inject_velocity(sl.trace);
    coarse_matrices_[l] = assemble_jacobian(spaces.level(l), Xl, sl, data);
  }
  smoothers_.resize(L + 1);
  for (int l = 1; l <= L; ++l)
    smoothers_[l] = std::make_unique<VankaSmoother>(spaces.level(l), matrix(l), options.omega,
                                                    options.threads);

  Eigen::SparseMatrix<double> A0 = matrix(0).to_sparse();
  A0.makeCompressed();
  coarse_lu_.analyzePattern(A0);
  coarse_lu_.factorize(A0);
  if (coarse_lu_.info() != Eigen::Success)
    throw SolverError("singular coarse matrix: " + coarse_lu_.lastErrorMessage());
}

const SlabBlockMatrix &MultigridPreconditioner::matrix(int level) const {
  if (level == finest()) return *fine_;
  return coarse_matrices_.at(level);
}

SlabVector MultigridPreconditioner::coarse_solve(const SlabVector &b) const {
  SlabVector x = coarse_lu_.solve(b);
  if (!x.allFinite()) throw SolverError("coarse solve produced non-finite values");
  return x;
}

SlabVector MultigridPreconditioner::vcycle(int level, const SlabVector &b) const {
  if (level < 0 || level > finest()) throw std::out_of_range("multigrid level out of range");
  if (level == 0) return coarse_solve(b);
  const SlabBlockMatrix &J = matrix(level);
  const VankaSmoother &S = *smoothers_[level];
  const Transfer &T = spaces_->transfer(level);

  SlabVector d = SlabVector::Zero(b.size());
  S.smooth(b, d, options_.smoothing_steps);
  const SlabVector defect = b - J * d;
  d += T.prolongate(vcycle(level - 1, T.restrict(defect)));
  S.smooth(b, d, options_.smoothing_steps);
  return d;
}

}  // namespace stvanka
