#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "stvanka/assembly.hpp"
#include "stvanka/mesh.hpp"
#include "stvanka/slab_system.hpp"
#include "stvanka/space.hpp"
#include "stvanka/transfer.hpp"

namespace stvanka {

class SolverError : public std::runtime_error {
public:
  SolverError(const std::string &what, std::vector<double> history = {}, int element = -1)
      : std::runtime_error(what), history_(std::move(history)), element_(element) {}
  const std::vector<double> &history() const { return history_; }
  int element() const { return element_; }

private:
  std::vector<double> history_;
  int element_;
};

/// Spaces on every level of a mesh hierarchy plus the transfers between
/// consecutive levels (transfers[l] connects l-1 and l; transfers[0] is empty).
class MultilevelSpace {
public:
  MultilevelSpace(const MeshHierarchy &hierarchy, int r, int k);

  int finest() const { return static_cast<int>(spaces_.size()) - 1; }
  const SlabSpace &level(int l) const { return *spaces_.at(l); }
  const SlabSpace &fine() const { return *spaces_.back(); }
  const Transfer &transfer(int l) const { return transfers_.at(l); }

private:
  std::vector<std::unique_ptr<SlabSpace>> spaces_;
  std::vector<Transfer> transfers_;
};

struct MultigridOptions {
  double omega = 0.7;
  int smoothing_steps = 4;  // J_max
  int threads = 1;
};

/// Element-wise Vanka smoother of one level: factorized local matrices J_K
/// and the averaged additive update over all elements.
class VankaSmoother {
public:
  VankaSmoother(const SlabSpace &space, const SlabBlockMatrix &J, double omega, int threads = 1);

  /// (J_K)_{nu, mu} = J_{dof(K, nu), dof(K, mu)}.
  static Eigen::MatrixXd local_matrix(const SlabSpace &space, const SlabBlockMatrix &J, int K);

  /// S_K(d) = R_K d + omega J_K^{-1} R_K (b - J d).
  LocalSlabVector local_update(int K, const SlabVector &d, const SlabVector &b) const;
  /// Same, with the global defect b - J d already computed.
  LocalSlabVector local_update_from_defect(int K, const SlabVector &d,
                                           const SlabVector &defect) const;

  /// `sweeps` averaged Vanka sweeps on J d = b, starting from d.
  void smooth(const SlabVector &b, SlabVector &d, int sweeps) const;

  double omega() const { return omega_; }
  const Eigen::PartialPivLU<Eigen::MatrixXd> &factorization(int K) const { return lu_[K]; }

private:
  const SlabSpace *space_;
  const SlabBlockMatrix *J_;
  double omega_;
  int threads_;
  std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
};

/// Geometric multigrid V-cycle for the slab Jacobian: Vanka smoothing on
/// levels 1..L, sparse direct solve on level 0, re-discretized level
/// operators built from the injected Newton iterate.
class MultigridPreconditioner {
public:
  /// `fine_jacobian` must outlive the preconditioner.
  MultigridPreconditioner(const MultilevelSpace &spaces, const SlabBlockMatrix &fine_jacobian,
                          const SlabVector &X, const TimeSlab &slab, const ProblemData &data,
                          const MultigridOptions &options = {});

  int finest() const { return spaces_->finest(); }
  const SlabBlockMatrix &matrix(int level) const;
  const VankaSmoother &smoother(int level) const { return *smoothers_.at(level); }

  SlabVector vcycle(int level, const SlabVector &b) const;
  SlabVector apply(const SlabVector &b) const { return vcycle(finest(), b); }
  SlabVector coarse_solve(const SlabVector &b) const;

private:
  const MultilevelSpace *spaces_;
  MultigridOptions options_;
  const SlabBlockMatrix *fine_;
  std::vector<SlabBlockMatrix> coarse_matrices_;  // levels 0..L-1
  std::vector<std::unique_ptr<VankaSmoother>> smoothers_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> coarse_lu_;
};

/// Sparse direct solver for one slab matrix.
class DirectSolver {
public:
  explicit DirectSolver(const SlabBlockMatrix &J);
  SlabVector solve(const SlabVector &b) const;

private:
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

}  // namespace stvanka
