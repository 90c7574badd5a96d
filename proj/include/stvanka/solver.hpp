#pragma once

#include <functional>
#include <vector>

#include "stvanka/assembly.hpp"
#include "stvanka/multigrid.hpp"
#include "stvanka/slab_system.hpp"

namespace stvanka {

using LinearOperator = std::function<SlabVector(const SlabVector &)>;

struct GmresOptions {
  double tolerance = 1e-9;  // absolute, on ||b - A x||_2
  int max_iterations = 200;
  int restart = 0;          // 0: full basis up to max_iterations
};

struct GmresResult {
  SlabVector x;
  int iterations = 0;
  double residual = 0.0;  // true residual of x
  std::vector<double> history;
};

/// Right-preconditioned GMRES from x0 = 0. An empty preconditioner means
/// the identity. Throws SolverError if the tolerance is not reached.
GmresResult gmres_solve(const LinearOperator &A, const SlabVector &b,
                        const LinearOperator &preconditioner, const GmresOptions &options = {});
GmresResult gmres_solve(const SlabBlockMatrix &J, const SlabVector &b,
                        const LinearOperator &preconditioner, const GmresOptions &options = {});

enum class PreconditionerKind { multigrid, direct, none };

struct NewtonOptions {
  double tolerance = 1e-8;
  int max_iterations = 25;
  double min_damping = 1.0 / 1024.0;
  double sufficient_decrease = 1e-4;
  PreconditionerKind preconditioner = PreconditionerKind::multigrid;
  GmresOptions gmres;
  MultigridOptions multigrid;
};

/// One row of the Newton history; iteration 0 holds the initial residual.
struct NewtonStep {
  int iteration = 0;
  double damping = 0.0;
  int gmres_iterations = 0;
  double residual = 0.0;        // ||F(X^m)|| after the step
  double gmres_residual = 0.0;  // final linear residual of the step
};

struct NewtonResult {
  SlabVector X;
  std::vector<NewtonStep> steps;

  int iterations() const { return static_cast<int>(steps.size()) - 1; }
  int gmres_iterations() const;
  double residual() const { return steps.back().residual; }
};

/// Damped Newton for F_n(X) = 0 on the finest level of `spaces`.
NewtonResult newton_solve(const MultilevelSpace &spaces, SlabVector X0, const TimeSlab &slab,
                          const ProblemData &data, const NewtonOptions &options = {});

/// Initial slab iterate: the trace at every temporal node and the pressure
/// of the last node of the previous slab (zero if `previous` is null).
SlabVector initial_guess(const DofMap &dofs, const Eigen::VectorXd &trace,
                         const SlabVector *previous = nullptr);

}  // namespace stvanka
