#pragma once

#include <Eigen/Core>

#include <functional>

#include "stvanka/slab_system.hpp"
#include "stvanka/space.hpp"

namespace stvanka {

struct ProblemData {
  double viscosity = 1e-3;
  /// f(x, t); empty means zero.
  std::function<Vec2(Vec2, double)> body_force;
  /// g(marker, x, t) on Dirichlet faces; empty means zero.
  std::function<Vec2(int, Vec2, double)> dirichlet;
  /// v_0(x); empty means zero.
  std::function<Vec2(Vec2)> initial_velocity;
  double gamma1 = 35.0;
  double gamma2 = 35.0;
  /// Switches the convective term off (Stokes limit).
  bool convection = true;

  void validate() const;
};

/// Time slab I_n = (t_start, t_end] with the velocity trace v(t_{n-1}^-).
struct TimeSlab {
  int index = 1;
  double t_start = 0.0;
  double t_end = 0.0;
  Eigen::VectorXd trace;  // length R

  double length() const { return t_end - t_start; }
  double time_at(double reference) const { return t_start + length() * reference; }
};

/// F_n(X): the dG(k) slab equations, operator part minus load.
SlabVector assemble_residual(const SlabSpace &space, const SlabVector &X, const TimeSlab &slab,
                             const ProblemData &data);

/// J_n(X) = dF_n/dX, written into a matrix built from space.make_matrix().
void assemble_jacobian(const SlabSpace &space, const SlabVector &X, const TimeSlab &slab,
                       const ProblemData &data, SlabBlockMatrix &J);
SlabBlockMatrix assemble_jacobian(const SlabSpace &space, const SlabVector &X,
                                  const TimeSlab &slab, const ProblemData &data);

/// Time integral of the boundary form B(g, (psi, xi)) over the slab.
SlabVector nitsche_rhs(const SlabSpace &space, const TimeSlab &slab, const ProblemData &data);

/// Time integral of <f, psi> plus nitsche_rhs.
SlabVector load_vector(const SlabSpace &space, const TimeSlab &slab, const ProblemData &data);

/// dG(k) slab equations for the scalar model u' = lambda u, assembled with
/// the same temporal coupling as the flow problem.
Eigen::VectorXd scalar_slab_residual(const TemporalBasis &basis, double tau, double lambda,
                                     const Eigen::VectorXd &U, double u_previous);

/// Velocity part of the last temporal block, i.e. v(t_n^-).
Eigen::VectorXd end_trace(const DofMap &dofs, const SlabVector &X);

}  // namespace stvanka
