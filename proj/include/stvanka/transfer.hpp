#pragma once

#include <Eigen/SparseCore>

#include <vector>

#include "stvanka/mesh.hpp"
#include "stvanka/slab_system.hpp"
#include "stvanka/space.hpp"

namespace stvanka {

/// Grid transfer between two nested levels. Prolongation is the natural
/// embedding of the coarse finite element functions, applied identically to
/// every temporal block; restriction is its transpose.
class Transfer {
public:
  Transfer() = default;
  Transfer(const SlabSpace &coarse, const SlabSpace &fine, const std::vector<ParentInfo> &parents);

  SlabVector prolongate(const SlabVector &coarse) const;
  SlabVector restrict(const SlabVector &fine) const;

  /// Velocity injection fine -> coarse (coarse nodes are fine nodes), for
  /// vectors of length R; used to carry iterates and traces to coarse levels.
  Eigen::VectorXd inject_velocity(const Eigen::VectorXd &fine) const;
  /// Injection of all temporal velocity blocks; pressures are set to zero.
  SlabVector inject_slab(const SlabVector &fine) const;

  /// Spatial prolongation matrix, (R_f + S_f) x (R_c + S_c).
  const Eigen::SparseMatrix<double, Eigen::RowMajor> &matrix() const { return P_; }

private:
  Eigen::SparseMatrix<double, Eigen::RowMajor> P_;
  Eigen::SparseMatrix<double, Eigen::RowMajor> R_;
  std::vector<int> coarse_to_fine_node_;
  int coarse_block_ = 0;
  int fine_block_ = 0;
  int coarse_velocity_ = 0;
  int fine_velocity_ = 0;
  int n_time_ = 0;
};

/// Coefficients in the child's centered monomial basis of the parent's
/// monomial `s`: parent ((x - c_p) / h_p)^a ((y - c_p) / h_p)^b rewritten in
/// ((x - c_c) / h_c)^i ((y - c_c) / h_c)^j.
std::vector<double> recenter_monomial(const PressureBasisPdisc &basis, int s, Vec2 parent_center,
                                      double parent_h, Vec2 child_center, double child_h);

}  // namespace stvanka
