#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "stvanka/mesh.hpp"

namespace stvanka {

/// Slab vector X_n = (v^{n,0}, p^{n,0}, ..., v^{n,k}, p^{n,k}). Within each
/// temporal block the velocity comes first (component-major: all x-values,
/// then all y-values), followed by the element-wise pressure coefficients.
using SlabVector = Eigen::VectorXd;
/// Element-local slab vector ordered like the local index set: for each
/// temporal node the R̂ velocity entries, then the Ŝ pressure entries.
using LocalSlabVector = Eigen::VectorXd;

/// Degrees of freedom of (Q_r)^2 x P_{r-1}^disc on one mesh, replicated for
/// the k+1 temporal nodes of a slab.
class DofMap {
public:
  DofMap(const Mesh &mesh, int r, int k);

  int velocity_order() const { return r_; }
  int temporal_degree() const { return k_; }
  int n_time() const { return k_ + 1; }

  int n_nodes() const { return n_nodes_; }
  int n_velocity() const { return 2 * n_nodes_; }        // R
  int n_pressure() const { return n_pressure_; }         // S
  int block_size() const { return 2 * n_nodes_ + n_pressure_; }  // R + S
  int size() const { return n_time() * block_size(); }

  int local_scalar() const { return (r_ + 1) * (r_ + 1); }
  int local_velocity() const { return 2 * local_scalar(); }  // R̂
  int local_pressure() const { return r_ * (r_ + 1) / 2; }   // Ŝ
  int local_block() const { return local_velocity() + local_pressure(); }
  int local_size() const { return n_time() * local_block(); }

  int n_elements() const { return static_cast<int>(element_nodes_.size() / local_scalar()); }

  /// Global Q_r lattice nodes of element K, in local lattice order.
  std::span<const int> element_nodes(int element) const {
    return {element_nodes_.data() + element * local_scalar(),
            static_cast<std::size_t>(local_scalar())};
  }
  /// Spatial (within-block) global indices of the local block of K.
  std::span<const int> element_spatial_dofs(int element) const {
    return {spatial_dofs_.data() + element * local_block(),
            static_cast<std::size_t>(local_block())};
  }
  /// dof(K, mu_hat) for mu_hat in [0, (k+1)(R̂+Ŝ)).
  int dof(int element, int local) const {
    const int l = local / local_block();
    return l * block_size() + element_spatial_dofs(element)[local % local_block()];
  }

  int velocity_index(int component, int node) const { return component * n_nodes_ + node; }
  int pressure_index(int element, int s) const {
    return 2 * n_nodes_ + element * local_pressure() + s;
  }
  int block_offset(int l) const { return l * block_size(); }

  const Vec2 &node_point(int node) const { return node_points_[node]; }
  const std::vector<Vec2> &node_points() const { return node_points_; }
  /// Boundary faces with a Dirichlet marker, ascending.
  const std::vector<int> &dirichlet_faces() const { return dirichlet_faces_; }

private:
  int r_;
  int k_;
  int n_nodes_ = 0;
  int n_pressure_ = 0;
  std::vector<int> element_nodes_;
  std::vector<int> spatial_dofs_;
  std::vector<Vec2> node_points_;
  std::vector<int> dirichlet_faces_;
};

/// (R_K d): local entries of a global slab vector.
LocalSlabVector restrict_local(const SlabVector &d, int element, const DofMap &map);

/// z[dof(K, .)] += y_K and p[dof(K, .)] += 1.
void extend_accumulate(const LocalSlabVector &y, int element, const DofMap &map, SlabVector &z,
                       std::vector<int> &counter);

/// Compressed row pattern of one spatial (R+S) x (R+S) block, plus the
/// positions of every element-local pair inside it.
class SparsityPattern {
public:
  explicit SparsityPattern(const DofMap &map);

  int rows() const { return static_cast<int>(row_ptr_.size()) - 1; }
  std::size_t nnz() const { return cols_.size(); }
  std::span<const int> row_ptr() const { return row_ptr_; }
  std::span<const int> cols() const { return cols_; }

  /// Position of (i, j) in the value array, -1 when structurally zero.
  int find(int i, int j) const;
  /// Positions of local pairs (nu_hat, mu_hat) of one spatial block of K,
  /// row-major over local_block() x local_block(); -1 for pressure pairs.
  std::span<const int> element_positions(int element) const {
    const std::size_t n = static_cast<std::size_t>(local_block_) * local_block_;
    return {element_positions_.data() + element * n, n};
  }
  int local_block() const { return local_block_; }

private:
  std::vector<int> row_ptr_;
  std::vector<int> cols_;
  std::vector<int> element_positions_;
  int local_block_;
};

/// (k+1) x (k+1) grid of saddle-point blocks with a common sparsity pattern.
/// Block (a, b) maps temporal block b of the input to block a of the output.
class SlabBlockMatrix {
public:
  SlabBlockMatrix() = default;
  SlabBlockMatrix(std::shared_ptr<const SparsityPattern> pattern, int n_time);

  int n_time() const { return n_time_; }
  int block_size() const { return pattern_->rows(); }
  int size() const { return n_time_ * block_size(); }
  const SparsityPattern &pattern() const { return *pattern_; }

  std::span<double> block(int a, int b) {
    return {values_.data() + (a * n_time_ + b) * pattern_->nnz(), pattern_->nnz()};
  }
  std::span<const double> block(int a, int b) const {
    return {values_.data() + (a * n_time_ + b) * pattern_->nnz(), pattern_->nnz()};
  }
  double entry(int a, int b, int i, int j) const;

  void set_zero();
  /// y = J x.
  void multiply(const SlabVector &x, SlabVector &y) const;
  SlabVector operator*(const SlabVector &x) const;

  Eigen::SparseMatrix<double> to_sparse() const;
  Eigen::MatrixXd to_dense() const;

private:
  std::shared_ptr<const SparsityPattern> pattern_;
  int n_time_ = 0;
  std::vector<double> values_;
};

SlabVector block_matvec(const SlabBlockMatrix &J, const SlabVector &x);

/// Debug export: one line `a b i j value` per stored nonzero.
void write_matrix(std::ostream &out, const SlabBlockMatrix &J);
/// Debug export: one line `a i value` per entry.
void write_vector(std::ostream &out, const SlabVector &x, int block_size);

}  // namespace stvanka
