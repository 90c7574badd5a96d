#pragma once

#include <Eigen/Core>

#include <functional>
#include <memory>
#include <vector>

#include "stvanka/basis.hpp"
#include "stvanka/mesh.hpp"
#include "stvanka/slab_system.hpp"

namespace stvanka {

/// Quadrature data of one element, physical quantities at each point.
struct ElementQuadrature {
  std::vector<double> jxw;
  std::vector<Vec2> points;
  std::vector<Vec2> gradients;  // [q * n_scalar + i]
  std::vector<double> pressure; // [q * n_pressure + s]
};

/// Quadrature data of one Dirichlet boundary face.
struct FaceQuadrature {
  int face = -1;
  int element = -1;
  int marker = -1;
  double h = 0.0;  // diameter of the adjacent element
  std::vector<double> jxw;
  std::vector<Vec2> points;
  std::vector<Vec2> normals;
  std::vector<double> values;   // [q * n_scalar + i]
  std::vector<Vec2> gradients;  // [q * n_scalar + i]
  std::vector<double> pressure; // [q * n_pressure + s]
};

/// Finite element space of one mesh level: mesh, degrees of freedom,
/// temporal basis, sparsity pattern and cached quadrature data.
class SlabSpace {
public:
  SlabSpace(Mesh mesh, int r, int k);

  const Mesh &mesh() const { return mesh_; }
  const DofMap &dofs() const { return dofs_; }
  const TemporalBasis &time() const { return time_; }
  const ScalarBasisQr &velocity_basis() const { return qr_; }
  const PressureBasisPdisc &pressure_basis() const { return pdisc_; }
  std::shared_ptr<const SparsityPattern> pattern() const { return pattern_; }
  SlabBlockMatrix make_matrix() const { return SlabBlockMatrix(pattern_, dofs_.n_time()); }

  int n_scalar() const { return qr_.size(); }
  int n_quad() const { return static_cast<int>(volume_rule_.size()); }
  /// Reference basis values at the volume points, [q * n_scalar + i].
  std::span<const double> reference_values() const { return ref_values_; }
  const ElementQuadrature &element_quadrature(int K) const { return elements_[K]; }
  const std::vector<FaceQuadrature> &dirichlet_faces() const { return faces_; }

  /// Temporal coupling C(b, a) = w_b chi_a'(t_b) + chi_b(0) chi_a(0) of the
  /// time-derivative and jump terms on the reference interval.
  const Eigen::MatrixXd &temporal_coupling() const { return coupling_; }

  /// Face quadrature data for an arbitrary boundary face.
  FaceQuadrature face_quadrature(int face, int npoints) const;

  /// Velocity field value and gradient at an element reference point;
  /// `block` is one (R+S) temporal block of a slab vector.
  Vec2 velocity(std::span<const double> block, int K, Vec2 ref) const;
  Mat2 velocity_gradient(std::span<const double> block, int K, Vec2 ref) const;
  double pressure(std::span<const double> block, int K, Vec2 x) const;

private:
  Mesh mesh_;
  DofMap dofs_;
  TemporalBasis time_;
  ScalarBasisQr qr_;
  PressureBasisPdisc pdisc_;
  std::shared_ptr<const SparsityPattern> pattern_;
  QuadRule2D volume_rule_;
  std::vector<double> ref_values_;
  std::vector<ElementQuadrature> elements_;
  std::vector<FaceQuadrature> faces_;
  Eigen::MatrixXd coupling_;
};

Eigen::MatrixXd temporal_coupling(const TemporalBasis &basis);

/// Nodal Q_r interpolant of a velocity field, length R.
Eigen::VectorXd interpolate_velocity(const DofMap &dofs, const std::function<Vec2(Vec2)> &v);

/// Element-wise L2 projection of a scalar field onto P_{r-1}^disc, length S.
Eigen::VectorXd project_pressure(const SlabSpace &space, const std::function<double(Vec2)> &p);

/// Slab vector with (v, p)(., t_l) at every Radau node of [t0, t1].
SlabVector interpolate_slab(const SlabSpace &space, double t0, double t1,
                            const std::function<Vec2(Vec2, double)> &v,
                            const std::function<double(Vec2, double)> &p);

}  // namespace stvanka
