#include "stvanka/assembly.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace stvanka {

void ProblemData::validate() const {
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
    throw std::invalid_argument("Nitsche penalties must be positive");
}

namespace {

void check_inputs(const SlabSpace &space, const SlabVector &X, const TimeSlab &slab,
                  const ProblemData &data) {
  data.validate();
  if (X.size() != space.dofs().size())
    throw std::invalid_argument("slab vector has wrong length");
  if (!X.allFinite()) throw std::domain_error("slab vector contains non-finite entries");
  if (slab.trace.size() != space.dofs().n_velocity())
    throw std::invalid_argument("time slab has no velocity trace");
  if (!slab.trace.allFinite()) throw std::domain_error("velocity trace is not finite");
  if (!(slab.length() > 0.0)) throw std::invalid_argument("time slab has non-positive length");
}

// Local coefficients (velocity then pressure) of temporal block l.
Eigen::VectorXd gather_block(const DofMap &dofs, const SlabVector &X, int K, int l) {
  const auto sd = dofs.element_spatial_dofs(K);
  Eigen::VectorXd out(dofs.local_block());
  const int off = dofs.block_offset(l);
  for (int m = 0; m < dofs.local_block(); ++m) out[m] = X[off + sd[m]];
  return out;
}

Eigen::MatrixXd element_mass(const SlabSpace &space, int K) {
  const int ns = space.n_scalar();
  const auto phi = space.reference_values();
  const ElementQuadrature &eq = space.element_quadrature(K);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(ns, ns);
  for (int q = 0; q < space.n_quad(); ++q)
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < ns; ++j) M(i, j) += eq.jxw[q] * phi[q * ns + i] * phi[q * ns + j];
  return M;
}

struct PointField {
  Vec2 v;
  Mat2 grad;  // grad(c, d) = d v_c / d x_d
  double p = 0.0;
};

PointField eval_point(const Eigen::VectorXd &local, int ns, int np, const double *values,
                      const Vec2 *gradients, const double *pressure) {
  PointField f;
  for (int i = 0; i < ns; ++i) {
    const double vx = local[i];
    const double vy = local[ns + i];
    f.v.x += vx * values[i];
    f.v.y += vy * values[i];
    f.grad(0, 0) += vx * gradients[i].x;
    f.grad(0, 1) += vx * gradients[i].y;
    f.grad(1, 0) += vy * gradients[i].x;
    f.grad(1, 1) += vy * gradients[i].y;
  }
  for (int s = 0; s < np; ++s) f.p += local[2 * ns + s] * pressure[s];
  return f;
}

}  // namespace

Eigen::VectorXd end_trace(const DofMap &dofs, const SlabVector &X) {
  return X.segment(dofs.block_offset(dofs.n_time() - 1), dofs.n_velocity());
}

SlabVector assemble_residual(const SlabSpace &space, const SlabVector &X, const TimeSlab &slab,
                             const ProblemData &data) {
  check_inputs(space, X, slab, data);
  const DofMap &dofs = space.dofs();
  const TemporalBasis &time = space.time();
  const Eigen::MatrixXd &C = space.temporal_coupling();
  const int nt = dofs.n_time();
  const int ns = space.n_scalar();
  const int np = dofs.local_pressure();
  const int lv = dofs.local_velocity();
  const int nq = space.n_quad();
  const double nu = data.viscosity;
  const double tau = slab.length();
  const auto phi = space.reference_values();

  SlabVector F = SlabVector::Zero(dofs.size());
  std::vector<Eigen::VectorXd> local(nt);

  for (int K = 0; K < dofs.n_elements(); ++K) {
    const auto sd = dofs.element_spatial_dofs(K);
    const auto nodes = dofs.element_nodes(K);
    const ElementQuadrature &eq = space.element_quadrature(K);
    for (int l = 0; l < nt; ++l) local[l] = gather_block(dofs, X, K, l);

    // Time derivative and jump terms.
    const Eigen::MatrixXd M = element_mass(space, K);
    Eigen::VectorXd previous(lv);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < ns; ++i) previous[c * ns + i] = slab.trace[dofs.velocity_index(c, nodes[i])];
    for (int b = 0; b < nt; ++b) {
      Eigen::VectorXd combo = -time.left_limit(b) * previous;
      for (int a = 0; a < nt; ++a) combo += C(b, a) * local[a].head(lv);
      const int off = dofs.block_offset(b);
      for (int c = 0; c < 2; ++c) {
        const Eigen::VectorXd r = M * combo.segment(c * ns, ns);
        for (int i = 0; i < ns; ++i) F[off + sd[c * ns + i]] += r[i];
      }
    }

    // Spatial operator at each Radau node.
    for (int b = 0; b < nt; ++b) {
      const double scale = tau * time.weights()[b];
      const int off = dofs.block_offset(b);
      for (int q = 0; q < nq; ++q) {
        const PointField f = eval_point(local[b], ns, np, &phi[q * ns], &eq.gradients[q * ns],
                                        &eq.pressure[q * np]);
        const double w = scale * eq.jxw[q];
        Vec2 conv;
        if (data.convection) {
          conv.x = f.v.x * f.grad(0, 0) + f.v.y * f.grad(0, 1);
          conv.y = f.v.x * f.grad(1, 0) + f.v.y * f.grad(1, 1);
        }
        for (int i = 0; i < ns; ++i) {
          const double ph = phi[q * ns + i];
          const Vec2 &g = eq.gradients[q * ns + i];
          for (int c = 0; c < 2; ++c) {
            const double val = ph * conv[c] + nu * (f.grad(c, 0) * g.x + f.grad(c, 1) * g.y) -
                               f.p * g[c];
            F[off + sd[c * ns + i]] += w * val;
          }
        }
        const double div = f.grad(0, 0) + f.grad(1, 1);
        for (int s = 0; s < np; ++s) F[off + sd[lv + s]] += w * div * eq.pressure[q * np + s];
      }
    }
  }

  // Boundary terms on Dirichlet faces, apart from the data.
  for (const FaceQuadrature &fq : space.dirichlet_faces()) {
    const int K = fq.element;
    const auto sd = dofs.element_spatial_dofs(K);
    const double h_inv = 1.0 / fq.h;
    for (int b = 0; b < nt; ++b) {
      const Eigen::VectorXd lb = gather_block(dofs, X, K, b);
      const double scale = tau * time.weights()[b];
      const int off = dofs.block_offset(b);
      for (std::size_t q = 0; q < fq.jxw.size(); ++q) {
        const PointField f = eval_point(lb, ns, np, &fq.values[q * ns], &fq.gradients[q * ns],
                                        &fq.pressure[q * np]);
        const Vec2 n = fq.normals[q];
        const double w = scale * fq.jxw[q];
        const Vec2 grad_n{f.grad(0, 0) * n.x + f.grad(0, 1) * n.y,
                          f.grad(1, 0) * n.x + f.grad(1, 1) * n.y};
        const double vn = dot(f.v, n);
        for (int i = 0; i < ns; ++i) {
          const double ph = fq.values[q * ns + i];
          const double dphi_n = dot(fq.gradients[q * ns + i], n);
          for (int c = 0; c < 2; ++c) {
            const double val = -nu * grad_n[c] * ph + nu * f.v[c] * dphi_n + f.p * n[c] * ph +
                               data.gamma1 * nu * h_inv * f.v[c] * ph +
                               data.gamma2 * h_inv * vn * n[c] * ph;
            F[off + sd[c * ns + i]] += w * val;
          }
        }
        for (int s = 0; s < np; ++s) F[off + sd[lv + s]] -= w * vn * fq.pressure[q * np + s];
      }
    }
  }

  F -= load_vector(space, slab, data);
  return F;
}

SlabVector nitsche_rhs(const SlabSpace &space, const TimeSlab &slab, const ProblemData &data) {
  const DofMap &dofs = space.dofs();
  const TemporalBasis &time = space.time();
  const int ns = space.n_scalar();
  const int np = dofs.local_pressure();
  const int lv = dofs.local_velocity();
  const double nu = data.viscosity;
  SlabVector G = SlabVector::Zero(dofs.size());
  if (!data.dirichlet) return G;

  for (const FaceQuadrature &fq : space.dirichlet_faces()) {
    const auto sd = dofs.element_spatial_dofs(fq.element);
    const double h_inv = 1.0 / fq.h;
    for (int b = 0; b < dofs.n_time(); ++b) {
      const double t = slab.time_at(time.nodes()[b]);
      const double scale = slab.length() * time.weights()[b];
      const int off = dofs.block_offset(b);
      for (std::size_t q = 0; q < fq.jxw.size(); ++q) {
        const Vec2 g = data.dirichlet(fq.marker, fq.points[q], t);
        const Vec2 n = fq.normals[q];
        const double w = scale * fq.jxw[q];
        const double gn = dot(g, n);
        for (int i = 0; i < ns; ++i) {
          const double ph = fq.values[q * ns + i];
          const double dphi_n = dot(fq.gradients[q * ns + i], n);
          for (int c = 0; c < 2; ++c)
            G[off + sd[c * ns + i]] += w * (nu * g[c] * dphi_n + data.gamma1 * nu * h_inv * g[c] * ph +
                                            data.gamma2 * h_inv * gn * n[c] * ph);
        }
        for (int s = 0; s < np; ++s) G[off + sd[lv + s]] -= w * gn * fq.pressure[q * np + s];
      }
    }
  }
  return G;
}

SlabVector load_vector(const SlabSpace &space, const TimeSlab &slab, const ProblemData &data) {
  SlabVector L = nitsche_rhs(space, slab, data);
  if (!data.body_force) return L;
  const DofMap &dofs = space.dofs();
  const TemporalBasis &time = space.time();
  const int ns = space.n_scalar();
  const auto phi = space.reference_values();
  for (int K = 0; K < dofs.n_elements(); ++K) {
    const auto sd = dofs.element_spatial_dofs(K);
    const ElementQuadrature &eq = space.element_quadrature(K);
    for (int b = 0; b < dofs.n_time(); ++b) {
      const double t = slab.time_at(time.nodes()[b]);
      const double scale = slab.length() * time.weights()[b];
      const int off = dofs.block_offset(b);
      for (int q = 0; q < space.n_quad(); ++q) {
        const Vec2 f = data.body_force(eq.points[q], t);
        const double w = scale * eq.jxw[q];
        for (int i = 0; i < ns; ++i) {
          L[off + sd[i]] += w * f.x * phi[q * ns + i];
          L[off + sd[ns + i]] += w * f.y * phi[q * ns + i];
        }
      }
    }
  }
  return L;
}

void assemble_jacobian(const SlabSpace &space, const SlabVector &X, const TimeSlab &slab,
                       const ProblemData &data, SlabBlockMatrix &J) {
  check_inputs(space, X, slab, data);
  const DofMap &dofs = space.dofs();
  const TemporalBasis &time = space.time();
  const Eigen::MatrixXd &C = space.temporal_coupling();
  const int nt = dofs.n_time();
  const int ns = space.n_scalar();
  const int np = dofs.local_pressure();
  const int lv = dofs.local_velocity();
  const int nb = dofs.local_block();
  const int nq = space.n_quad();
  const double nu = data.viscosity;
  const double tau = slab.length();
  const auto phi = space.reference_values();

  J.set_zero();
  Eigen::MatrixXd A(nb, nb);

  for (int K = 0; K < dofs.n_elements(); ++K) {
    const auto pos = J.pattern().element_positions(K);
    const ElementQuadrature &eq = space.element_quadrature(K);
    const Eigen::MatrixXd M = element_mass(space, K);

    for (int b = 0; b < nt; ++b)
      for (int a = 0; a < nt; ++a) {
        const double cba = C(b, a);
        if (cba == 0.0) continue;
        auto block = J.block(b, a);
        for (int c = 0; c < 2; ++c)
          for (int i = 0; i < ns; ++i)
            for (int j = 0; j < ns; ++j) block[pos[(c * ns + i) * nb + c * ns + j]] += cba * M(i, j);
      }

    for (int b = 0; b < nt; ++b) {
      const Eigen::VectorXd lb = gather_block(dofs, X, K, b);
      A.setZero();
      for (int q = 0; q < nq; ++q) {
        const PointField f = eval_point(lb, ns, np, &phi[q * ns], &eq.gradients[q * ns],
                                        &eq.pressure[q * np]);
        const double w = eq.jxw[q];
        const double *ph = &phi[q * ns];
        const Vec2 *g = &eq.gradients[q * ns];
        const double *xi = &eq.pressure[q * np];
        for (int i = 0; i < ns; ++i) {
          for (int j = 0; j < ns; ++j) {
            double diag = nu * dot(g[i], g[j]);
            if (data.convection) diag += ph[i] * dot(f.v, g[j]);
            for (int c = 0; c < 2; ++c) {
              A(c * ns + i, c * ns + j) += w * diag;
              if (data.convection)
                for (int e = 0; e < 2; ++e) A(c * ns + i, e * ns + j) += w * ph[i] * ph[j] * f.grad(c, e);
            }
          }
          for (int s = 0; s < np; ++s)
            for (int c = 0; c < 2; ++c) {
              A(c * ns + i, lv + s) -= w * xi[s] * g[i][c];
              A(lv + s, c * ns + i) += w * xi[s] * g[i][c];
            }
        }
      }
      A *= tau * time.weights()[b];
      auto block = J.block(b, b);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
          const int p = pos[i * nb + j];
          if (p >= 0) block[p] += A(i, j);
        }
    }
  }

  for (const FaceQuadrature &fq : space.dirichlet_faces()) {
    const auto pos = J.pattern().element_positions(fq.element);
    const double h_inv = 1.0 / fq.h;
    A.setZero();
    for (std::size_t q = 0; q < fq.jxw.size(); ++q) {
      const Vec2 n = fq.normals[q];
      const double w = fq.jxw[q];
      const double *ph = &fq.values[q * ns];
      const Vec2 *g = &fq.gradients[q * ns];
      const double *xi = &fq.pressure[q * np];
      for (int i = 0; i < ns; ++i) {
        const double dni = dot(g[i], n);
        for (int j = 0; j < ns; ++j) {
          const double dnj = dot(g[j], n);
          const double diag =
              -nu * ph[i] * dnj + nu * ph[j] * dni + data.gamma1 * nu * h_inv * ph[i] * ph[j];
          for (int c = 0; c < 2; ++c) {
            A(c * ns + i, c * ns + j) += w * diag;
            for (int e = 0; e < 2; ++e)
              A(c * ns + i, e * ns + j) += w * data.gamma2 * h_inv * n[c] * n[e] * ph[i] * ph[j];
          }
        }
        for (int s = 0; s < np; ++s)
          for (int c = 0; c < 2; ++c) {
            A(c * ns + i, lv + s) += w * xi[s] * n[c] * ph[i];
            A(lv + s, c * ns + i) -= w * xi[s] * n[c] * ph[i];
          }
      }
    }
    for (int b = 0; b < nt; ++b) {
      const double scale = tau * time.weights()[b];
      auto block = J.block(b, b);
      for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
          const int p = pos[i * nb + j];
          if (p >= 0) block[p] += scale * A(i, j);
        }
    }
  }
}

SlabBlockMatrix assemble_jacobian(const SlabSpace &space, const SlabVector &X,
                                  const TimeSlab &slab, const ProblemData &data) {
  SlabBlockMatrix J = space.make_matrix();
  assemble_jacobian(space, X, slab, data, J);
  return J;
}

Eigen::VectorXd scalar_slab_residual(const TemporalBasis &basis, double tau, double lambda,
                                     const Eigen::VectorXd &U, double u_previous) {
  const Eigen::MatrixXd C = temporal_coupling(basis);
  Eigen::VectorXd F = C * U;
  for (int b = 0; b < basis.size(); ++b)
    F[b] -= tau * basis.weights()[b] * lambda * U[b] + basis.left_limit(b) * u_previous;
  return F;
}

}  // namespace stvanka
