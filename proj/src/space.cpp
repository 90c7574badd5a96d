#include "stvanka/space.hpp"

#include <Eigen/Dense>

namespace stvanka {

Eigen::MatrixXd temporal_coupling(const TemporalBasis &basis) {
  const int n = basis.size();
  Eigen::MatrixXd C(n, n);
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a)
      C(b, a) = basis.weights()[b] * basis.derivative(a, basis.nodes()[b]) +
                basis.left_limit(b) * basis.left_limit(a);
  return C;
}

SlabSpace::SlabSpace(Mesh mesh, int r, int k)
    : mesh_(std::move(mesh)), dofs_(mesh_, r, k), time_(k), qr_(r), pdisc_(r),
      pattern_(std::make_shared<SparsityPattern>(dofs_)), volume_rule_(gauss_legendre_2d(r + 1)),
      coupling_(stvanka::temporal_coupling(time_)) {
  const int nq = n_quad();
  const int ns = n_scalar();
  const int np = pdisc_.size();

  ref_values_.resize(static_cast<std::size_t>(nq) * ns);
  std::vector<Vec2> ref_grads(static_cast<std::size_t>(nq) * ns);
  for (int q = 0; q < nq; ++q)
    qr_.evaluate(volume_rule_.points[q], {ref_values_.data() + q * ns, static_cast<std::size_t>(ns)},
                 {ref_grads.data() + q * ns, static_cast<std::size_t>(ns)});

  elements_.resize(mesh_.n_elements());
  for (int K = 0; K < static_cast<int>(mesh_.n_elements()); ++K) {
    ElementQuadrature &eq = elements_[K];
    eq.jxw.resize(nq);
    eq.points.resize(nq);
    eq.gradients.resize(static_cast<std::size_t>(nq) * ns);
    eq.pressure.resize(static_cast<std::size_t>(nq) * np);
    const Vec2 center = mesh_.center(K);
    const double h = mesh_.diameter(K);
    for (int q = 0; q < nq; ++q) {
      const ElementMapping m = mesh_.element_geometry(K, volume_rule_.points[q]);
      if (m.det <= 0.0) throw MeshError("degenerate element " + std::to_string(K), K);
      eq.jxw[q] = volume_rule_.weights[q] * m.det;
      eq.points[q] = m.point;
      for (int i = 0; i < ns; ++i) eq.gradients[q * ns + i] = m.inverse_transpose * ref_grads[q * ns + i];
      pdisc_.evaluate_local((1.0 / h) * (m.point - center),
                            {eq.pressure.data() + q * np, static_cast<std::size_t>(np)});
    }
  }

  for (int f : dofs_.dirichlet_faces()) faces_.push_back(face_quadrature(f, r + 1));
}

FaceQuadrature SlabSpace::face_quadrature(int face, int npoints) const {
  const int ns = n_scalar();
  const int np = pdisc_.size();
  const QuadRule1D rule = gauss_legendre(npoints);
  FaceQuadrature fq;
  fq.face = face;
  fq.element = mesh_.face(face).elements[0];
  fq.marker = mesh_.face(face).marker;
  fq.h = mesh_.diameter(fq.element);
  const Vec2 center = mesh_.center(fq.element);
  std::vector<Vec2> ref_grads(ns);
  for (int q = 0; q < npoints; ++q) {
    const FaceMapping fm = mesh_.boundary_face_geometry(face, rule.points[q]);
    const ElementMapping m = mesh_.element_geometry(fq.element, fm.reference_point);
    fq.jxw.push_back(rule.weights[q] * fm.surface_jacobian);
    fq.points.push_back(fm.point);
    fq.normals.push_back(fm.normal);
    const std::size_t off = fq.values.size();
    fq.values.resize(off + ns);
    qr_.evaluate(fm.reference_point, {fq.values.data() + off, static_cast<std::size_t>(ns)}, ref_grads);
    for (int i = 0; i < ns; ++i) fq.gradients.push_back(m.inverse_transpose * ref_grads[i]);
    const std::size_t poff = fq.pressure.size();
    fq.pressure.resize(poff + np);
    pdisc_.evaluate_local((1.0 / fq.h) * (fm.point - center),
                          {fq.pressure.data() + poff, static_cast<std::size_t>(np)});
  }
  return fq;
}

Vec2 SlabSpace::velocity(std::span<const double> block, int K, Vec2 ref) const {
  const auto nodes = dofs_.element_nodes(K);
  Vec2 v;
  for (int i = 0; i < n_scalar(); ++i) {
    const double phi = qr_.value(i, ref);
    v.x += phi * block[dofs_.velocity_index(0, nodes[i])];
    v.y += phi * block[dofs_.velocity_index(1, nodes[i])];
  }
  return v;
}

Mat2 SlabSpace::velocity_gradient(std::span<const double> block, int K, Vec2 ref) const {
  const auto nodes = dofs_.element_nodes(K);
  const ElementMapping m = mesh_.element_geometry(K, ref);
  Mat2 g;
  for (int i = 0; i < n_scalar(); ++i) {
    const Vec2 grad = m.inverse_transpose * qr_.gradient(i, ref);
    for (int c = 0; c < 2; ++c) {
      const double coeff = block[dofs_.velocity_index(c, nodes[i])];
      g(c, 0) += coeff * grad.x;
      g(c, 1) += coeff * grad.y;
    }
  }
  return g;
}

double SlabSpace::pressure(std::span<const double> block, int K, Vec2 x) const {
  double p = 0.0;
  for (int s = 0; s < pdisc_.size(); ++s)
    p += block[dofs_.pressure_index(K, s)] * pdisc_.value(s, x, mesh_, K);
  return p;
}

Eigen::VectorXd interpolate_velocity(const DofMap &dofs, const std::function<Vec2(Vec2)> &v) {
  Eigen::VectorXd out(dofs.n_velocity());
  for (int g = 0; g < dofs.n_nodes(); ++g) {
    const Vec2 val = v(dofs.node_point(g));
    out[dofs.velocity_index(0, g)] = val.x;
    out[dofs.velocity_index(1, g)] = val.y;
  }
  return out;
}

Eigen::VectorXd project_pressure(const SlabSpace &space, const std::function<double(Vec2)> &p) {
  const DofMap &dofs = space.dofs();
  const int np = dofs.local_pressure();
  Eigen::VectorXd out(dofs.n_pressure());
  for (int K = 0; K < dofs.n_elements(); ++K) {
    const ElementQuadrature &eq = space.element_quadrature(K);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(np, np);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
    for (int q = 0; q < space.n_quad(); ++q) {
      const double pv = p(eq.points[q]);
      for (int s = 0; s < np; ++s) {
        rhs[s] += eq.jxw[q] * pv * eq.pressure[q * np + s];
        for (int t = 0; t < np; ++t)
          M(s, t) += eq.jxw[q] * eq.pressure[q * np + s] * eq.pressure[q * np + t];
      }
    }
    out.segment(K * np, np) = M.ldlt().solve(rhs);
  }
  return out;
}

SlabVector interpolate_slab(const SlabSpace &space, double t0, double t1,
                            const std::function<Vec2(Vec2, double)> &v,
                            const std::function<double(Vec2, double)> &p) {
  const DofMap &dofs = space.dofs();
  SlabVector X(dofs.size());
  for (int l = 0; l < dofs.n_time(); ++l) {
    const double t = t0 + (t1 - t0) * space.time().nodes()[l];
    X.segment(dofs.block_offset(l), dofs.n_velocity()) =
        interpolate_velocity(dofs, [&](Vec2 x) { return v(x, t); });
    X.segment(dofs.block_offset(l) + dofs.n_velocity(), dofs.n_pressure()) =
        project_pressure(space, [&](Vec2 x) { return p(x, t); });
  }
  return X;
}

}  // namespace stvanka
