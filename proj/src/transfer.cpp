#include "stvanka/transfer.hpp"

#include <cmath>
#include <stdexcept>

namespace stvanka {

namespace {

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

std::vector<double> recenter_monomial(const PressureBasisPdisc &basis, int s, Vec2 parent_center,
                                      double parent_h, Vec2 child_center, double child_h) {
  const auto [a, b] = basis.exponent(s);
  const double rho = child_h / parent_h;
  const Vec2 shift = (1.0 / parent_h) * (child_center - parent_center);
  std::vector<double> coeff(basis.size(), 0.0);
  for (int i = 0; i <= a; ++i)
    for (int j = 0; j <= b; ++j)
      coeff[basis.index_of(i, j)] += binomial(a, i) * binomial(b, j) * std::pow(rho, i + j) *
                                     std::pow(shift.x, a - i) * std::pow(shift.y, b - j);
  return coeff;
}

Transfer::Transfer(const SlabSpace &coarse, const SlabSpace &fine,
                   const std::vector<ParentInfo> &parents) {
  const DofMap &cd = coarse.dofs();
  const DofMap &fd = fine.dofs();
  if (cd.velocity_order() != fd.velocity_order() || cd.n_time() != fd.n_time())
    throw std::invalid_argument("transfer between incompatible spaces");
  if (parents.size() != static_cast<std::size_t>(fd.n_elements()))
    throw std::invalid_argument("parent map does not match the fine mesh");

  const int ns = coarse.n_scalar();
  const ScalarBasisQr &qr = coarse.velocity_basis();
  const PressureBasisPdisc &pb = coarse.pressure_basis();
  const int np = pb.size();

  coarse_block_ = cd.block_size();
  fine_block_ = fd.block_size();
  coarse_velocity_ = cd.n_velocity();
  fine_velocity_ = fd.n_velocity();
  n_time_ = cd.n_time();
  coarse_to_fine_node_.assign(cd.n_nodes(), -1);

  std::vector<Eigen::Triplet<double>> triplets;
  std::vector<char> done(fd.n_nodes(), 0);
  for (int Kf = 0; Kf < fd.n_elements(); ++Kf) {
    const ParentInfo pi = parents[Kf];
    const auto fnodes = fd.element_nodes(Kf);
    const auto cnodes = cd.element_nodes(pi.element);
    for (int i = 0; i < ns; ++i) {
      const int gf = fnodes[i];
      if (done[gf]) continue;
      done[gf] = 1;
      const Vec2 xi = child_to_parent_reference(pi.child, qr.node(i));
      for (int j = 0; j < ns; ++j) {
        const double w = qr.value(j, xi);
        if (std::abs(w) < 1e-14) continue;
        if (std::abs(w - 1.0) < 1e-14) coarse_to_fine_node_[cnodes[j]] = gf;
        for (int c = 0; c < 2; ++c)
          triplets.emplace_back(fd.velocity_index(c, gf), cd.velocity_index(c, cnodes[j]), w);
      }
    }
    const Mesh &cm = coarse.mesh();
    const Mesh &fm = fine.mesh();
    for (int s = 0; s < np; ++s) {
      const auto coeff = recenter_monomial(pb, s, cm.center(pi.element), cm.diameter(pi.element),
                                           fm.center(Kf), fm.diameter(Kf));
      for (int t = 0; t < np; ++t)
        if (coeff[t] != 0.0)
          triplets.emplace_back(fd.pressure_index(Kf, t), cd.pressure_index(pi.element, s), coeff[t]);
    }
  }
  for (int g : coarse_to_fine_node_)
    if (g < 0) throw std::logic_error("coarse lattice node without fine counterpart");

  P_.resize(fine_block_, coarse_block_);
  P_.setFromTriplets(triplets.begin(), triplets.end());
  R_ = P_.transpose();
}

SlabVector Transfer::prolongate(const SlabVector &coarse) const {
  if (coarse.size() != n_time_ * coarse_block_) throw std::invalid_argument("prolongate: size");
  SlabVector out(n_time_ * fine_block_);
  for (int l = 0; l < n_time_; ++l)
    out.segment(l * fine_block_, fine_block_) = P_ * coarse.segment(l * coarse_block_, coarse_block_);
  return out;
}

SlabVector Transfer::restrict(const SlabVector &fine) const {
  if (fine.size() != n_time_ * fine_block_) throw std::invalid_argument("restrict: size");
  SlabVector out(n_time_ * coarse_block_);
  for (int l = 0; l < n_time_; ++l)
    out.segment(l * coarse_block_, coarse_block_) = R_ * fine.segment(l * fine_block_, fine_block_);
  return out;
}

Eigen::VectorXd Transfer::inject_velocity(const Eigen::VectorXd &fine) const {
  const int nc = static_cast<int>(coarse_to_fine_node_.size());
  const int nf = fine_velocity_ / 2;
  Eigen::VectorXd out(2 * nc);
  for (int g = 0; g < nc; ++g) {
    out[g] = fine[coarse_to_fine_node_[g]];
    out[nc + g] = fine[nf + coarse_to_fine_node_[g]];
  }
  return out;
}

SlabVector Transfer::inject_slab(const SlabVector &fine) const {
  SlabVector out = SlabVector::Zero(n_time_ * coarse_block_);
  for (int l = 0; l < n_time_; ++l)
    out.segment(l * coarse_block_, coarse_velocity_) =
        inject_velocity(fine.segment(l * fine_block_, fine_velocity_));
  return out;
}

}  // namespace stvanka
