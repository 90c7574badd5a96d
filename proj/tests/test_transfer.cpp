#include <gtest/gtest.h>

#include "stvanka/multigrid.hpp"
#include "stvanka/transfer.hpp"
#include "support.hpp"

using namespace stvanka;
using namespace stvanka::testing;

namespace {

struct TwoLevels {
  MeshHierarchy hierarchy;
  MultilevelSpace spaces;
  TwoLevels(const Mesh &coarse, int r, int k)
      : hierarchy(build_hierarchy(coarse, 1)), spaces(hierarchy, r, k) {}
  const SlabSpace &coarse() const { return spaces.level(0); }
  const SlabSpace &fine() const { return spaces.level(1); }
  const Transfer &transfer() const { return spaces.transfer(1); }
};

}  // namespace

TEST(Transfer, ConstantsProlongExactly) {
  const TwoLevels t(distorted_square(), 2, 1);
  const DofMap &cd = t.coarse().dofs(), &fd = t.fine().dofs();
  SlabVector c = SlabVector::Zero(cd.size());
  const int one = t.coarse().pressure_basis().index_of(0, 0);
  for (int l = 0; l < cd.n_time(); ++l) {
    c.segment(cd.block_offset(l), cd.n_nodes()).setConstant(1.5);
    c.segment(cd.block_offset(l) + cd.n_nodes(), cd.n_nodes()).setConstant(-0.5 + l);
    for (int K = 0; K < cd.n_elements(); ++K) c[cd.block_offset(l) + cd.pressure_index(K, one)] = 2.0;
  }
  const SlabVector f = t.transfer().prolongate(c);
  for (int l = 0; l < fd.n_time(); ++l) {
    for (int i = 0; i < fd.n_nodes(); ++i) {
      EXPECT_NEAR(f[fd.block_offset(l) + i], 1.5, 1e-14);
      EXPECT_NEAR(f[fd.block_offset(l) + fd.n_nodes() + i], -0.5 + l, 1e-14);
    }
    for (int K = 0; K < fd.n_elements(); ++K)
      for (int s = 0; s < fd.local_pressure(); ++s)
        EXPECT_NEAR(f[fd.block_offset(l) + fd.pressure_index(K, s)], s == one ? 2.0 : 0.0, 1e-14);
  }
}

TEST(Transfer, EmbedsPolynomialFields) {
  // on an affine mesh Q_r interpolants and P_{r-1} projections are nested
  const TwoLevels t(unit_square(2), 3, 0);
  const auto v = [](Vec2 x) { return Vec2{x.x * x.x * x.y - x.y, x.x * x.y * x.y * x.y}; };
  const auto p = [](Vec2 x) { return 1.0 - 2.0 * x.x + x.x * x.y + 0.5 * x.y * x.y; };
  const SlabVector c = interpolate_slab(t.coarse(), 0, 1, [&](Vec2 x, double) { return v(x); },
                                        [&](Vec2 x, double) { return p(x); });
  const SlabVector f = interpolate_slab(t.fine(), 0, 1, [&](Vec2 x, double) { return v(x); },
                                        [&](Vec2 x, double) { return p(x); });
  EXPECT_LE((t.transfer().prolongate(c) - f).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transfer, RecenteringIdentity) {
  const PressureBasisPdisc b(4);
  const Vec2 cp{0.3, -0.2}, cc{0.45, -0.1};
  const double hp = 0.8, hc = 0.4;
  for (int s = 0; s < b.size(); ++s) {
    const auto coeff = recenter_monomial(b, s, cp, hp, cc, hc);
    for (Vec2 x : {Vec2{0.5, 0.0}, Vec2{0.31, -0.33}, Vec2{0.6, 0.1}}) {
      double sum = 0.0;
      for (int j = 0; j < b.size(); ++j) sum += coeff[j] * b.value(j, x, cc, hc);
      EXPECT_NEAR(sum, b.value(s, x, cp, hp), 1e-13);
    }
    const auto same = recenter_monomial(b, s, cp, hp, cp, hp);
    for (int j = 0; j < b.size(); ++j) EXPECT_NEAR(same[j], j == s ? 1.0 : 0.0, 1e-15);
  }
  // x-monomial on a shifted child: xbar_p = xbar_c * (hc / hp) + (cc - cp).x / hp
  const auto c = recenter_monomial(b, b.index_of(1, 0), cp, hp, cc, hc);
  EXPECT_NEAR(c[b.index_of(0, 0)], (cc.x - cp.x) / hp, 1e-15);
  EXPECT_NEAR(c[b.index_of(1, 0)], hc / hp, 1e-15);
}

TEST(Transfer, RestrictionIsAdjoint) {
  const TwoLevels t(distorted_square(), 2, 1);
  const int nc = t.coarse().dofs().size(), nf = t.fine().dofs().size();
  for (unsigned seed = 0; seed < 20; ++seed) {
    const SlabVector x = random_vector(nc, 100 + seed);
    const SlabVector y = random_vector(nf, 200 + seed);
    const double lhs = t.transfer().prolongate(x).dot(y);
    const double rhs = x.dot(t.transfer().restrict(y));
    EXPECT_NEAR(lhs, rhs, 1e-13 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(Transfer, InjectionInvertsProlongation) {
  const TwoLevels t(distorted_square(), 2, 2);
  const DofMap &cd = t.coarse().dofs();
  const SlabVector c = random_vector(cd.size(), 3);
  const SlabVector back = t.transfer().inject_slab(t.transfer().prolongate(c));
  for (int l = 0; l < cd.n_time(); ++l) {
    EXPECT_LE((back.segment(cd.block_offset(l), cd.n_velocity()) -
               c.segment(cd.block_offset(l), cd.n_velocity()))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-14);
    EXPECT_TRUE(back.segment(cd.block_offset(l) + cd.n_velocity(), cd.n_pressure()).isZero(0.0));
  }
}

TEST(Transfer, SizeMismatch) {
  const TwoLevels t(unit_square(1), 2, 0);
  EXPECT_THROW(t.transfer().prolongate(SlabVector::Zero(3)), std::invalid_argument);
  EXPECT_THROW(t.transfer().restrict(SlabVector::Zero(3)), std::invalid_argument);
}
