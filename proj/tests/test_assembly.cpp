#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "stvanka/assembly.hpp"
#include "support.hpp"

using namespace stvanka;
using namespace stvanka::testing;

namespace {

double max_abs(const Eigen::MatrixXd &A) { return A.cwiseAbs().maxCoeff(); }

Mesh all_dirichlet_square(int n) {
  return make_rectangle(0, 1, 0, 1, n, n, {wall, wall, wall, wall});
}

Mesh all_outflow_square(int n) {
  return make_rectangle(0, 1, 0, 1, n, n, {outlet, outlet, outlet, outlet});
}

}  // namespace

class FiniteDifferenceJacobian : public ::testing::TestWithParam<std::pair<int, int>> {};

TEST_P(FiniteDifferenceJacobian, MatchesCentralDifferences) {
  const auto [k, r] = GetParam();
  const SlabSpace space(distorted_square(), r, k);
  const ProblemData data = sample_problem(0.05);
  const TimeSlab slab = make_slab(space, 0.2, 0.45, 17);
  const SlabVector X = random_vector(space.dofs().size(), 23);
  const Eigen::MatrixXd J = assemble_jacobian(space, X, slab, data).to_dense();
  Eigen::MatrixXd FD(J.rows(), J.cols());
  for (int j = 0; j < X.size(); ++j) {
    const double eps = 1e-6 * (1.0 + std::abs(X[j]));
    SlabVector Xp = X, Xm = X;
    Xp[j] += eps;
    Xm[j] -= eps;
    FD.col(j) = (assemble_residual(space, Xp, slab, data) - assemble_residual(space, Xm, slab, data)) /
                (2.0 * eps);
  }
  EXPECT_LT(max_abs(FD - J) / max_abs(J), 1e-5);
}

INSTANTIATE_TEST_SUITE_P(Assembly, FiniteDifferenceJacobian,
                         ::testing::Values(std::pair{0, 2}, std::pair{1, 2}, std::pair{2, 2},
                                           std::pair{0, 3}, std::pair{1, 3}, std::pair{2, 3}));

TEST(Residual, ZeroStateIsZero) {
  const SlabSpace space(unit_square(2), 2, 1);
  ProblemData data;
  data.viscosity = 0.3;
  const TimeSlab slab = make_slab(space, 0.0, 0.1);
  const SlabVector F = assemble_residual(space, SlabVector::Zero(space.dofs().size()), slab, data);
  EXPECT_TRUE(F.isZero(0.0));
}

TEST(Residual, RejectsBadInput) {
  const SlabSpace space(unit_square(1), 2, 0);
  const ProblemData data = sample_problem();
  TimeSlab slab = make_slab(space, 0.0, 0.1);
  SlabVector X = SlabVector::Zero(space.dofs().size());
  X[3] = std::nan("");
  EXPECT_THROW(assemble_residual(space, X, slab, data), std::domain_error);
  X[3] = 0.0;
  slab.trace.resize(0);
  EXPECT_THROW(assemble_residual(space, X, slab, data), std::invalid_argument);
  ProblemData bad = data;
  bad.viscosity = 0.0;
  EXPECT_THROW(assemble_residual(space, X, make_slab(space, 0, 0.1), bad), std::invalid_argument);
}

TEST(ScalarReduction, LowestOrderIsImplicitEuler) {
  const TemporalBasis b(0);
  const double tau = 0.1, lambda = -3.0, u0 = 2.0;
  Eigen::VectorXd U(1);
  U << 1.7;
  const Eigen::VectorXd F = scalar_slab_residual(b, tau, lambda, U, u0);
  EXPECT_NEAR(F[0], U[0] - u0 - tau * lambda * U[0], 1e-15);
  // root of the slab equation is the implicit Euler step
  U[0] = u0 / (1.0 - tau * lambda);
  EXPECT_NEAR(scalar_slab_residual(b, tau, lambda, U, u0)[0], 0.0, 1e-15);
}

TEST(ScalarReduction, EndValueFollowsRadauStabilityFunction) {
  // dG(k) with Radau quadrature reproduces the Radau IIA collocation step,
  // whose stability function is the (k, k+1) Pade approximant of exp.
  const double z = -0.7;
  const std::array<double, 3> expected{
      1.0 / (1.0 - z), (1.0 + z / 3.0) / (1.0 - 2.0 * z / 3.0 + z * z / 6.0),
      (1.0 + 2.0 * z / 5.0 + z * z / 20.0) / (1.0 - 3.0 * z / 5.0 + 3.0 * z * z / 20.0 - z * z * z / 60.0)};
  for (int k = 0; k <= 2; ++k) {
    const TemporalBasis b(k);
    const int n = k + 1;
    // F is affine in U: F = A U - c
    const Eigen::VectorXd c = -scalar_slab_residual(b, 1.0, z, Eigen::VectorXd::Zero(n), 1.0);
    Eigen::MatrixXd A(n, n);
    for (int j = 0; j < n; ++j)
      A.col(j) = scalar_slab_residual(b, 1.0, z, Eigen::VectorXd::Unit(n, j), 1.0) + c;
    const Eigen::VectorXd U = A.partialPivLu().solve(c);
    EXPECT_NEAR(U[k], expected[k], 1e-13) << "k " << k;
  }
}

TEST(Jacobian, SingleBlockForLowestOrder) {
  const SlabSpace space(unit_square(2), 2, 0);
  const SlabBlockMatrix J =
      assemble_jacobian(space, SlabVector::Zero(space.dofs().size()), make_slab(space, 0, 0.1),
                        sample_problem());
  EXPECT_EQ(J.n_time(), 1);
  EXPECT_EQ(J.size(), space.dofs().size());
}

TEST(Jacobian, PressurePressureBlocksAreZero) {
  const SlabSpace space(distorted_square(), 2, 2);
  const SlabVector X = random_vector(space.dofs().size(), 8);
  const Eigen::MatrixXd J =
      assemble_jacobian(space, X, make_slab(space, 0, 0.2, 3), sample_problem()).to_dense();
  const DofMap &m = space.dofs();
  for (int a = 0; a < m.n_time(); ++a)
    for (int b = 0; b < m.n_time(); ++b)
      EXPECT_EQ(max_abs(J.block(a * m.block_size() + m.n_velocity(), b * m.block_size() + m.n_velocity(),
                                m.n_pressure(), m.n_pressure())),
                0.0);
}

TEST(Jacobian, VolumetricDivergenceBlocksAreSkewTransposes) {
  for (const Mesh &mesh : {all_outflow_square(2), all_dirichlet_square(2)}) {
    const SlabSpace space(mesh, 2, 1);
    const SlabVector X = random_vector(space.dofs().size(), 12);
    const Eigen::MatrixXd J =
        assemble_jacobian(space, X, make_slab(space, 0, 0.3), sample_problem()).to_dense();
    const DofMap &m = space.dofs();
    const int R = m.n_velocity(), S = m.n_pressure(), bs = m.block_size();
    for (int a = 0; a < m.n_time(); ++a) {
      const Eigen::MatrixXd Bvp = J.block(a * bs, a * bs + R, R, S);
      const Eigen::MatrixXd Bpv = J.block(a * bs + R, a * bs, S, R);
      EXPECT_GT(max_abs(Bvp), 0.0);
      EXPECT_LE(max_abs(Bpv + Bvp.transpose()), 1e-13 * max_abs(Bvp));
    }
  }
}

TEST(Jacobian, ViscousContributionsAreLinearInViscosity) {
  const SlabSpace space(distorted_square(), 2, 1);
  const SlabVector X = random_vector(space.dofs().size(), 31);
  const TimeSlab slab = make_slab(space, 0, 0.2);
  auto jac = [&](double nu) {
    ProblemData d = sample_problem(nu, false);
    d.dirichlet = nullptr;
    return assemble_jacobian(space, X, slab, d).to_dense();
  };
  const Eigen::MatrixXd J1 = jac(0.1), J2 = jac(0.2), J4 = jac(0.4);
  const Eigen::MatrixXd viscous = J2 - J1;
  EXPECT_GT(max_abs(viscous), 0.0);
  // doubling nu doubles exactly the nu-dependent part
  EXPECT_LE(max_abs((J4 - J2) - 2.0 * viscous), 1e-13 * max_abs(J4));
}

TEST(NitscheRhs, ZeroDataGivesZero) {
  const SlabSpace space(unit_square(2), 2, 1);
  ProblemData data = sample_problem();
  data.dirichlet = [](int, Vec2, double) { return Vec2{}; };
  EXPECT_TRUE(nitsche_rhs(space, make_slab(space, 0, 0.1), data).isZero(0.0));
}

TEST(NitscheRhs, PenaltyPartScalesWithInverseH) {
  // x-component entries summed over all velocity dofs integrate the test
  // function 1; for g = (1, 0) the penalty part equals
  // tau (gamma1 nu |Gamma| + gamma2 * 2) / h.
  auto penalty_sum = [](int n) {
    const SlabSpace space(all_dirichlet_square(n), 2, 0);
    ProblemData d;
    d.viscosity = 0.2;
    d.dirichlet = [](int, Vec2, double) { return Vec2{1.0, 0.0}; };
    const TimeSlab slab = make_slab(space, 0, 0.5);
    const SlabVector base = nitsche_rhs(space, slab, d);
    d.gamma1 *= 2;
    d.gamma2 *= 2;
    const SlabVector penalty = nitsche_rhs(space, slab, d) - base;
    return penalty.head(space.dofs().n_nodes()).sum();
  };
  const double h1 = std::sqrt(2.0);
  EXPECT_NEAR(penalty_sum(1), 0.5 * (35 * 0.2 * 4 + 35 * 2) / h1, 1e-12);
  EXPECT_NEAR(penalty_sum(2), 2.0 * penalty_sum(1), 1e-11);
}

TEST(NitscheRhs, DiscreteDataCancelsPenalties) {
  const SlabSpace space(distorted_square(), 2, 1);
  const auto w = [](Vec2 x) { return Vec2{x.y * x.y - x.x, 0.5 * x.x * x.y + 1.0}; };
  ProblemData data = sample_problem(0.03);
  data.dirichlet = [&](int, Vec2 x, double) { return w(x); };
  TimeSlab slab = make_slab(space, 0, 0.25);
  slab.trace = interpolate_velocity(space.dofs(), w);
  const SlabVector X = interpolate_slab(
      space, 0, 0.25, [&](Vec2 x, double) { return w(x); }, [](Vec2 x, double) { return x.x; });
  const SlabVector F1 = assemble_residual(space, X, slab, data);
  data.gamma1 = 1e4;
  data.gamma2 = 3e3;
  const SlabVector F2 = assemble_residual(space, X, slab, data);
  EXPECT_LE((F2 - F1).cwiseAbs().maxCoeff(), 1e-10);
}

class StokesExactness : public ::testing::TestWithParam<bool> {};

TEST_P(StokesExactness, ResolvedSolutionHasZeroResidual) {
  const bool convection = GetParam();
  const double nu = 0.1;
  const auto v = [](Vec2 x) { return Vec2{x.y * x.y, x.x * x.x}; };
  ProblemData data;
  data.viscosity = nu;
  data.convection = convection;
  data.dirichlet = [&](int, Vec2 x, double) { return v(x); };
  data.body_force = [=](Vec2 x, double) {
    Vec2 f{-2.0 * nu + 1.0, -2.0 * nu};
    if (convection) f += Vec2{2.0 * x.x * x.x * x.y, 2.0 * x.x * x.y * x.y};
    return f;
  };
  // a do-nothing side would need zero traction, so close the domain
  const SlabSpace closed(all_dirichlet_square(3), 2, 1);
  TimeSlab slab = make_slab(closed, 0.0, 0.2);
  slab.trace = interpolate_velocity(closed.dofs(), v);
  const SlabVector X = interpolate_slab(
      closed, 0.0, 0.2, [&](Vec2 x, double) { return v(x); },
      [](Vec2 x, double) { return x.x - 0.5; });
  const SlabVector F = assemble_residual(closed, X, slab, data);
  const DofMap &m = closed.dofs();
  for (int l = 0; l < m.n_time(); ++l) {
    EXPECT_LE(F.segment(m.block_offset(l) + m.n_velocity(), m.n_pressure()).cwiseAbs().maxCoeff(),
              1e-11);
    EXPECT_LE(F.segment(m.block_offset(l), m.n_velocity()).cwiseAbs().maxCoeff(), 1e-11);
  }
}

INSTANTIATE_TEST_SUITE_P(Assembly, StokesExactness, ::testing::Values(false, true));

TEST(EndTrace, ReturnsLastVelocityBlock) {
  const SlabSpace space(unit_square(1), 2, 2);
  const DofMap &m = space.dofs();
  const SlabVector X = random_vector(m.size(), 2);
  const Eigen::VectorXd t = end_trace(m, X);
  ASSERT_EQ(t.size(), m.n_velocity());
  EXPECT_EQ(t, X.segment(m.block_offset(2), m.n_velocity()));
}
