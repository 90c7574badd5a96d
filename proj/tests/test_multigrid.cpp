#include <gtest/gtest.h>

#include <map>

#include "stvanka/multigrid.hpp"
#include "support.hpp"

using namespace stvanka;
using namespace stvanka::testing;

namespace {

double defect_norm(const SlabBlockMatrix &J, const SlabVector &b, const SlabVector &d) {
  return (b - J * d).norm();
}

// Slab problem on a hierarchy with `levels` refinements of `coarse`.
struct LevelProblem {
  MeshHierarchy hierarchy;
  MultilevelSpace spaces;
  ProblemData data;
  TimeSlab slab;
  SlabVector X;
  SlabBlockMatrix J;
  LevelProblem(const Mesh &coarse, int levels, int k, bool convection, unsigned seed = 0)
      : hierarchy(build_hierarchy(coarse, levels)), spaces(hierarchy, 2, k),
        data(sample_problem(0.05, convection)), slab(make_slab(spaces.fine(), 0.0, 0.1, seed)) {
    const int n = spaces.fine().dofs().size();
    X = seed == 0 ? SlabVector::Zero(n) : random_vector(n, seed + 1, 0.3);
    J = assemble_jacobian(spaces.fine(), X, slab, data);
  }
};

}  // namespace

TEST(Vanka, LocalMatrixOfSingleElementIsTheSystem) {
  const Mesh one = make_rectangle(0, 1, 0, 1, 1, 1, {wall, outlet, wall, wall});
  const SlabSpace single(one, 2, 1);
  const SlabVector X = random_vector(single.dofs().size(), 4);
  const SlabBlockMatrix J = assemble_jacobian(single, X, make_slab(single, 0, 0.2, 5), sample_problem());
  const Eigen::MatrixXd JK = VankaSmoother::local_matrix(single, J, 0);
  Eigen::MatrixXd ref(JK.rows(), JK.cols());
  const Eigen::MatrixXd D = J.to_dense();
  const DofMap &m = single.dofs();
  for (int i = 0; i < m.local_size(); ++i)
    for (int j = 0; j < m.local_size(); ++j) ref(i, j) = D(m.dof(0, i), m.dof(0, j));
  EXPECT_EQ(JK, ref);
}

TEST(Vanka, LocalFactorizationInvertsBlocks) {
  const LevelProblem p(distorted_square(), 0, 1, true, 9);
  const VankaSmoother S(p.spaces.fine(), p.J, 0.7);
  for (int K = 0; K < 4; ++K) {
    const Eigen::MatrixXd JK = VankaSmoother::local_matrix(p.spaces.fine(), p.J, K);
    const Eigen::MatrixXd I = JK * S.factorization(K).inverse();
    EXPECT_LE((I - Eigen::MatrixXd::Identity(JK.rows(), JK.cols())).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Vanka, SingleElementExactInOneSweep) {
  const SlabSpace space(make_rectangle(0, 1, 0, 1, 1, 1, {wall, outlet, wall, wall}), 2, 2);
  const SlabVector X = random_vector(space.dofs().size(), 1, 0.3);
  const SlabBlockMatrix J = assemble_jacobian(space, X, make_slab(space, 0, 0.1, 2), sample_problem());
  const VankaSmoother S(space, J, 1.0);
  const SlabVector b = random_vector(J.size(), 3);
  SlabVector d = SlabVector::Zero(J.size());
  S.smooth(b, d, 1);
  EXPECT_LT(defect_norm(J, b, d) / b.norm(), 1e-10);
}

TEST(Vanka, LocalUpdateProperties) {
  const LevelProblem p(distorted_square(), 0, 1, true, 4);
  const DofMap &m = p.spaces.fine().dofs();
  const SlabVector b = random_vector(m.size(), 8);
  const SlabVector d = random_vector(m.size(), 9);
  // omega = 0: no relaxation
  const VankaSmoother off(p.spaces.fine(), p.J, 0.0);
  for (int K = 0; K < 4; ++K) EXPECT_EQ(off.local_update(K, d, b), restrict_local(d, K, m));
  // exact solution: the defect vanishes
  const SlabVector exact = DirectSolver(p.J).solve(b);
  const VankaSmoother S(p.spaces.fine(), p.J, 0.7);
  for (int K = 0; K < 4; ++K)
    EXPECT_LE((S.local_update(K, exact, b) - restrict_local(exact, K, m)).cwiseAbs().maxCoeff(),
              1e-10);
}

TEST(Vanka, ZeroSweepsRejected) {
  const LevelProblem p(unit_square(1), 0, 0, false);
  const VankaSmoother S(p.spaces.fine(), p.J, 0.7);
  SlabVector d = SlabVector::Zero(p.J.size());
  EXPECT_THROW(S.smooth(SlabVector::Ones(p.J.size()), d, 0), std::invalid_argument);
  MultigridOptions o;
  o.smoothing_steps = 0;
  EXPECT_THROW(MultigridPreconditioner(p.spaces, p.J, p.X, p.slab, p.data, o), std::invalid_argument);
  o.smoothing_steps = 4;
  o.omega = 0.0;
  EXPECT_THROW(MultigridPreconditioner(p.spaces, p.J, p.X, p.slab, p.data, o), std::invalid_argument);
  o.omega = 1.2;
  EXPECT_THROW(MultigridPreconditioner(p.spaces, p.J, p.X, p.slab, p.data, o), std::invalid_argument);
}

TEST(Vanka, SingularBlockNamesElement) {
  const SlabSpace space(unit_square(2), 2, 0);
  SlabBlockMatrix J = space.make_matrix();
  J.set_zero();
  try {
    VankaSmoother S(space, J, 0.7);
    FAIL() << "expected SolverError";
  } catch (const SolverError &e) {
    EXPECT_EQ(e.element(), 0);
    EXPECT_NE(std::string(e.what()).find("element 0"), std::string::npos);
  }
}

TEST(Vanka, StokesResidualNonIncreasing) {
  const LevelProblem p(unit_square(2), 0, 1, false);
  const VankaSmoother S(p.spaces.fine(), p.J, 0.7);
  const SlabVector b = random_vector(p.J.size(), 21);
  SlabVector d = SlabVector::Zero(p.J.size());
  double prev = b.norm();
  for (int sweep = 0; sweep < 4; ++sweep) {
    S.smooth(b, d, 1);
    const double now = defect_norm(p.J, b, d);
    EXPECT_LE(now, prev) << "sweep " << sweep;
    prev = now;
  }
}

TEST(Vanka, SweepsCompose) {
  const LevelProblem p(distorted_square(), 0, 1, true, 2);
  const VankaSmoother S(p.spaces.fine(), p.J, 0.7);
  const SlabVector b = random_vector(p.J.size(), 5);
  SlabVector d1 = SlabVector::Zero(p.J.size()), d2 = d1;
  S.smooth(b, d1, 3);
  for (int i = 0; i < 3; ++i) S.smooth(b, d2, 1);
  EXPECT_EQ(d1, d2);
}

TEST(Vanka, ElementOrderInvariance) {
  const Mesh base = unit_square(3);
  std::vector<std::array<int, 4>> elements = base.elements();
  std::vector<int> perm(elements.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>((5 * i + 2) % perm.size());
  std::vector<std::array<int, 4>> shuffled(elements.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[perm[i]] = elements[i];
  const Mesh other(base.vertices(), shuffled, base.boundary_segments(), base.markers());

  const int k = 1;
  const SlabSpace s1(base, 2, k), s2(other, 2, k);
  const DofMap &m1 = s1.dofs(), &m2 = s2.dofs();
  ASSERT_EQ(m1.size(), m2.size());
  // index map m1 -> m2 by node coordinates and element permutation
  std::map<std::pair<long long, long long>, int> node2;
  auto key = [](Vec2 x) { return std::pair{std::llround(x.x * 1e9), std::llround(x.y * 1e9)}; };
  for (int n = 0; n < m2.n_nodes(); ++n) node2[key(m2.node_point(n))] = n;
  std::vector<int> map(m1.size());
  for (int l = 0; l < m1.n_time(); ++l) {
    for (int n = 0; n < m1.n_nodes(); ++n)
      for (int c = 0; c < 2; ++c)
        map[m1.block_offset(l) + m1.velocity_index(c, n)] =
            m2.block_offset(l) + m2.velocity_index(c, node2.at(key(m1.node_point(n))));
    for (int K = 0; K < m1.n_elements(); ++K)
      for (int s = 0; s < m1.local_pressure(); ++s)
        map[m1.block_offset(l) + m1.pressure_index(K, s)] =
            m2.block_offset(l) + m2.pressure_index(perm[K], s);
  }
  const ProblemData data = sample_problem();
  const SlabVector X1 = random_vector(m1.size(), 6, 0.3);
  const SlabVector b1 = random_vector(m1.size(), 7);
  SlabVector X2(m2.size()), b2(m2.size());
  for (int i = 0; i < m1.size(); ++i) {
    X2[map[i]] = X1[i];
    b2[map[i]] = b1[i];
  }
  TimeSlab slab1 = make_slab(s1, 0, 0.1), slab2 = make_slab(s2, 0, 0.1);
  const SlabBlockMatrix J1 = assemble_jacobian(s1, X1, slab1, data);
  const SlabBlockMatrix J2 = assemble_jacobian(s2, X2, slab2, data);
  SlabVector d1 = SlabVector::Zero(m1.size()), d2 = SlabVector::Zero(m2.size());
  VankaSmoother(s1, J1, 0.7).smooth(b1, d1, 3);
  VankaSmoother(s2, J2, 0.7).smooth(b2, d2, 3);
  double diff = 0.0;
  for (int i = 0; i < m1.size(); ++i) diff = std::max(diff, std::abs(d1[i] - d2[map[i]]));
  EXPECT_LT(diff, 1e-12 * std::max(1.0, d1.cwiseAbs().maxCoeff()));
}

TEST(Vanka, ThreadedSmoothingMatchesSequential) {
  const LevelProblem p(unit_square(3), 0, 1, true, 3);
  const SlabVector b = random_vector(p.J.size(), 4);
  SlabVector d1 = SlabVector::Zero(p.J.size()), d2 = d1;
  VankaSmoother(p.spaces.fine(), p.J, 0.7, 1).smooth(b, d1, 2);
  VankaSmoother(p.spaces.fine(), p.J, 0.7, 3).smooth(b, d2, 2);
  EXPECT_EQ(d1, d2);
}

TEST(Multigrid, VcycleIsLinear) {
  const LevelProblem p(distorted_square(), 2, 1, true, 7);
  const MultigridPreconditioner mg(p.spaces, p.J, p.X, p.slab, p.data);
  const SlabVector b1 = random_vector(p.J.size(), 1), b2 = random_vector(p.J.size(), 2);
  const double a = 0.7, c = -1.9;
  const SlabVector lhs = mg.apply(a * b1 + c * b2);
  const SlabVector rhs = a * mg.apply(b1) + c * mg.apply(b2);
  EXPECT_LT((lhs - rhs).norm() / rhs.norm(), 1e-12);
  EXPECT_TRUE(mg.apply(SlabVector::Zero(p.J.size())).isZero(0.0));
}

TEST(Multigrid, ZeroLevelsIsDirectSolve) {
  const LevelProblem p(unit_square(3), 0, 1, true, 5);
  const MultigridPreconditioner mg(p.spaces, p.J, p.X, p.slab, p.data);
  EXPECT_EQ(mg.finest(), 0);
  const SlabVector b = random_vector(p.J.size(), 6);
  const SlabVector x = mg.apply(b);
  EXPECT_LT(defect_norm(p.J, b, x), 1e-12);
  EXPECT_THROW(mg.vcycle(1, b), std::out_of_range);
}

TEST(Multigrid, VcycleContracts) {
  const LevelProblem p(unit_square(2), 2, 1, true, 5);
  const MultigridPreconditioner mg(p.spaces, p.J, p.X, p.slab, p.data);
  const SlabVector b = random_vector(p.J.size(), 6);
  const SlabVector x = mg.apply(b);
  EXPECT_LT(defect_norm(p.J, b, x), 0.5 * b.norm());
}

TEST(Multigrid, StokesLevelsAreGalerkinConsistent) {
  // Without Dirichlet faces every term of the Stokes operator is inherited
  // exactly by nested spaces, so re-discretization equals R J P.
  const Mesh coarse = make_rectangle(0, 1, 0, 1, 2, 2, {outlet, outlet, outlet, outlet});
  const LevelProblem p(coarse, 2, 1, false);
  const MultigridPreconditioner mg(p.spaces, p.J, p.X, p.slab, p.data);
  for (int l = 1; l <= 2; ++l) {
    const Transfer &T = p.spaces.transfer(l);
    const SlabBlockMatrix &Jf = mg.matrix(l), &Jc = mg.matrix(l - 1);
    for (unsigned seed = 0; seed < 10; ++seed) {
      const SlabVector x = random_vector(Jc.size(), 40 + seed);
      const SlabVector galerkin = T.restrict(Jf * T.prolongate(x));
      const SlabVector direct = Jc * x;
      EXPECT_LT((galerkin - direct).norm(), 1e-12 * direct.norm());
    }
  }
}

TEST(Multigrid, CoarseOperatorsUseInjectedIterate) {
  const LevelProblem p(unit_square(2), 1, 1, true, 3);
  const MultigridPreconditioner mg(p.spaces, p.J, p.X, p.slab, p.data);
  const Transfer &T = p.spaces.transfer(1);
  TimeSlab coarse_slab = p.slab;
  coarse_slab.trace = T.inject_velocity(p.slab.trace);
  const SlabBlockMatrix ref =
      assemble_jacobian(p.spaces.level(0), T.inject_slab(p.X), coarse_slab, p.data);
  EXPECT_LE((mg.matrix(0).to_dense() - ref.to_dense()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(&mg.matrix(1), &p.J);
}
