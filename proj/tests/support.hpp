#pragma once

#include <random>

#include "stvanka/assembly.hpp"
#include "stvanka/mesh.hpp"
#include "stvanka/space.hpp"

namespace stvanka::testing {

inline const BoundaryMarker wall{1, BoundaryKind::dirichlet};
inline const BoundaryMarker outlet{2, BoundaryKind::do_nothing};

/// Unit square, Dirichlet on three sides, do-nothing on x = 1.
inline Mesh unit_square(int n) {
  return make_rectangle(0.0, 1.0, 0.0, 1.0, n, n, {wall, outlet, wall, wall});
}

/// Unit square with one interior vertex moved so that no element is a
/// parallelogram.
inline Mesh distorted_square() {
  std::vector<Vec2> v{{0, 0}, {0.5, 0}, {1, 0}, {0, 0.5}, {0.58, 0.43}, {1, 0.5},
                      {0, 1}, {0.5, 1}, {1, 1}};
  std::vector<std::array<int, 4>> e{{0, 1, 4, 3}, {1, 2, 5, 4}, {3, 4, 7, 6}, {4, 5, 8, 7}};
  std::vector<BoundarySegment> b{{1, 0, 1}, {1, 1, 2}, {2, 2, 5}, {2, 5, 8},
                                 {1, 8, 7}, {1, 7, 6}, {1, 6, 3}, {1, 3, 0}};
  return Mesh(v, e, b, {wall, outlet});
}

inline Eigen::VectorXd random_vector(int n, unsigned seed, double scale = 1.0) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x[i] = u(gen);
  return x;
}

/// Flow data with nonzero forcing and boundary values.
inline ProblemData sample_problem(double viscosity = 0.05, bool convection = true) {
  ProblemData data;
  data.viscosity = viscosity;
  data.convection = convection;
  data.body_force = [](Vec2 x, double t) {
    return Vec2{std::sin(2.0 * x.x) + t, std::cos(x.y) - 0.5 * t};
  };
  data.dirichlet = [](int, Vec2 x, double t) {
    return Vec2{x.y * (1.0 - x.y) * (1.0 + t), 0.1 * x.x};
  };
  return data;
}

inline TimeSlab make_slab(const SlabSpace &space, double t0, double t1, unsigned seed = 0) {
  TimeSlab slab;
  slab.index = 1;
  slab.t_start = t0;
  slab.t_end = t1;
  slab.trace = seed == 0 ? Eigen::VectorXd::Zero(space.dofs().n_velocity())
                         : random_vector(space.dofs().n_velocity(), seed, 0.5);
  return slab;
}

inline std::span<const double> block_of(const Eigen::VectorXd &X, int l, int block_size) {
  return {X.data() + static_cast<std::ptrdiff_t>(l) * block_size,
          static_cast<std::size_t>(block_size)};
}

}  // namespace stvanka::testing
