#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "stvanka/benchmark.hpp"

namespace stvanka {

namespace {

constexpr double pi = std::numbers::pi;

double phi(double t) { return 1.0 + std::sin(pi * t); }
double dphi(double t) { return pi * std::cos(pi * t); }

}  // namespace

Vec2 ManufacturedSolution::forcing(Vec2 x, double t) const {
  Vec2 f = dvdt(x, t) - viscosity * laplacian(x, t) + pressure_gradient(x, t);
  if (convection) f += gradient(x, t) * velocity(x, t);
  return f;
}

Mesh manufactured_mesh(int n) {
  const BoundaryMarker dirichlet{1, BoundaryKind::dirichlet};
  const BoundaryMarker outflow{2, BoundaryKind::do_nothing};
  return make_rectangle(0.0, 1.0, 0.0, 1.0, n, n, {dirichlet, outflow, dirichlet, dirichlet});
}

ManufacturedSolution spatial_solution(double viscosity, bool convection) {
  ManufacturedSolution s;
  s.viscosity = viscosity;
  s.convection = convection;
  auto shape = [](Vec2 x) {
    return Vec2{pi * std::sin(pi * x.x) * std::cos(pi * x.y),
                -pi * std::cos(pi * x.x) * std::sin(pi * x.y)};
  };
  s.velocity = [shape](Vec2 x, double t) { return phi(t) * shape(x); };
  s.dvdt = [shape](Vec2 x, double t) { return dphi(t) * shape(x); };
  s.laplacian = [shape](Vec2 x, double t) { return (-2.0 * pi * pi * phi(t)) * shape(x); };
  s.gradient = [](Vec2 x, double t) {
    const double a = phi(t) * pi * pi;
    const double cc = std::cos(pi * x.x) * std::cos(pi * x.y);
    const double ss = std::sin(pi * x.x) * std::sin(pi * x.y);
    Mat2 G;
    G(0, 0) = a * cc;
    G(0, 1) = -a * ss;
    G(1, 0) = a * ss;
    G(1, 1) = -a * cc;
    return G;
  };
  s.pressure = [viscosity](Vec2 x, double t) {
    return viscosity * phi(t) * pi * pi * std::cos(pi * x.x) * std::cos(pi * x.y);
  };
  s.pressure_gradient = [viscosity](Vec2 x, double t) {
    const double a = -viscosity * phi(t) * pi * pi * pi;
    return Vec2{a * std::sin(pi * x.x) * std::cos(pi * x.y),
                a * std::cos(pi * x.x) * std::sin(pi * x.y)};
  };
  return s;
}

ManufacturedSolution temporal_solution(double viscosity, bool convection) {
  ManufacturedSolution s;
  s.viscosity = viscosity;
  s.convection = convection;
  s.velocity = [](Vec2 x, double t) {
    return phi(t) * Vec2{x.y * x.y, (x.x - 1.0) * (x.x - 1.0)};
  };
  s.dvdt = [](Vec2 x, double t) {
    return dphi(t) * Vec2{x.y * x.y, (x.x - 1.0) * (x.x - 1.0)};
  };
  s.laplacian = [](Vec2, double t) { return Vec2{2.0 * phi(t), 2.0 * phi(t)}; };
  s.gradient = [](Vec2 x, double t) {
    Mat2 G;
    G(0, 1) = 2.0 * x.y * phi(t);
    G(1, 0) = 2.0 * (x.x - 1.0) * phi(t);
    return G;
  };
  s.pressure = [](Vec2 x, double t) { return phi(t) * (1.0 - x.x); };
  s.pressure_gradient = [](Vec2, double t) { return Vec2{-phi(t), 0.0}; };
  return s;
}

ProblemData manufactured_problem(const ManufacturedSolution &solution) {
  ProblemData data;
  data.viscosity = solution.viscosity;
  data.convection = solution.convection;
  data.body_force = [solution](Vec2 x, double t) { return solution.forcing(x, t); };
  data.dirichlet = [solution](int, Vec2 x, double t) { return solution.velocity(x, t); };
  data.initial_velocity = [solution](Vec2 x) { return solution.velocity(x, 0.0); };
  return data;
}

double velocity_error_l2(const SlabSpace &space, std::span<const double> block,
                         const std::function<Vec2(Vec2)> &exact) {
  const Mesh &mesh = space.mesh();
  const QuadRule2D rule = gauss_legendre_2d(space.dofs().velocity_order() + 3);
  double sum = 0.0;
  for (int K = 0; K < static_cast<int>(mesh.n_elements()); ++K)
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const ElementMapping m = mesh.element_geometry(K, rule.points[q]);
      const Vec2 e = space.velocity(block, K, rule.points[q]) - exact(m.point);
      sum += rule.weights[q] * std::abs(m.det) * dot(e, e);
    }
  return std::sqrt(sum);
}

double pressure_error_l2(const SlabSpace &space, std::span<const double> block,
                         const std::function<double(Vec2)> &exact) {
  const Mesh &mesh = space.mesh();
  const QuadRule2D rule = gauss_legendre_2d(space.dofs().velocity_order() + 3);
  double sum = 0.0;
  for (int K = 0; K < static_cast<int>(mesh.n_elements()); ++K)
    for (std::size_t q = 0; q < rule.weights.size(); ++q) {
      const ElementMapping m = mesh.element_geometry(K, rule.points[q]);
      const double e = space.pressure(block, K, m.point) - exact(m.point);
      sum += rule.weights[q] * std::abs(m.det) * e * e;
    }
  return std::sqrt(sum);
}

namespace {

ErrorNorms run_study_case(const MeshHierarchy &hierarchy, const ConvergenceStudy &study,
                          const ManufacturedSolution &solution, int steps) {
  const MultilevelSpace spaces(hierarchy, study.r, study.k);
  const SlabSpace &space = spaces.fine();
  const DofMap &dofs = space.dofs();
  const TemporalBasis &time = space.time();
  const int B = dofs.block_size();
  const QuadRule1D trule = gauss_legendre(study.k + 2);

  double spacetime = 0.0;
  MarchResult result;
  march(spaces, manufactured_problem(solution),
        TimeSchedule::uniform(study.final_time, study.final_time / steps), study.solver, result,
        [&](const TimeSlab &slab, const SlabVector &X) {
          for (std::size_t q = 0; q < trule.points.size(); ++q) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(B);
            for (int l = 0; l < dofs.n_time(); ++l)
              v += time.value(l, trule.points[q]) * X.segment(l * B, B);
            const double t = slab.time_at(trule.points[q]);
            const double e = velocity_error_l2(
                space, {v.data(), static_cast<std::size_t>(B)},
                [&](Vec2 x) { return solution.velocity(x, t); });
            spacetime += slab.length() * trule.weights[q] * e * e;
          }
        });

  const double T = study.final_time;
  const std::span<const double> last(result.final_state.data() + (dofs.n_time() - 1) * B,
                                     static_cast<std::size_t>(B));
  ErrorNorms e;
  e.velocity_final = velocity_error_l2(space, last, [&](Vec2 x) { return solution.velocity(x, T); });
  e.pressure_final = pressure_error_l2(space, last, [&](Vec2 x) { return solution.pressure(x, T); });
  e.velocity_spacetime = std::sqrt(spacetime);
  return e;
}

}  // namespace

std::vector<EocRow> manufactured_convergence(const ConvergenceStudy &study) {
  if (study.refinements < 1) throw std::invalid_argument("study needs at least one run");
  const ManufacturedSolution solution =
      study.kind == StudyKind::temporal ? temporal_solution(study.viscosity, study.convection)
                                        : spatial_solution(study.viscosity, study.convection);
  const Mesh coarse = manufactured_mesh(study.mesh_cells);
  std::vector<EocRow> rows;
  for (int i = 0; i < study.refinements; ++i) {
    EocRow row;
    row.refinement = i;
    ErrorNorms e;
    if (study.kind == StudyKind::temporal) {
      const int steps = study.steps0 << i;
      row.h_or_tau = study.final_time / steps;
      e = run_study_case(build_hierarchy(coarse, study.levels), study, solution, steps);
    } else {
      const MeshHierarchy hierarchy = build_hierarchy(coarse, i);
      row.h_or_tau = hierarchy.fine().h();
      e = run_study_case(hierarchy, study, solution, study.steps0);
    }
    row.error_v = e.velocity_final;
    row.error_p = e.pressure_final;
    row.error_v_spacetime = e.velocity_spacetime;
    if (i > 0) {
      const EocRow &prev = rows.back();
      const double ratio = std::log(prev.h_or_tau / row.h_or_tau);
      row.eoc_v = std::log(prev.error_v / row.error_v) / ratio;
      row.eoc_p = std::log(prev.error_p / row.error_p) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

void write_eoc_csv(std::ostream &out, const std::vector<EocRow> &rows) {
  out << "refinement,h_or_tau,error_v_L2,error_p_L2,eoc_v,eoc_p\n" << std::setprecision(17);
  for (const auto &r : rows) {
    out << r.refinement << ',' << r.h_or_tau << ',' << r.error_v << ',' << r.error_p << ',';
    if (std::isnan(r.eoc_v)) out << ',';
    else out << r.eoc_v << ',' << r.eoc_p;
    out << '\n';
  }
}

}  // namespace stvanka
