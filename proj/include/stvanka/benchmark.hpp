#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "stvanka/assembly.hpp"
#include "stvanka/mesh.hpp"
#include "stvanka/multigrid.hpp"
#include "stvanka/solver.hpp"

namespace stvanka {

namespace cylinder_marker {
inline constexpr int inflow = 1;
inline constexpr int wall = 2;
inline constexpr int cylinder = 3;
inline constexpr int outflow = 4;
}  // namespace cylinder_marker

struct CylinderGeometry {
  double length = 2.2;
  double height = 0.41;
  Vec2 center{0.2, 0.2};
  double diameter = 0.1;

  void validate() const;
};

/// Piecewise constant step sizes: piece i covers (t_start, t_end] with step tau.
struct SchedulePiece {
  double t_start = 0.0;
  double t_end = 0.0;
  double tau = 0.0;
};

struct TimeSchedule {
  std::vector<SchedulePiece> pieces;

  static TimeSchedule uniform(double final_time, double tau);
  /// Throws std::invalid_argument unless the pieces tile (0, final_time].
  void validate(double final_time) const;
  /// t_0 = 0 < t_1 < ... < t_N.
  std::vector<double> time_points() const;
  int n_slabs() const { return static_cast<int>(time_points().size()) - 1; }
};

struct BenchmarkConfig {
  CylinderGeometry geometry;
  std::string mesh_file;  // coarse mesh; empty selects the built-in cylinder mesh
  /// Uniform refinements applied to the built-in mesh before it becomes
  /// multigrid level 0.
  int coarse_refinements = 1;
  double inflow_peak = 1.5;  // U_m
  double viscosity = 1e-3;
  double final_time = 1.0;
  TimeSchedule schedule = TimeSchedule::uniform(1.0, 0.1);
  int k = 1;
  int r = 2;
  int levels = 2;
  bool snap_cylinder = false;
  bool convection = true;
  double gamma1 = 35.0;
  double gamma2 = 35.0;
  NewtonOptions solver;
  /// Time window (stats_start, stats_end] used for the mean solver statistics.
  double stats_start = 0.0;
  double stats_end = std::numeric_limits<double>::infinity();

  double mean_inflow() const { return 2.0 * inflow_peak / 3.0; }
  double reynolds() const { return mean_inflow() * geometry.diameter / viscosity; }
  void set_reynolds(double re) { viscosity = mean_inflow() * geometry.diameter / re; }
  void validate() const;
};

/// Coarse mesh of the channel minus the cylinder. The cylinder is the
/// inscribed octagon through 8 boundary vertices.
Mesh make_cylinder_mesh(const CylinderGeometry &geometry);

/// Parabolic inflow (4 U_m y (H - y) / H^2, 0), constant in time.
Vec2 inflow_profile(double y, double t, const BenchmarkConfig &config);

ProblemData cylinder_problem(const BenchmarkConfig &config);

/// F = integral over the faces with `marker` of (nu grad v - p I) n ds,
/// n pointing out of the body. `block` is one temporal block.
Vec2 surface_force(const SlabSpace &space, std::span<const double> block, double viscosity,
                   int marker);

struct DragLift {
  double drag = 0.0;
  double lift = 0.0;
};

/// c_D = 2 F_x / (U^2 D), c_L = 2 F_y / (U^2 D) with U the mean inflow speed.
DragLift drag_lift(const SlabSpace &space, std::span<const double> block,
                   const BenchmarkConfig &config);

struct CoefficientSample {
  double t = 0.0;
  double drag = 0.0;
  double lift = 0.0;
};
using CoefficientSeries = std::vector<CoefficientSample>;

struct StatsRow {
  int time_step = 0;
  double t = 0.0;  // end of the slab
  NewtonStep step;
};

struct SolverStats {
  std::vector<StatsRow> rows;

  void append(int time_step, double t, const NewtonResult &result);
  /// Newton steps per time step over slabs ending in (t0, t1].
  double mean_newton(double t0 = -1.0,
                     double t1 = std::numeric_limits<double>::infinity()) const;
  /// GMRES iterations per Newton step over slabs ending in (t0, t1].
  double mean_gmres(double t0 = -1.0,
                    double t1 = std::numeric_limits<double>::infinity()) const;
  int n_time_steps() const;

  void write_csv(std::ostream &out) const;
  static SolverStats read_csv(std::istream &in);
};

struct MarchResult {
  CoefficientSeries coefficients;
  SolverStats stats;
  SlabVector final_state;
  Eigen::VectorXd final_trace;
  int completed_slabs = 0;
  int dofs_per_slab = 0;
};

/// Solver failure inside the slab loop; `slab` is the 1-based slab index.
class MarchError : public SolverError {
public:
  MarchError(int slab, const SolverError &cause)
      : SolverError("slab " + std::to_string(slab) + ": " + cause.what(), cause.history(),
                    cause.element()),
        slab_(slab) {}
  int slab() const { return slab_; }

private:
  int slab_;
};

/// Called after every converged slab with the slab and its solution.
using SlabObserver = std::function<void(const TimeSlab &, const SlabVector &)>;

/// Slab loop over `schedule` starting from data.initial_velocity. Results
/// accumulate in `out`, which keeps the completed part if a MarchError is
/// thrown.
void march(const MultilevelSpace &spaces, const ProblemData &data, const TimeSchedule &schedule,
           const NewtonOptions &options, MarchResult &out, const SlabObserver &observer = {});

/// Cylinder benchmark: mesh hierarchy, slab loop, drag and lift at every
/// Radau node.
void run_time_marching(const BenchmarkConfig &config, MarchResult &out);

void write_coefficients_csv(std::ostream &out, const CoefficientSeries &series);

// Manufactured solutions and convergence studies.

struct ManufacturedSolution {
  double viscosity = 1.0;
  bool convection = true;
  std::function<Vec2(Vec2, double)> velocity;
  std::function<Mat2(Vec2, double)> gradient;  // (grad v)_{cd} = d v_c / d x_d
  std::function<double(Vec2, double)> pressure;
  std::function<Vec2(Vec2, double)> dvdt;
  std::function<Vec2(Vec2, double)> laplacian;
  std::function<Vec2(Vec2, double)> pressure_gradient;

  /// f = dv/dt + (v . grad) v - nu lap v + grad p.
  Vec2 forcing(Vec2 x, double t) const;
};

/// Unit square with the do-nothing condition on x = 1 (marker 2) and
/// Dirichlet data elsewhere (marker 1), n x n elements.
Mesh manufactured_mesh(int n);

/// Smooth stream-function solution for the spatial study; satisfies the
/// do-nothing condition on x = 1.
ManufacturedSolution spatial_solution(double viscosity, bool convection = true);

/// v = phi(t) (y^2, (x - 1)^2), p = phi(t) (1 - x): exactly representable in
/// space for r >= 2, so only the temporal error remains.
ManufacturedSolution temporal_solution(double viscosity, bool convection = true);

ProblemData manufactured_problem(const ManufacturedSolution &solution);

struct ErrorNorms {
  double velocity_final = 0.0;     // ||v(T) - v*(T)||_{L2}
  double pressure_final = 0.0;     // ||p(T) - p*(T)||_{L2}
  double velocity_spacetime = 0.0; // ||v - v*||_{L2(0,T; L2)}
};

/// L2 errors of one temporal block against the exact solution at time t.
double velocity_error_l2(const SlabSpace &space, std::span<const double> block,
                         const std::function<Vec2(Vec2)> &exact);
double pressure_error_l2(const SlabSpace &space, std::span<const double> block,
                         const std::function<double(Vec2)> &exact);

enum class StudyKind { temporal, spatial };

struct ConvergenceStudy {
  StudyKind kind = StudyKind::temporal;
  int k = 1;
  int r = 2;
  double viscosity = 1.0;
  bool convection = true;
  double final_time = 1.0;
  int refinements = 3;
  /// Temporal study: mesh_cells^2 elements refined `levels` times, tau_i =
  /// final_time / (steps0 2^i). Spatial study: tau = final_time / steps0,
  /// run i refines the mesh_cells^2 mesh i times.
  int mesh_cells = 4;
  int steps0 = 2;
  int levels = 0;
  NewtonOptions solver;
};

struct EocRow {
  int refinement = 0;
  double h_or_tau = 0.0;
  double error_v = 0.0;
  double error_p = 0.0;
  double eoc_v = std::numeric_limits<double>::quiet_NaN();
  double eoc_p = std::numeric_limits<double>::quiet_NaN();
  double error_v_spacetime = 0.0;
};

std::vector<EocRow> manufactured_convergence(const ConvergenceStudy &study);
void write_eoc_csv(std::ostream &out, const std::vector<EocRow> &rows);

}  // namespace stvanka
