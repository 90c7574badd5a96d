#include "stvanka/benchmark.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace stvanka {

void CylinderGeometry::validate() const {
  if (!(length > 0.0 && height > 0.0 && diameter > 0.0))
    throw std::invalid_argument("channel and cylinder dimensions must be positive");
  // The mesh puts a box of half-width D around the cylinder.
  const double b = diameter;
  if (!(center.x - b > 0.0 && center.y - b > 0.0 && center.y + b < height &&
        center.x + 3.0 * b < length))
    throw std::invalid_argument("cylinder is not strictly inside the channel");
}

TimeSchedule TimeSchedule::uniform(double final_time, double tau) {
  return TimeSchedule{{{0.0, final_time, tau}}};
}

void TimeSchedule::validate(double final_time) const {
  if (pieces.empty()) throw std::invalid_argument("empty time schedule");
  if (!(final_time > 0.0)) throw std::invalid_argument("final time must be positive");
  double t = 0.0;
  for (const auto &p : pieces) {
    if (std::abs(p.t_start - t) > 1e-12 * std::max(1.0, t))
      throw std::invalid_argument("time schedule has a gap or overlap at t = " +
                                  std::to_string(p.t_start));
    if (!(p.t_end > p.t_start)) throw std::invalid_argument("empty schedule interval");
    if (!(p.tau > 0.0)) throw std::invalid_argument("time step must be positive");
    const double n = (p.t_end - p.t_start) / p.tau;
    if (std::abs(n - std::round(n)) > 1e-8 * std::max(1.0, n))
      throw std::invalid_argument("time step does not divide its interval");
    t = p.t_end;
  }
  if (std::abs(t - final_time) > 1e-12 * std::max(1.0, final_time))
    throw std::invalid_argument("time schedule does not end at the final time");
}

std::vector<double> TimeSchedule::time_points() const {
  std::vector<double> t{0.0};
  for (const auto &p : pieces) {
    const int n = static_cast<int>(std::lround((p.t_end - p.t_start) / p.tau));
    for (int i = 1; i < n; ++i) t.push_back(p.t_start + i * p.tau);
    t.push_back(p.t_end);
  }
  return t;
}

void BenchmarkConfig::validate() const {
  if (mesh_file.empty()) geometry.validate();
  schedule.validate(final_time);
  if (k < 0 || k > 4) throw std::invalid_argument("k must lie in [0, 4]");
  if (r < 2 || r > 4) throw std::invalid_argument("r must lie in [2, 4]");
  if (levels < 0 || levels > 5) throw std::invalid_argument("levels must lie in [0, 5]");
  if (coarse_refinements < 0 || coarse_refinements > 3)
    throw std::invalid_argument("coarse_refinements must lie in [0, 3]");
  if (!(viscosity > 0.0)) throw std::invalid_argument("viscosity must be positive");
  if (!(inflow_peak > 0.0)) throw std::invalid_argument("inflow peak must be positive");
}

Mesh make_cylinder_mesh(const CylinderGeometry &g) {
  g.validate();
  const double b = g.diameter;
  const double R = 0.5 * g.diameter;
  const Vec2 c = g.center;

  std::vector<Vec2> vertices;
  std::map<std::pair<long long, long long>, int> index;
  auto vertex = [&](Vec2 p) {
    const auto key = std::make_pair(std::llround(p.x * 1e9), std::llround(p.y * 1e9));
    auto [it, inserted] = index.try_emplace(key, static_cast<int>(vertices.size()));
    if (inserted) vertices.push_back(p);
    return it->second;
  };

  std::vector<std::array<int, 4>> elements;
  auto add_quad = [&](std::array<int, 4> q) {
    double area = 0.0;
    for (int i = 0; i < 4; ++i) {
      const Vec2 &p = vertices[q[i]], &s = vertices[q[(i + 1) % 4]];
      area += p.x * s.y - s.x * p.y;
    }
    if (area < 0.0) std::swap(q[1], q[3]);
    elements.push_back(q);
  };

  // Ring of 8 quads between the octagon and the box [c - b, c + b]^2.
  std::array<int, 8> circle{}, box{};
  for (int j = 0; j < 8; ++j) {
    const double theta = j * std::numbers::pi / 4.0;
    const double ct = std::cos(theta), st = std::sin(theta);
    circle[j] = vertex({c.x + R * ct, c.y + R * st});
    const double sx = std::abs(ct) < 1e-12 ? 0.0 : (ct > 0 ? 1.0 : -1.0);
    const double sy = std::abs(st) < 1e-12 ? 0.0 : (st > 0 ? 1.0 : -1.0);
    box[j] = vertex({c.x + b * sx, c.y + b * sy});
  }
  for (int j = 0; j < 8; ++j)
    add_quad({circle[j], circle[(j + 1) % 8], box[(j + 1) % 8], box[j]});

  // Structured cells outside the box.
  std::vector<double> xs{0.0, c.x - b, c.x, c.x + b};
  const std::vector<double> ys{0.0, c.y - b, c.y, c.y + b, g.height};
  const double wide = 2.0 * b;
  double x = c.x + b;
  for (int i = 0; x + 1e-12 < g.length; ++i) {
    const double w = i < 2 ? b : wide;
    x = (g.length - (x + w) < 0.75 * wide) ? g.length : x + w;
    xs.push_back(x);
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const bool inside = i >= 1 && i <= 2 && j >= 1 && j <= 2;
      if (inside) continue;
      add_quad({vertex({xs[i], ys[j]}), vertex({xs[i + 1], ys[j]}),
                vertex({xs[i + 1], ys[j + 1]}), vertex({xs[i], ys[j + 1]})});
    }

  using namespace cylinder_marker;
  std::vector<BoundarySegment> boundary;
  for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
    boundary.push_back({inflow, vertex({0.0, ys[j]}), vertex({0.0, ys[j + 1]})});
    boundary.push_back({outflow, vertex({g.length, ys[j]}), vertex({g.length, ys[j + 1]})});
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    boundary.push_back({wall, vertex({xs[i], 0.0}), vertex({xs[i + 1], 0.0})});
    boundary.push_back({wall, vertex({xs[i], g.height}), vertex({xs[i + 1], g.height})});
  }
  for (int j = 0; j < 8; ++j) boundary.push_back({cylinder, circle[j], circle[(j + 1) % 8]});

  std::vector<BoundaryMarker> markers{{inflow, BoundaryKind::dirichlet},
                                      {wall, BoundaryKind::dirichlet},
                                      {cylinder, BoundaryKind::dirichlet},
                                      {outflow, BoundaryKind::do_nothing}};
  return Mesh(std::move(vertices), std::move(elements), std::move(boundary), std::move(markers));
}

Vec2 inflow_profile(double y, double /*t*/, const BenchmarkConfig &config) {
  const double H = config.geometry.height;
  return {4.0 * config.inflow_peak * y * (H - y) / (H * H), 0.0};
}

ProblemData cylinder_problem(const BenchmarkConfig &config) {
  ProblemData data;
  data.viscosity = config.viscosity;
  data.gamma1 = config.gamma1;
  data.gamma2 = config.gamma2;
  data.convection = config.convection;
  data.dirichlet = [config](int marker, Vec2 x, double t) {
    return marker == cylinder_marker::inflow ? inflow_profile(x.y, t, config) : Vec2{};
  };
  return data;
}

Vec2 surface_force(const SlabSpace &space, std::span<const double> block, double viscosity,
                   int marker) {
  const Mesh &mesh = space.mesh();
  const DofMap &dofs = space.dofs();
  const int ns = space.n_scalar();
  const int np = space.pressure_basis().size();
  Vec2 F;
  bool found = false;
  for (int f : mesh.boundary_faces()) {
    if (mesh.face(f).marker != marker) continue;
    found = true;
    const FaceQuadrature fq = space.face_quadrature(f, dofs.velocity_order() + 2);
    const auto nodes = dofs.element_nodes(fq.element);
    for (std::size_t q = 0; q < fq.jxw.size(); ++q) {
      Mat2 G;
      for (int i = 0; i < ns; ++i) {
        const Vec2 &gi = fq.gradients[q * ns + i];
        for (int c = 0; c < 2; ++c) {
          const double coef = block[dofs.velocity_index(c, nodes[i])];
          G(c, 0) += coef * gi.x;
          G(c, 1) += coef * gi.y;
        }
      }
      double p = 0.0;
      for (int s = 0; s < np; ++s)
        p += block[dofs.pressure_index(fq.element, s)] * fq.pressure[q * np + s];
      const Vec2 n = -1.0 * fq.normals[q];
      F += fq.jxw[q] * (viscosity * (G * n) - p * n);
    }
  }
  if (!found) throw std::invalid_argument("no boundary faces carry marker " + std::to_string(marker));
  return F;
}

DragLift drag_lift(const SlabSpace &space, std::span<const double> block,
                   const BenchmarkConfig &config) {
  const Vec2 F = surface_force(space, block, config.viscosity, cylinder_marker::cylinder);
  const double U = config.mean_inflow();
  const double scale = 2.0 / (U * U * config.geometry.diameter);
  return {scale * F.x, scale * F.y};
}

void SolverStats::append(int time_step, double t, const NewtonResult &result) {
  for (const NewtonStep &s : result.steps) rows.push_back({time_step, t, s});
}

namespace {

bool in_window(double t, double t0, double t1) { return t > t0 && t <= t1; }

}  // namespace

int SolverStats::n_time_steps() const {
  int n = 0;
  for (const auto &row : rows)
    if (row.step.iteration == 0) ++n;
  return n;
}

double SolverStats::mean_newton(double t0, double t1) const {
  int steps = 0, newton = 0;
  for (const auto &row : rows) {
    if (!in_window(row.t, t0, t1)) continue;
    if (row.step.iteration == 0) ++steps;
    else ++newton;
  }
  return steps == 0 ? 0.0 : static_cast<double>(newton) / steps;
}

double SolverStats::mean_gmres(double t0, double t1) const {
  int newton = 0, gmres = 0;
  for (const auto &row : rows) {
    if (!in_window(row.t, t0, t1) || row.step.iteration == 0) continue;
    ++newton;
    gmres += row.step.gmres_iterations;
  }
  return newton == 0 ? 0.0 : static_cast<double>(gmres) / newton;
}

void SolverStats::write_csv(std::ostream &out) const {
  out << "time_step,t,newton_iter,damping,gmres_iters,residual_newton,residual_gmres\n";
  out << std::setprecision(17);
  for (const auto &r : rows)
    out << r.time_step << ',' << r.t << ',' << r.step.iteration << ',' << r.step.damping << ','
        << r.step.gmres_iterations << ',' << r.step.residual << ',' << r.step.gmres_residual
        << '\n';
}

SolverStats SolverStats::read_csv(std::istream &in) {
  std::string line;
  if (!std::getline(in, line) ||
      line != "time_step,t,newton_iter,damping,gmres_iters,residual_newton,residual_gmres")
    throw std::runtime_error("stats CSV: unexpected header");
  SolverStats stats;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    StatsRow r;
    char c1, c2, c3, c4, c5, c6;
    ss >> r.time_step >> c1 >> r.t >> c2 >> r.step.iteration >> c3 >> r.step.damping >> c4 >>
        r.step.gmres_iterations >> c5 >> r.step.residual >> c6 >> r.step.gmres_residual;
    if (!ss || c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',' || c5 != ',' || c6 != ',')
      throw std::runtime_error("stats CSV: malformed line " + std::to_string(lineno));
    stats.rows.push_back(r);
  }
  return stats;
}

void march(const MultilevelSpace &spaces, const ProblemData &data, const TimeSchedule &schedule,
           const NewtonOptions &options, MarchResult &out, const SlabObserver &observer) {
  data.validate();
  const DofMap &dofs = spaces.fine().dofs();
  out.dofs_per_slab = dofs.size();
  const std::vector<double> t = schedule.time_points();
  Eigen::VectorXd trace = data.initial_velocity
                              ? interpolate_velocity(dofs, data.initial_velocity)
                              : Eigen::VectorXd::Zero(dofs.n_velocity());
  out.final_trace = trace;
  for (int n = 1; n < static_cast<int>(t.size()); ++n) {
    const TimeSlab slab{n, t[n - 1], t[n], trace};
    const SlabVector X0 = initial_guess(dofs, trace, n > 1 ? &out.final_state : nullptr);
    NewtonResult result;
    try {
      result = newton_solve(spaces, X0, slab, data, options);
    } catch (const SolverError &e) {
      throw MarchError(n, e);
    }
    out.stats.append(n, t[n], result);
    if (observer) observer(slab, result.X);
    trace = end_trace(dofs, result.X);
    out.final_state = std::move(result.X);
    out.final_trace = trace;
    out.completed_slabs = n;
  }
}

void run_time_marching(const BenchmarkConfig &config, MarchResult &out) {
  config.validate();
  std::optional<CircleSnap> snap;
  if (config.snap_cylinder)
    snap = CircleSnap{cylinder_marker::cylinder, config.geometry.center,
                      0.5 * config.geometry.diameter};
  Mesh coarse;
  if (config.mesh_file.empty()) {
    coarse = make_cylinder_mesh(config.geometry);
    for (int i = 0; i < config.coarse_refinements; ++i) coarse = refine_uniform(coarse, nullptr, snap);
  } else {
    coarse = read_mesh_file(config.mesh_file);
  }
  const MeshHierarchy hierarchy = build_hierarchy(coarse, config.levels, snap);
  const MultilevelSpace spaces(hierarchy, config.r, config.k);
  const SlabSpace &fine = spaces.fine();
  const int B = fine.dofs().block_size();
  const ProblemData data = cylinder_problem(config);
  out.dofs_per_slab = fine.dofs().size();

  march(spaces, data, config.schedule, config.solver, out,
        [&](const TimeSlab &slab, const SlabVector &X) {
          for (int l = 0; l < fine.dofs().n_time(); ++l) {
            const std::span<const double> block(X.data() + l * B, static_cast<std::size_t>(B));
            const DragLift c = drag_lift(fine, block, config);
            out.coefficients.push_back({slab.time_at(fine.time().nodes()[l]), c.drag, c.lift});
          }
        });
}

void write_coefficients_csv(std::ostream &out, const CoefficientSeries &series) {
  out << "t,c_D,c_L\n" << std::setprecision(17);
  for (const auto &s : series) out << s.t << ',' << s.drag << ',' << s.lift << '\n';
}

}  // namespace stvanka
