#include "stvanka/solver.hpp"

#include <cmath>
#include <memory>
#include <numeric>

namespace stvanka {

namespace {

void givens(double a, double b, double &c, double &s) {
  if (b == 0.0) {
    c = 1.0;
    s = 0.0;
  } else {
    const double r = std::hypot(a, b);
    c = a / r;
    s = b / r;
  }
}

}  // namespace

GmresResult gmres_solve(const LinearOperator &A, const SlabVector &b,
                        const LinearOperator &preconditioner, const GmresOptions &options) {
  if (options.tolerance <= 0.0 || options.max_iterations < 1)
    throw std::invalid_argument("invalid GMRES options");
  const auto M = [&](const SlabVector &v) { return preconditioner ? preconditioner(v) : v; };
  const int n = static_cast<int>(b.size());
  const int m_max = options.restart > 0 ? options.restart : options.max_iterations;

  GmresResult out;
  out.x = SlabVector::Zero(n);
  SlabVector r = b;
  double beta = r.norm();
  out.history.push_back(beta);
  if (!std::isfinite(beta)) throw SolverError("GMRES: non-finite right-hand side");

  while (beta >= options.tolerance) {
    if (out.iterations >= options.max_iterations)
      throw SolverError("GMRES did not converge in " + std::to_string(options.max_iterations) +
                            " iterations",
                        out.history);
    std::vector<SlabVector> V{r / beta};
    std::vector<SlabVector> Z;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m_max + 1, m_max);
    Eigen::VectorXd cs(m_max), sn(m_max), g = Eigen::VectorXd::Zero(m_max + 1);
    g[0] = beta;
    int j = 0;
    bool breakdown = false;
    for (; j < m_max && out.iterations < options.max_iterations; ++j) {
      Z.push_back(M(V[j]));
      SlabVector w = A(Z[j]);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) {
          const double hij = V[i].dot(w);
          H(i, j) += hij;
          w -= hij * V[i];
        }
      H(j + 1, j) = w.norm();
      for (int i = 0; i < j; ++i) {
        const double t = cs[i] * H(i, j) + sn[i] * H(i + 1, j);
        H(i + 1, j) = -sn[i] * H(i, j) + cs[i] * H(i + 1, j);
        H(i, j) = t;
      }
      const double hnext = H(j + 1, j);
      givens(H(j, j), hnext, cs[j], sn[j]);
      H(j, j) = cs[j] * H(j, j) + sn[j] * hnext;
      H(j + 1, j) = 0.0;
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      ++out.iterations;
      out.history.push_back(std::abs(g[j + 1]));
      if (hnext <= 1e-14 * beta) {
        breakdown = true;
        ++j;
        break;
      }
      if (std::abs(g[j + 1]) < 0.5 * options.tolerance) {
        ++j;
        break;
      }
      V.push_back(w / hnext);
    }
    const Eigen::VectorXd y =
        H.topLeftCorner(j, j).triangularView<Eigen::Upper>().solve(g.head(j));
    for (int i = 0; i < j; ++i) out.x += y[i] * Z[i];
    r = b - A(out.x);
    const double true_residual = r.norm();
    out.history.back() = true_residual;
    if (!std::isfinite(true_residual)) throw SolverError("GMRES: non-finite residual", out.history);
    if (breakdown && true_residual >= options.tolerance && true_residual >= 0.999 * beta)
      throw SolverError("GMRES breakdown without convergence", out.history);
    beta = true_residual;
  }
  out.residual = beta;
  return out;
}

GmresResult gmres_solve(const SlabBlockMatrix &J, const SlabVector &b,
                        const LinearOperator &preconditioner, const GmresOptions &options) {
  return gmres_solve([&J](const SlabVector &x) { return J * x; }, b, preconditioner, options);
}

int NewtonResult::gmres_iterations() const {
  return std::accumulate(steps.begin(), steps.end(), 0,
                         [](int s, const NewtonStep &st) { return s + st.gmres_iterations; });
}

SlabVector initial_guess(const DofMap &dofs, const Eigen::VectorXd &trace,
                         const SlabVector *previous) {
  const int R = dofs.n_velocity();
  const int S = dofs.n_pressure();
  const int B = dofs.block_size();
  if (trace.size() != R) throw std::invalid_argument("initial_guess: trace length");
  SlabVector X = SlabVector::Zero(dofs.size());
  for (int l = 0; l < dofs.n_time(); ++l) {
    X.segment(l * B, R) = trace;
    if (previous) X.segment(l * B + R, S) = previous->segment((dofs.n_time() - 1) * B + R, S);
  }
  return X;
}

NewtonResult newton_solve(const MultilevelSpace &spaces, SlabVector X0, const TimeSlab &slab,
                          const ProblemData &data, const NewtonOptions &options) {
  const SlabSpace &space = spaces.fine();
  NewtonResult out;
  out.X = std::move(X0);
  SlabVector F = assemble_residual(space, out.X, slab, data);
  double norm = F.norm();
  out.steps.push_back({0, 0.0, 0, norm, 0.0});
  std::vector<double> history{norm};

  SlabBlockMatrix J = space.make_matrix();
  for (int m = 1; norm >= options.tolerance; ++m) {
    if (m > options.max_iterations)
      throw SolverError("Newton did not converge in " + std::to_string(options.max_iterations) +
                            " iterations",
                        history);
    assemble_jacobian(space, out.X, slab, data, J);

    std::unique_ptr<MultigridPreconditioner> mg;
    std::unique_ptr<DirectSolver> direct;
    LinearOperator prec;
    switch (options.preconditioner) {
    case PreconditionerKind::multigrid:
      mg = std::make_unique<MultigridPreconditioner>(spaces, J, out.X, slab, data,
                                                     options.multigrid);
      prec = [&mg](const SlabVector &v) { return mg->apply(v); };
      break;
    case PreconditionerKind::direct:
      direct = std::make_unique<DirectSolver>(J);
      prec = [&direct](const SlabVector &v) { return direct->solve(v); };
      break;
    case PreconditionerKind::none:
      break;
    }
    const GmresResult lin = gmres_solve(J, -F, prec, options.gmres);

    double lambda = 1.0;
    for (;; lambda *= 0.5) {
      if (lambda < options.min_damping)
        throw SolverError("Newton line search failed", history);
      SlabVector Xt = out.X + lambda * lin.x;
      SlabVector Ft = assemble_residual(space, Xt, slab, data);
      const double nt = Ft.norm();
      if (std::isfinite(nt) && nt <= (1.0 - options.sufficient_decrease * lambda) * norm) {
        out.X = std::move(Xt);
        F = std::move(Ft);
        norm = nt;
        break;
      }
    }
    history.push_back(norm);
    out.steps.push_back({m, lambda, lin.iterations, norm, lin.residual});
  }
  return out;
}

}  // namespace stvanka
