#include "nlcq/march.hpp"

#include <algorithm>
#include <ostream>

#include "nlcq/errors.hpp"

namespace nlcq {

void NewtonConfig::validate() const {
  if (!(tol_increment > 0.0)) throw ConfigError("Newton tolerance must be positive");
  if (max_iters < 1) throw ConfigError("Newton needs at least one iteration");
}

double MarchResult::median_iterations() const {
  if (diagnostics.empty()) return 0.0;
  std::vector<int> iters;
  iters.reserve(diagnostics.size());
  for (const auto& d : diagnostics) iters.push_back(d.iterations);
  std::sort(iters.begin(), iters.end());
  const std::size_t mid = iters.size() / 2;
  if (iters.size() % 2 == 1) return iters[mid];
  return 0.5 * (iters[mid - 1] + iters[mid]);
}

Eigen::VectorXd rhs_history(int n, const ConvolutionSystem& weights, std::span<const TracePair> history,
                            const Backend& backend, const IncidentWave& wave, const TimeGrid& grid,
                            Problem problem) {
  const Eigen::Index nx = weights.dim_x();
  const Eigen::Index ny = weights.dim_y();
  if (nx != backend.dim_x() || ny != backend.dim_y()) throw DimensionMismatch("weights do not match the backend");
  if (n < 0 || n >= weights.weight_count()) throw DimensionMismatch("step index outside the weight table");
  if (static_cast<int>(history.size()) < n) throw DimensionMismatch("history shorter than the step index");
  Eigen::VectorXd fx = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd fy = Eigen::VectorXd::Zero(ny);
  if (n > 0) {
    const auto& last = history[static_cast<std::size_t>(n - 1)];
    if (last.phi.size() != nx || last.psi.size() != ny) throw DimensionMismatch("history entry has the wrong size");
  }
  weights.accumulate_history(n, history, fx, fy);
  Eigen::VectorXd f(nx + ny);
  f.head(nx) = -fx;
  f.tail(ny) = -fy;
  if (problem == Problem::exterior) f.tail(ny) -= backend.neumann_load(wave, grid.time(n));
  return f;
}

LinearizedSolver::LinearizedSolver(const Eigen::MatrixXd& leading, Eigen::Index dim_x, Eigen::Index dim_y)
    : leading_(leading), dim_x_(dim_x), dim_y_(dim_y) {
  if (leading.rows() != dim_x + dim_y || leading.cols() != dim_x + dim_y) {
    throw DimensionMismatch("leading weight has the wrong shape");
  }
  top_.compute(leading.topLeftCorner(dim_x, dim_x));
  a_inv_b_ = top_.solve(leading.topRightCorner(dim_x, dim_y));
  schur_ = leading.bottomRightCorner(dim_y, dim_y) - leading.bottomLeftCorner(dim_y, dim_x) * a_inv_b_;
  last_.compute(schur_);
}

Eigen::VectorXd LinearizedSolver::back_substitute(const Eigen::VectorXd& f) const {
  const Eigen::VectorXd a_inv_fx = top_.solve(f.head(dim_x_));
  const Eigen::VectorXd reduced = f.tail(dim_y_) - leading_.bottomLeftCorner(dim_y_, dim_x_) * a_inv_fx;
  Eigen::VectorXd xi(dim_x_ + dim_y_);
  xi.tail(dim_y_) = last_.solve(reduced);
  xi.head(dim_x_) = a_inv_fx - a_inv_b_ * xi.tail(dim_y_);
  return xi;
}

Eigen::VectorXd LinearizedSolver::solve(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& f) const {
  if (f.size() != dim_x_ + dim_y_) throw DimensionMismatch("right-hand side has the wrong size");
  last_.compute(schur_ + jacobian);
  return back_substitute(f);
}

Eigen::VectorXd LinearizedSolver::resolve(const Eigen::VectorXd& f) const {
  if (f.size() != dim_x_ + dim_y_) throw DimensionMismatch("right-hand side has the wrong size");
  return back_substitute(f);
}

namespace {

struct Linearization {
  Eigen::VectorXd value;
  Eigen::MatrixXd jacobian;
};

Linearization linearize(const Backend& backend, const Impedance& imp, const Eigen::VectorXd& xi,
                        const Eigen::VectorXd& velocity, Eigen::Index nx) {
  Linearization lin;
  backend.nonlinearity(imp, xi.tail(xi.size() - nx) + velocity, lin.value, lin.jacobian);
  return lin;
}

Eigen::VectorXd residual_of(const LinearizedSolver& solver, const Linearization& lin, const Eigen::VectorXd& xi,
                            const Eigen::VectorXd& f) {
  Eigen::VectorXd r = solver.leading() * xi - f;
  r.tail(solver.dim_y()) += lin.value;
  return r;
}

Eigen::VectorXd step_from(const LinearizedSolver& solver, const Linearization& lin, const Eigen::VectorXd& xi,
                          const Eigen::VectorXd& f) {
  Eigen::VectorXd rhs = f;
  rhs.tail(solver.dim_y()) += lin.jacobian * xi.tail(solver.dim_y()) - lin.value;
  return solver.solve(lin.jacobian, rhs);
}

}  // namespace

Eigen::VectorXd newton_residual(const LinearizedSolver& solver, const Backend& backend, const Impedance& imp,
                                const Eigen::VectorXd& xi, const Eigen::VectorXd& velocity,
                                const Eigen::VectorXd& f) {
  return residual_of(solver, linearize(backend, imp, xi, velocity, solver.dim_x()), xi, f);
}

Eigen::VectorXd newton_step(const LinearizedSolver& solver, const Backend& backend, const Impedance& imp,
                            const Eigen::VectorXd& xi, const Eigen::VectorXd& velocity,
                            const Eigen::VectorXd& f) {
  if (xi.size() != solver.dim_x() + solver.dim_y() || velocity.size() != solver.dim_y()) {
    throw DimensionMismatch("Newton iterate has the wrong size");
  }
  return step_from(solver, linearize(backend, imp, xi, velocity, solver.dim_x()), xi, f);
}

MarchResult solve_marching(const Backend& backend, const ConvolutionSystem& weights, const TimeGrid& grid,
                           const IncidentWave& wave, const Impedance& imp, const NewtonConfig& newton,
                           Problem problem, std::ostream* log) {
  newton.validate();
  backend.check_wave(wave);
  const Eigen::Index nx = backend.dim_x();
  const Eigen::Index ny = backend.dim_y();
  if (weights.dim_x() != nx || weights.dim_y() != ny) throw DimensionMismatch("weights do not match the backend");
  if (weights.weight_count() < grid.steps() + 1) throw DimensionMismatch("weight table shorter than the time grid");

  if (log != nullptr) {
    const auto points = backend.sample_points();
    const double defect = causality_defect(wave, points);
    if (defect > 1e-8) {
      *log << "# warning: incident wave is " << defect << " of its amplitude on the surface at t = 0\n";
    }
    *log << "# n, t_n, newton_iters, final_increment\n";
  }

  const LinearizedSolver solver(weights.leading(), nx, ny);
  MarchResult result;
  result.traces.reserve(static_cast<std::size_t>(grid.steps() + 1));
  result.diagnostics.reserve(static_cast<std::size_t>(grid.steps() + 1));
  Eigen::VectorXd xi = Eigen::VectorXd::Zero(nx + ny);

  for (int n = 0; n <= grid.steps(); ++n) {
    const Eigen::VectorXd f = rhs_history(n, weights, result.traces, backend, wave, grid, problem);
    const Eigen::VectorXd velocity = backend.velocity_trace(wave, grid.time(n));
    StepDiagnostics diag;
    diag.step = n;
    diag.time = grid.time(n);
    Linearization lin = linearize(backend, imp, xi, velocity, nx);
    bool converged = false;
    for (int k = 1; k <= newton.max_iters; ++k) {
      const Eigen::VectorXd next = step_from(solver, lin, xi, f);
      const double increment = (next - xi).norm();
      xi = next;
      lin = linearize(backend, imp, xi, velocity, nx);
      const Eigen::VectorXd r = residual_of(solver, lin, xi, f);
      diag.residuals.push_back(r.norm());
      diag.iterations = k;
      diag.increment = increment;
      if (increment < newton.tol_increment) {
        converged = true;
        break;
      }
      // next increment predicted with the current linearization
      const double predicted = solver.resolve(r).norm();
      if (predicted < newton.tol_increment) {
        diag.increment = predicted;
        converged = true;
        break;
      }
    }
    if (log != nullptr) *log << n << ", " << diag.time << ", " << diag.iterations << ", " << diag.increment << '\n';
    if (!converged) throw NewtonFailure(n, diag.iterations, diag.increment);
    result.traces.push_back({xi.head(nx), xi.tail(ny)});
    result.diagnostics.push_back(std::move(diag));
  }
  return result;
}

MarchResult solve_marching(const Backend& backend, const MultistepScheme& scheme, const TimeGrid& grid,
                           const IncidentWave& wave, const Impedance& imp, const NewtonConfig& newton,
                           Problem problem, std::ostream* log) {
  newton.validate();
  backend.check_wave(wave);
  const auto weights = backend.discretize(scheme, grid, problem);
  return solve_marching(backend, *weights, grid, wave, imp, newton, problem, log);
}

TraceSequence integrated_traces(const TraceSequence& seq, const MultistepScheme& scheme, const TimeGrid& grid) {
  if (seq.empty()) return {};
  if (static_cast<int>(seq.size()) > grid.steps() + 1) throw DimensionMismatch("sequence longer than the time grid");
  const Eigen::Index nx = seq.front().phi.size();
  const Eigen::Index ny = seq.front().psi.size();
  const auto steps = static_cast<Eigen::Index>(seq.size());
  Eigen::MatrixXd phi(nx, steps);
  Eigen::MatrixXd psi(ny, steps);
  for (Eigen::Index n = 0; n < steps; ++n) {
    const auto& xi = seq[static_cast<std::size_t>(n)];
    if (xi.phi.size() != nx || xi.psi.size() != ny) throw DimensionMismatch("sequence entries differ in size");
    phi.col(n) = xi.phi;
    psi.col(n) = xi.psi;
  }
  const Eigen::MatrixXd iphi = discrete_antiderivative(phi, scheme, grid);
  const Eigen::MatrixXd ipsi = discrete_antiderivative(psi, scheme, grid);
  TraceSequence out(seq.size());
  for (Eigen::Index n = 0; n < steps; ++n) out[static_cast<std::size_t>(n)] = {iphi.col(n), ipsi.col(n)};
  return out;
}

std::vector<double> evaluate_field(const Backend& backend, const Eigen::Vector3d& x, const TraceSequence& seq,
                                   const MultistepScheme& scheme, const TimeGrid& grid) {
  if (seq.empty()) return {};
  if (static_cast<int>(seq.size()) > grid.steps() + 1) throw DimensionMismatch("sequence longer than the time grid");
  const WeightTable table = cq_weights(backend.potential_kernel(x), scheme, grid, "potentials");
  const Eigen::Index nx = backend.dim_x();
  const Eigen::Index ny = backend.dim_y();
  std::vector<Eigen::RowVectorXd> rows;
  rows.reserve(table.weights.size());
  for (const auto& w : table.weights) rows.emplace_back(w.real());
  std::vector<double> field(seq.size(), 0.0);
  for (std::size_t n = 0; n < seq.size(); ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      const auto& xi = seq[n - j];
      if (xi.phi.size() != nx || xi.psi.size() != ny) throw DimensionMismatch("sequence entry has the wrong size");
      acc += rows[j].head(nx).dot(xi.phi) + rows[j].tail(ny).dot(xi.psi);
    }
    field[n] = acc;
  }
  return field;
}

}  // namespace nlcq
