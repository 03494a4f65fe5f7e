#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "nlcq/backends.hpp"
#include "nlcq/cq.hpp"
#include "nlcq/impedance.hpp"
#include "nlcq/incident_wave.hpp"

namespace nlcq {

struct NewtonConfig {
  double tol_increment = 1e-10;
  int max_iters = 20;

  /// Throws ConfigError unless tol > 0 and max_iters >= 1.
  void validate() const;
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  int iterations = 0;
  double increment = 0.0;
  /// Residual norm after every iteration.
  std::vector<double> residuals;
};

struct MarchResult {
  TraceSequence traces;
  std::vector<StepDiagnostics> diagnostics;

  double median_iterations() const;
};

/// f^n = -(0; <d_n u_inc(t_n), y>) - sum_{j<n} B_{n-j} xi^j, with the Neumann
/// term dropped for the interior problem. `history` holds at least n steps.
Eigen::VectorXd rhs_history(int n, const ConvolutionSystem& weights, std::span<const TracePair> history,
                            const Backend& backend, const IncidentWave& wave, const TimeGrid& grid,
                            Problem problem);

/// Factorization of B_0 reused by every Newton iteration: with
/// B_0 = [[A, B], [C, D]] it keeps LU(A) and the Schur complement D - C A^-1 B,
/// so that each iteration only factors a dim_y matrix.
class LinearizedSolver {
 public:
  LinearizedSolver(const Eigen::MatrixXd& leading, Eigen::Index dim_x, Eigen::Index dim_y);

  /// Solves (B_0 + diag(0, jacobian)) xi = f.
  Eigen::VectorXd solve(const Eigen::MatrixXd& jacobian, const Eigen::VectorXd& f) const;
  /// Reuses the factorization of the last solve.
  Eigen::VectorXd resolve(const Eigen::VectorXd& f) const;

  const Eigen::MatrixXd& leading() const noexcept { return leading_; }
  Eigen::Index dim_x() const noexcept { return dim_x_; }
  Eigen::Index dim_y() const noexcept { return dim_y_; }

 private:
  Eigen::VectorXd back_substitute(const Eigen::VectorXd& f) const;

  Eigen::MatrixXd leading_;
  Eigen::Index dim_x_;
  Eigen::Index dim_y_;
  Eigen::PartialPivLU<Eigen::MatrixXd> top_;
  Eigen::MatrixXd a_inv_b_;
  Eigen::MatrixXd schur_;
  mutable Eigen::PartialPivLU<Eigen::MatrixXd> last_;
};

/// B_0 xi + (0; <g(psi + velocity), y>) - f.
Eigen::VectorXd newton_residual(const LinearizedSolver& solver, const Backend& backend, const Impedance& imp,
                                const Eigen::VectorXd& xi, const Eigen::VectorXd& velocity,
                                const Eigen::VectorXd& f);

/// One Newton update: solves
///   (B_0 + diag(0, G'_k)) xi^{k+1} = f + (0; -G(psi^k + v) + G'_k psi^k)
/// with G(mu) = <g(mu), y>, G'_k = <g'(psi^k + v) ., y> and v = J u_inc'(t_n).
Eigen::VectorXd newton_step(const LinearizedSolver& solver, const Backend& backend, const Impedance& imp,
                            const Eigen::VectorXd& xi, const Eigen::VectorXd& velocity,
                            const Eigen::VectorXd& f);

/// Time marching for n = 0..N. Every step starts Newton from the previous
/// solution and stops when the increment, or the increment predicted by the
/// current linearization for the next iteration, drops below the tolerance.
/// Throws NewtonFailure after max_iters iterations.
MarchResult solve_marching(const Backend& backend, const ConvolutionSystem& weights, const TimeGrid& grid,
                           const IncidentWave& wave, const Impedance& imp, const NewtonConfig& newton,
                           Problem problem, std::ostream* log = nullptr);

/// Convenience overload that computes the weights first.
MarchResult solve_marching(const Backend& backend, const MultistepScheme& scheme, const TimeGrid& grid,
                           const IncidentWave& wave, const Impedance& imp, const NewtonConfig& newton,
                           Problem problem, std::ostream* log = nullptr);

/// (d^dt)^-1 applied to phi and psi componentwise.
TraceSequence integrated_traces(const TraceSequence& seq, const MultistepScheme& scheme, const TimeGrid& grid);

/// u(x, t_n) = [S(d^dt) phi]^n + [(d^dt)^-1 D(d^dt) psi]^n for n = 0..seq.size()-1.
std::vector<double> evaluate_field(const Backend& backend, const Eigen::Vector3d& x, const TraceSequence& seq,
                                   const MultistepScheme& scheme, const TimeGrid& grid);

}  // namespace nlcq
