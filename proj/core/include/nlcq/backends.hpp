#pragma once

#include <array>
#include <functional>
#include <span>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nlcq/bem3d.hpp"
#include "nlcq/cq.hpp"
#include "nlcq/impedance.hpp"
#include "nlcq/incident_wave.hpp"
#include "nlcq/mesh.hpp"
#include "nlcq/spaces.hpp"

namespace nlcq {

enum class Problem { exterior, interior };

Problem problem_from_name(const std::string& name);
std::string problem_name(Problem problem);

/// Coefficients of the Neumann density phi (X_h) and of the velocity trace
/// psi (Y_h) at one time step.
struct TracePair {
  Eigen::VectorXd phi;
  Eigen::VectorXd psi;

  static TracePair zero(Eigen::Index dim_x, Eigen::Index dim_y) {
    return {Eigen::VectorXd::Zero(dim_x), Eigen::VectorXd::Zero(dim_y)};
  }
};

using TraceSequence = std::vector<TracePair>;

/// CQ weights B_0..B_N of the block system on a fixed grid.
class ConvolutionSystem {
 public:
  virtual ~ConvolutionSystem() = default;

  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;
  virtual int weight_count() const = 0;
  /// Dense B_0 (including the duality terms).
  virtual Eigen::MatrixXd leading() const = 0;
  /// out_x += [B_n xi]_x, out_y += [B_n xi]_y.
  virtual void apply_add(int n, const TracePair& xi, Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const = 0;
  /// out += sum_{j<n} B_{n-j} history[j].
  virtual void accumulate_history(int n, std::span<const TracePair> history, Eigen::VectorXd& out_x,
                                  Eigen::VectorXd& out_y) const;
};

/// Modal weights: B_n are 2x2 matrices.
class MatrixConvolution final : public ConvolutionSystem {
 public:
  MatrixConvolution(std::vector<Eigen::MatrixXd> weights, Eigen::Index dim_x, Eigen::Index dim_y);

  Eigen::Index dim_x() const override { return dim_x_; }
  Eigen::Index dim_y() const override { return dim_y_; }
  int weight_count() const override { return static_cast<int>(weights_.size()); }
  Eigen::MatrixXd leading() const override { return weights_.front(); }
  void apply_add(int n, const TracePair& xi, Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const override;
  void accumulate_history(int n, std::span<const TracePair> history, Eigen::VectorXd& out_x,
                          Eigen::VectorXd& out_y) const override;
  const Eigen::MatrixXd& weight(int n) const { return weights_[static_cast<std::size_t>(n)]; }

 private:
  std::vector<Eigen::MatrixXd> weights_;
  std::vector<std::array<double, 4>> scalar_;  // row-major copies when both blocks are 1x1
  Eigen::Index dim_x_;
  Eigen::Index dim_y_;
};

/// Galerkin weights stored blockwise: weights of s V, K and W / s per step,
/// plus the s-independent duality terms that only enter B_0.
class BlockConvolution final : public ConvolutionSystem {
 public:
  BlockConvolution(Eigen::MatrixXd table, Eigen::MatrixXd duality, bool interior);

  Eigen::Index dim_x() const override { return duality_.rows(); }
  Eigen::Index dim_y() const override { return duality_.cols(); }
  int weight_count() const override { return static_cast<int>(table_.cols()); }
  Eigen::MatrixXd leading() const override;
  void apply_add(int n, const TracePair& xi, Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const override;

  /// Entry count of one flattened weight (dx^2 + dx dy + dy^2).
  static Eigen::Index entries(Eigen::Index dim_x, Eigen::Index dim_y) {
    return dim_x * dim_x + dim_x * dim_y + dim_y * dim_y;
  }

 private:
  Eigen::MatrixXd table_;
  Eigen::MatrixXd duality_;
  double sign_;
};

/// Spatial discretization behind the time marching.
class Backend {
 public:
  virtual ~Backend() = default;

  virtual std::string name() const = 0;
  virtual Eigen::Index dim_x() const = 0;
  virtual Eigen::Index dim_y() const = 0;

  virtual std::unique_ptr<ConvolutionSystem> discretize(const MultistepScheme& scheme, const TimeGrid& grid,
                                                        Problem problem) const = 0;

  /// Throws ConfigError if the wave cannot be represented by the backend.
  virtual void check_wave(const IncidentWave& wave) const = 0;
  /// <d_n u_inc(t), y_j>.
  virtual Eigen::VectorXd neumann_load(const IncidentWave& wave, double t) const = 0;
  /// J u_inc'(t) in Y_h.
  virtual Eigen::VectorXd velocity_trace(const IncidentWave& wave, double t) const = 0;
  /// Points on the surface used for the causality check of the incident wave.
  virtual std::vector<Eigen::Vector3d> sample_points() const = 0;

  /// value = <g(mu_h), y_j>, jacobian = <g'(mu_h) y_i, y_j> for mu_h in Y_h.
  virtual void nonlinearity(const Impedance& imp, const Eigen::VectorXd& mu, Eigen::VectorXd& value,
                            Eigen::MatrixXd& jacobian) const = 0;

  /// Mass-weighted norms (L2(Gamma) proxies of the trace norms).
  virtual double norm_x(const Eigen::VectorXd& phi) const = 0;
  virtual double norm_y(const Eigen::VectorXd& psi) const = 0;
  /// Surface averages.
  virtual double mean_x(const Eigen::VectorXd& phi) const = 0;
  virtual double mean_y(const Eigen::VectorXd& psi) const = 0;

  /// Row kernel s -> [S(s) | D(s) / s] at an exterior point, for the field
  /// u = S phi + s^-1 D psi. Throws ConfigError when x is too close to the surface.
  virtual MatrixKernel potential_kernel(const Eigen::Vector3d& x) const = 0;
};

/// Unit sphere reduced to the constant mode (both traces are scalars).
class ModalBackend final : public Backend {
 public:
  std::string name() const override { return "modal"; }
  Eigen::Index dim_x() const override { return 1; }
  Eigen::Index dim_y() const override { return 1; }
  std::unique_ptr<ConvolutionSystem> discretize(const MultistepScheme& scheme, const TimeGrid& grid,
                                                Problem problem) const override;
  void check_wave(const IncidentWave& wave) const override;
  Eigen::VectorXd neumann_load(const IncidentWave& wave, double t) const override;
  Eigen::VectorXd velocity_trace(const IncidentWave& wave, double t) const override;
  std::vector<Eigen::Vector3d> sample_points() const override;
  void nonlinearity(const Impedance& imp, const Eigen::VectorXd& mu, Eigen::VectorXd& value,
                    Eigen::MatrixXd& jacobian) const override;
  double norm_x(const Eigen::VectorXd& phi) const override;
  double norm_y(const Eigen::VectorXd& psi) const override;
  double mean_x(const Eigen::VectorXd& phi) const override { return phi[0]; }
  double mean_y(const Eigen::VectorXd& psi) const override { return psi[0]; }
  MatrixKernel potential_kernel(const Eigen::Vector3d& x) const override;
};

using ProgressCallback = std::function<void(int done, int total)>;

/// Galerkin boundary elements on a triangulated surface.
class BemBackend final : public Backend {
 public:
  BemBackend(SurfaceMesh mesh, int degree, int quad_order);

  std::string name() const override { return "bem3d"; }
  Eigen::Index dim_x() const override { return spaces_->dim_x(); }
  Eigen::Index dim_y() const override { return spaces_->dim_y(); }
  std::unique_ptr<ConvolutionSystem> discretize(const MultistepScheme& scheme, const TimeGrid& grid,
                                                Problem problem) const override;
  void check_wave(const IncidentWave& wave) const override;
  Eigen::VectorXd neumann_load(const IncidentWave& wave, double t) const override;
  Eigen::VectorXd velocity_trace(const IncidentWave& wave, double t) const override;
  std::vector<Eigen::Vector3d> sample_points() const override { return projector_->points(); }
  void nonlinearity(const Impedance& imp, const Eigen::VectorXd& mu, Eigen::VectorXd& value,
                    Eigen::MatrixXd& jacobian) const override;
  double norm_x(const Eigen::VectorXd& phi) const override;
  double norm_y(const Eigen::VectorXd& psi) const override;
  double mean_x(const Eigen::VectorXd& phi) const override;
  double mean_y(const Eigen::VectorXd& psi) const override;
  MatrixKernel potential_kernel(const Eigen::Vector3d& x) const override;

  const SurfaceMesh& mesh() const noexcept { return *mesh_; }
  const TraceSpaces& spaces() const noexcept { return *spaces_; }
  const GalerkinAssembler& assembler() const noexcept { return *assembler_; }
  void set_progress(ProgressCallback callback) { progress_ = std::move(callback); }

 private:
  std::unique_ptr<SurfaceMesh> mesh_;
  std::unique_ptr<TraceSpaces> spaces_;
  std::unique_ptr<GalerkinAssembler> assembler_;
  std::unique_ptr<SurfaceProjector> projector_;
  Eigen::SparseMatrix<double> mass_x_;
  Eigen::SparseMatrix<double> mass_y_;
  Eigen::MatrixXd duality_;
  ProgressCallback progress_;
};

}  // namespace nlcq
