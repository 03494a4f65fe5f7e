#include "nlcq/backends.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nlcq/errors.hpp"
#include "nlcq/modal_sphere.hpp"

namespace nlcq {

Problem problem_from_name(const std::string& name) {
  if (name == "exterior") return Problem::exterior;
  if (name == "interior") return Problem::interior;
  throw ConfigError("unknown problem '" + name + "' (expected exterior or interior)");
}

std::string problem_name(Problem problem) { return problem == Problem::exterior ? "exterior" : "interior"; }

MatrixConvolution::MatrixConvolution(std::vector<Eigen::MatrixXd> weights, Eigen::Index dim_x, Eigen::Index dim_y)
    : weights_(std::move(weights)), dim_x_(dim_x), dim_y_(dim_y) {
  if (weights_.empty()) throw DimensionMismatch("empty weight table");
  for (const auto& w : weights_) {
    if (w.rows() != dim_x + dim_y || w.cols() != dim_x + dim_y) throw DimensionMismatch("weight has the wrong shape");
  }
  if (dim_x == 1 && dim_y == 1) {
    scalar_.reserve(weights_.size());
    for (const auto& w : weights_) scalar_.push_back({w(0, 0), w(0, 1), w(1, 0), w(1, 1)});
  }
}

void ConvolutionSystem::accumulate_history(int n, std::span<const TracePair> history, Eigen::VectorXd& out_x,
                                           Eigen::VectorXd& out_y) const {
  for (int j = 0; j < n; ++j) apply_add(n - j, history[static_cast<std::size_t>(j)], out_x, out_y);
}

void MatrixConvolution::accumulate_history(int n, std::span<const TracePair> history, Eigen::VectorXd& out_x,
                                           Eigen::VectorXd& out_y) const {
  if (scalar_.empty()) {
    ConvolutionSystem::accumulate_history(n, history, out_x, out_y);
    return;
  }
  double fx = 0.0;
  double fy = 0.0;
  for (int j = 0; j < n; ++j) {
    const auto& w = scalar_[static_cast<std::size_t>(n - j)];
    const double phi = history[static_cast<std::size_t>(j)].phi[0];
    const double psi = history[static_cast<std::size_t>(j)].psi[0];
    fx += w[0] * phi + w[1] * psi;
    fy += w[2] * phi + w[3] * psi;
  }
  out_x[0] += fx;
  out_y[0] += fy;
}

void MatrixConvolution::apply_add(int n, const TracePair& xi, Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const {
  const auto& w = weights_.at(static_cast<std::size_t>(n));
  out_x.noalias() += w.topLeftCorner(dim_x_, dim_x_) * xi.phi + w.topRightCorner(dim_x_, dim_y_) * xi.psi;
  out_y.noalias() += w.bottomLeftCorner(dim_y_, dim_x_) * xi.phi + w.bottomRightCorner(dim_y_, dim_y_) * xi.psi;
}

BlockConvolution::BlockConvolution(Eigen::MatrixXd table, Eigen::MatrixXd duality, bool interior)
    : table_(std::move(table)), duality_(std::move(duality)), sign_(interior ? -1.0 : 1.0) {
  if (table_.rows() != entries(duality_.rows(), duality_.cols())) {
    throw DimensionMismatch("weight table does not match the trace spaces");
  }
}

Eigen::MatrixXd BlockConvolution::leading() const {
  const Eigen::Index nx = dim_x();
  const Eigen::Index ny = dim_y();
  const double* w = table_.col(0).data();
  Eigen::Map<const Eigen::MatrixXd> sv(w, nx, nx);
  Eigen::Map<const Eigen::MatrixXd> k(w + nx * nx, nx, ny);
  Eigen::Map<const Eigen::MatrixXd> ws(w + nx * nx + nx * ny, ny, ny);
  Eigen::MatrixXd b(nx + ny, nx + ny);
  b.topLeftCorner(nx, nx) = sv;
  b.topRightCorner(nx, ny) = sign_ * k - 0.5 * duality_;
  b.bottomLeftCorner(ny, nx) = -sign_ * k.transpose() + 0.5 * duality_.transpose();
  b.bottomRightCorner(ny, ny) = ws;
  return b;
}

void BlockConvolution::apply_add(int n, const TracePair& xi, Eigen::VectorXd& out_x, Eigen::VectorXd& out_y) const {
  const Eigen::Index nx = dim_x();
  const Eigen::Index ny = dim_y();
  const double* w = table_.col(n).data();
  Eigen::Map<const Eigen::MatrixXd> sv(w, nx, nx);
  Eigen::Map<const Eigen::MatrixXd> k(w + nx * nx, nx, ny);
  Eigen::Map<const Eigen::MatrixXd> ws(w + nx * nx + nx * ny, ny, ny);
  out_x.noalias() += sv * xi.phi;
  out_x.noalias() += sign_ * (k * xi.psi);
  out_y.noalias() -= sign_ * (k.transpose() * xi.phi);
  out_y.noalias() += ws * xi.psi;
  if (n == 0) {
    out_x.noalias() -= 0.5 * (duality_ * xi.psi);
    out_y.noalias() += 0.5 * (duality_.transpose() * xi.phi);
  }
}

// ---------------------------------------------------------------- modal

std::unique_ptr<ConvolutionSystem> ModalBackend::discretize(const MultistepScheme& scheme, const TimeGrid& grid,
                                                            Problem problem) const {
  const MatrixKernel kernel = [problem](Complex s) -> Eigen::MatrixXcd {
    return problem == Problem::exterior ? modal_B_imp(s) : modal_B_interior(s);
  };
  const WeightTable table = cq_weights(kernel, scheme, grid, problem == Problem::exterior ? "B_imp" : "B_int");
  std::vector<Eigen::MatrixXd> weights;
  weights.reserve(table.weights.size());
  for (const auto& w : table.weights) weights.emplace_back(w.real());
  return std::make_unique<MatrixConvolution>(std::move(weights), 1, 1);
}

void ModalBackend::check_wave(const IncidentWave& wave) const {
  if (!wave.is_spatially_constant()) {
    throw ConfigError("the modal backend needs a spatially constant incident wave, got " + wave.kind_name());
  }
}

Eigen::VectorXd ModalBackend::neumann_load(const IncidentWave&, double) const { return Eigen::VectorXd::Zero(1); }

Eigen::VectorXd ModalBackend::velocity_trace(const IncidentWave& wave, double t) const {
  return Eigen::VectorXd::Constant(1, wave.rate(t));
}

std::vector<Eigen::Vector3d> ModalBackend::sample_points() const { return {Eigen::Vector3d(1.0, 0.0, 0.0)}; }

void ModalBackend::nonlinearity(const Impedance& imp, const Eigen::VectorXd& mu, Eigen::VectorXd& value,
                                Eigen::MatrixXd& jacobian) const {
  value = Eigen::VectorXd::Constant(1, imp.value(mu[0]));
  jacobian = Eigen::MatrixXd::Constant(1, 1, imp.derivative(mu[0]));
}

double ModalBackend::norm_x(const Eigen::VectorXd& phi) const { return std::abs(phi[0]); }
double ModalBackend::norm_y(const Eigen::VectorXd& psi) const { return std::abs(psi[0]); }

MatrixKernel ModalBackend::potential_kernel(const Eigen::Vector3d& x) const {
  const double radius = x.norm();
  if (!(radius > 1.0)) throw ConfigError("field points must lie outside the unit sphere");
  return [radius](Complex s) -> Eigen::MatrixXcd {
    const auto [single, dbl] = modal_potentials(radius, s);
    Eigen::MatrixXcd row(1, 2);
    row << single, dbl / s;
    return row;
  };
}

// ---------------------------------------------------------------- bem3d

BemBackend::BemBackend(SurfaceMesh mesh, int degree, int quad_order)
    : mesh_(std::make_unique<SurfaceMesh>(std::move(mesh))),
      spaces_(std::make_unique<TraceSpaces>(*mesh_, degree)),
      assembler_(std::make_unique<GalerkinAssembler>(*spaces_, quad_order)),
      projector_(std::make_unique<SurfaceProjector>(*spaces_)),
      mass_x_(mass_matrix_x(*spaces_)),
      mass_y_(mass_matrix_y(*spaces_)),
      duality_(duality_matrix(*spaces_)) {}

std::unique_ptr<ConvolutionSystem> BemBackend::discretize(const MultistepScheme& scheme, const TimeGrid& grid,
                                                          Problem problem) const {
  const Contour contour = Contour::minimal(scheme, grid);
  const RealWeightAccumulator accumulator(contour);
  const Eigen::Index nx = dim_x();
  const Eigen::Index ny = dim_y();
  const Eigen::Index entries = BlockConvolution::entries(nx, ny);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(entries, accumulator.weight_count());

  const int total = accumulator.frequency_count();
  constexpr int kBatch = 8;
  Eigen::MatrixXcd values(entries, kBatch);
  for (int first = 0; first < total; first += kBatch) {
    const int batch = std::min(kBatch, total - first);
    if (values.cols() != batch) values.resize(entries, batch);
    std::vector<Complex> freqs(static_cast<std::size_t>(batch));
    for (int b = 0; b < batch; ++b) freqs[static_cast<std::size_t>(b)] = accumulator.frequency(first + b);
    std::vector<OperatorSet> sets;
    try {
      sets = assembler_->assemble_batch(freqs);
    } catch (const FrequencyDomainError& e) {
      throw KernelEvaluationError(e.frequency(), e.what());
    } catch (const std::exception& e) {
      throw KernelEvaluationError(freqs.front(), e.what());
    }
    for (int b = 0; b < batch; ++b) {
      const auto& ops = sets[static_cast<std::size_t>(b)];
      const Complex s = ops.s;
      Complex* col = values.col(b).data();
      Eigen::Map<Eigen::MatrixXcd>(col, nx, nx) = s * ops.V;
      Eigen::Map<Eigen::MatrixXcd>(col + nx * nx, nx, ny) = ops.K;
      Eigen::Map<Eigen::MatrixXcd>(col + nx * nx + nx * ny, ny, ny) = ops.W / s;
    }
    if (progress_) progress_(first + batch, total);
    accumulator.accumulate(first, values, table);
  }
  return std::make_unique<BlockConvolution>(std::move(table), duality_, problem == Problem::interior);
}

void BemBackend::check_wave(const IncidentWave&) const {}

Eigen::VectorXd BemBackend::neumann_load(const IncidentWave& wave, double t) const {
  if (wave.is_spatially_constant()) return Eigen::VectorXd::Zero(dim_y());
  const auto& points = projector_->points();
  const auto& normals = projector_->normals();
  std::vector<double> samples(points.size());
  for (std::size_t p = 0; p < points.size(); ++p) samples[p] = wave.normal_derivative(points[p], normals[p], t);
  return projector_->load(samples);
}

Eigen::VectorXd BemBackend::velocity_trace(const IncidentWave& wave, double t) const {
  if (wave.is_spatially_constant()) return wave.rate(t) * spaces_->y_constant();
  return projector_->project([&](const Eigen::Vector3d& x) { return wave.rate(x, t); });
}

void BemBackend::nonlinearity(const Impedance& imp, const Eigen::VectorXd& mu, Eigen::VectorXd& value,
                              Eigen::MatrixXd& jacobian) const {
  const Eigen::VectorXd samples = projector_->y_values(mu);
  std::vector<double> g(static_cast<std::size_t>(samples.size()));
  std::vector<double> dg(static_cast<std::size_t>(samples.size()));
  for (Eigen::Index p = 0; p < samples.size(); ++p) {
    g[static_cast<std::size_t>(p)] = imp.value(samples[p]);
    dg[static_cast<std::size_t>(p)] = imp.derivative(samples[p]);
  }
  value = projector_->load(g);
  jacobian = Eigen::MatrixXd(projector_->weighted_mass(dg));
}

double BemBackend::norm_x(const Eigen::VectorXd& phi) const { return std::sqrt(std::max(0.0, phi.dot(mass_x_ * phi))); }
double BemBackend::norm_y(const Eigen::VectorXd& psi) const { return std::sqrt(std::max(0.0, psi.dot(mass_y_ * psi))); }

double BemBackend::mean_x(const Eigen::VectorXd& phi) const {
  return spaces_->x_constant().dot(mass_x_ * phi) / mesh_->surface_area();
}

double BemBackend::mean_y(const Eigen::VectorXd& psi) const {
  return spaces_->y_constant().dot(mass_y_ * psi) / mesh_->surface_area();
}

MatrixKernel BemBackend::potential_kernel(const Eigen::Vector3d& x) const {
  if (!(distance_to_surface(*mesh_, x) > mesh_->mesh_size())) {
    throw ConfigError("field point closer to the surface than the mesh size");
  }
  const GalerkinAssembler* assembler = assembler_.get();
  const Eigen::Index nx = dim_x();
  const Eigen::Index ny = dim_y();
  return [assembler, x, nx, ny](Complex s) -> Eigen::MatrixXcd {
    Eigen::MatrixXcd row(1, nx + ny);
    row.leftCols(nx) = assembler->single_layer_row(x, s);
    row.rightCols(ny) = assembler->double_layer_row(x, s) / s;
    return row;
  };
}

}  // namespace nlcq
