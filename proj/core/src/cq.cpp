#include "nlcq/cq.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "nlcq/errors.hpp"

namespace nlcq {

MultistepScheme::MultistepScheme(Bdf kind) : kind_(kind) {
  if (kind == Bdf::one) {
    alpha_ = {1.0, -1.0, 0.0};
  } else {
    alpha_ = {1.5, -2.0, 0.5};
  }
}

MultistepScheme MultistepScheme::bdf1() { return MultistepScheme(Bdf::one); }
MultistepScheme MultistepScheme::bdf2() { return MultistepScheme(Bdf::two); }

MultistepScheme MultistepScheme::from_name(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bdf1") return bdf1();
  if (lower == "bdf2") return bdf2();
  throw ConfigError("unknown multistep scheme '" + std::string(name) + "' (expected bdf1 or bdf2)");
}

Complex MultistepScheme::delta(Complex z) const noexcept {
  // Horner on alpha_0 + alpha_1 z + alpha_2 z^2
  Complex acc = 0.0;
  for (int j = steps(); j >= 0; --j) acc = acc * z + alpha_[static_cast<std::size_t>(j)];
  return acc;
}

std::string MultistepScheme::name() const { return kind_ == Bdf::one ? "bdf1" : "bdf2"; }

Complex bdf_delta(const MultistepScheme& scheme, Complex z) { return scheme.delta(z); }

TimeGrid::TimeGrid(double final_time, int steps) : final_time_(final_time), steps_(steps) {
  if (!(final_time > 0.0) || !std::isfinite(final_time)) {
    throw ConfigError("final time must be positive");
  }
  if (steps < 1) throw ConfigError("number of time steps must be at least 1");
}

namespace {

int default_points(int highest) {
  int points = 1;
  while (points < 2 * (highest + 1)) points *= 2;
  return points;
}

double default_radius(int points, int highest) {
  return std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (points + highest));
}

}  // namespace

Contour::Contour(const MultistepScheme& scheme, const TimeGrid& grid)
    : Contour(scheme, grid, default_points(grid.steps()),
              default_radius(default_points(grid.steps()), grid.steps())) {}

Contour::Contour(const MultistepScheme& scheme, const TimeGrid& grid, int points, double radius)
    : scheme_(scheme), dt_(grid.step()), highest_(grid.steps()), points_(points), radius_(radius) {
  if (points < highest_ + 1) throw ConfigError("contour needs at least N+1 points");
  if (points % 2 != 0) throw ConfigError("contour point count must be even");
  if (!(radius > 0.0 && radius < 1.0)) throw ConfigError("contour radius must lie in (0, 1)");
}

Contour Contour::minimal(const MultistepScheme& scheme, const TimeGrid& grid) {
  const int points = 2 * (grid.steps() + 1);
  return Contour(scheme, grid, points, default_radius(points, grid.steps()));
}

Complex Contour::node(int l) const {
  const double theta = 2.0 * std::numbers::pi * l / points_;
  return std::polar(radius_, theta);
}

Complex Contour::frequency(int l) const { return scheme_.delta(node(l)) / dt_; }

WeightTable cq_weights(const MatrixKernel& kernel, const MultistepScheme& scheme,
                       const TimeGrid& grid, std::string label) {
  return cq_weights(kernel, Contour(scheme, grid), std::move(label));
}

WeightTable cq_weights(const MatrixKernel& kernel, const Contour& contour, std::string label) {
  const int L = contour.points();
  const int N = contour.highest_index();

  std::vector<Eigen::MatrixXcd> samples(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    const Complex s = contour.frequency(l);
    try {
      samples[static_cast<std::size_t>(l)] = kernel(s);
    } catch (const KernelEvaluationError&) {
      throw;
    } catch (const std::exception& e) {
      throw KernelEvaluationError(s, e.what());
    }
    const auto& value = samples[static_cast<std::size_t>(l)];
    if (!value.allFinite()) throw KernelEvaluationError(s, "non-finite kernel value");
    if (value.rows() != samples.front().rows() || value.cols() != samples.front().cols()) {
      throw KernelEvaluationError(s, "kernel changed shape along the contour");
    }
  }

  const Eigen::Index rows = samples.front().rows();
  const Eigen::Index cols = samples.front().cols();

  WeightTable table;
  table.kernel = std::move(label);
  table.radius = contour.radius();
  table.contour_points = L;
  table.weights.assign(static_cast<std::size_t>(N + 1), Eigen::MatrixXcd::Zero(rows, cols));

  std::vector<double> scale(static_cast<std::size_t>(N + 1));
  for (int n = 0; n <= N; ++n) scale[static_cast<std::size_t>(n)] = std::pow(contour.radius(), -n) / L;

  Eigen::FFT<double> fft;
  std::vector<Complex> line(static_cast<std::size_t>(L));
  std::vector<Complex> spectrum;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (int l = 0; l < L; ++l) line[static_cast<std::size_t>(l)] = samples[static_cast<std::size_t>(l)](r, c);
      fft.fwd(spectrum, line);
      for (int n = 0; n <= N; ++n) {
        table.weights[static_cast<std::size_t>(n)](r, c) =
            spectrum[static_cast<std::size_t>(n)] * scale[static_cast<std::size_t>(n)];
      }
    }
  }
  return table;
}

std::vector<Complex> cq_scalar_weights(const ScalarKernel& kernel, const Contour& contour) {
  const auto table = cq_weights(
      [&](Complex s) {
        Eigen::MatrixXcd m(1, 1);
        m(0, 0) = kernel(s);
        return m;
      },
      contour);
  std::vector<Complex> out;
  out.reserve(table.weights.size());
  for (const auto& w : table.weights) out.push_back(w(0, 0));
  return out;
}

RealWeightAccumulator::RealWeightAccumulator(const Contour& contour) : contour_(contour) {}

void RealWeightAccumulator::accumulate(int first, const Eigen::MatrixXcd& values,
                                       Eigen::MatrixXd& table) const {
  const int L = contour_.points();
  const int half = L / 2;
  const int weights = weight_count();
  const auto batch = static_cast<int>(values.cols());
  if (first < 0 || first + batch > half + 1) throw DimensionMismatch("frequency batch out of range");
  if (table.cols() != weights || table.rows() != values.rows()) {
    throw DimensionMismatch("weight table has the wrong shape");
  }

  // c_{l,n} = m_l radius^-n e^{-2 pi i n l / L} / L, m_l = 1 at l = 0, L/2 and 2 otherwise.
  Eigen::MatrixXd coeff_re(batch, weights);
  Eigen::MatrixXd coeff_im(batch, weights);
  for (int b = 0; b < batch; ++b) {
    const int l = first + b;
    const double multiplicity = (l == 0 || l == half) ? 1.0 : 2.0;
    for (int n = 0; n < weights; ++n) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((static_cast<long long>(n) * l) % L) / L;
      const double magnitude = multiplicity * std::pow(contour_.radius(), -n) / L;
      coeff_re(b, n) = magnitude * std::cos(angle);
      coeff_im(b, n) = magnitude * std::sin(angle);
    }
  }
  table.noalias() += values.real() * coeff_re;
  table.noalias() -= values.imag() * coeff_im;
}

Eigen::VectorXcd apply_convolution(const WeightTable& weights,
                                   std::span<const Eigen::VectorXcd> history, int n) {
  if (n < 0 || n >= weights.size()) throw DimensionMismatch("convolution index outside the weight table");
  if (static_cast<int>(history.size()) <= n) throw DimensionMismatch("history shorter than the requested index");
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(weights.rows());
  for (int j = 0; j <= n; ++j) {
    const auto& u = history[static_cast<std::size_t>(n - j)];
    if (u.size() != weights.cols()) throw DimensionMismatch("history vector has the wrong length");
    out.noalias() += weights[j] * u;
  }
  return out;
}

Eigen::VectorXd apply_convolution(const WeightTable& weights,
                                  std::span<const Eigen::VectorXd> history, int n) {
  if (n < 0 || n >= weights.size()) throw DimensionMismatch("convolution index outside the weight table");
  if (static_cast<int>(history.size()) <= n) throw DimensionMismatch("history shorter than the requested index");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(weights.rows());
  for (int j = 0; j <= n; ++j) {
    const auto& u = history[static_cast<std::size_t>(n - j)];
    if (u.size() != weights.cols()) throw DimensionMismatch("history vector has the wrong length");
    out.noalias() += weights[j].real() * u;
  }
  return out;
}

std::vector<double> antiderivative_weights(const MultistepScheme& scheme, const TimeGrid& grid) {
  const auto w = cq_scalar_weights([](Complex s) { return 1.0 / s; }, Contour(scheme, grid));
  std::vector<double> out(w.size());
  std::transform(w.begin(), w.end(), out.begin(), [](Complex c) { return c.real(); });
  return out;
}

std::vector<double> discrete_antiderivative(std::span<const double> seq,
                                            const MultistepScheme& scheme,
                                            const TimeGrid& grid) {
  if (static_cast<int>(seq.size()) > grid.steps() + 1) {
    throw DimensionMismatch("sequence longer than the time grid");
  }
  const auto w = antiderivative_weights(scheme, grid);
  std::vector<double> out(seq.size(), 0.0);
  for (std::size_t n = 0; n < seq.size(); ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) acc += w[j] * seq[n - j];
    out[n] = acc;
  }
  return out;
}

Eigen::MatrixXd discrete_antiderivative(const Eigen::MatrixXd& steps,
                                        const MultistepScheme& scheme, const TimeGrid& grid) {
  if (steps.cols() > grid.steps() + 1) throw DimensionMismatch("sequence longer than the time grid");
  const auto w = antiderivative_weights(scheme, grid);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(steps.rows(), steps.cols());
  for (Eigen::Index n = 0; n < steps.cols(); ++n) {
    for (Eigen::Index j = 0; j <= n; ++j) {
      out.col(n).noalias() += w[static_cast<std::size_t>(j)] * steps.col(n - j);
    }
  }
  return out;
}

}  // namespace nlcq
