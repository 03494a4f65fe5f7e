#pragma once

#include <array>
#include <complex>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace nlcq {

using Complex = std::complex<double>;

enum class Bdf { one, two };

/// Backward difference formula with generating function
/// delta(z) = sum_j alpha_j z^j, alpha_0 being the leading coefficient.
///
///   BDF1: delta(z) = 1 - z
///   BDF2: delta(z) = (1 - z) + (1 - z)^2 / 2 = 3/2 - 2z + z^2/2
class MultistepScheme {
 public:
  static MultistepScheme bdf1();
  static MultistepScheme bdf2();
  /// Accepts "bdf1" / "bdf2" (case-insensitive); throws ConfigError otherwise.
  static MultistepScheme from_name(std::string_view name);

  Bdf kind() const noexcept { return kind_; }
  int steps() const noexcept { return kind_ == Bdf::one ? 1 : 2; }
  int order() const noexcept { return steps(); }
  std::span<const double> coefficients() const noexcept {
    return {alpha_.data(), static_cast<std::size_t>(steps() + 1)};
  }
  Complex delta(Complex z) const noexcept;
  std::string name() const;

  friend bool operator==(const MultistepScheme& a, const MultistepScheme& b) {
    return a.kind_ == b.kind_;
  }

 private:
  explicit MultistepScheme(Bdf kind);
  Bdf kind_;
  std::array<double, 3> alpha_{};
};

/// delta(z) of the scheme.
Complex bdf_delta(const MultistepScheme& scheme, Complex z);

/// Uniform grid t_n = n dt, n = 0..N, with N dt = T.
class TimeGrid {
 public:
  TimeGrid(double final_time, int steps);

  double step() const noexcept { return final_time_ / steps_; }
  int steps() const noexcept { return steps_; }
  double final_time() const noexcept { return final_time_; }
  double time(int n) const noexcept { return n * step(); }

 private:
  double final_time_;
  int steps_;
};

/// Trapezoidal rule on the circle |z| = radius used to extract power-series
/// coefficients of K(delta(z)/dt).
///
/// Default parameters: L = 2(N+1) rounded up to a power of two and
/// radius^(L+N) = eps, which balances the aliasing error radius^L against the
/// amplification radius^-N of round-off in the highest retained weight.
class Contour {
 public:
  Contour(const MultistepScheme& scheme, const TimeGrid& grid);
  Contour(const MultistepScheme& scheme, const TimeGrid& grid, int points, double radius);
  /// L = 2(N+1) without rounding, for kernels whose samples are expensive and
  /// which are not transformed with an FFT.
  static Contour minimal(const MultistepScheme& scheme, const TimeGrid& grid);

  int points() const noexcept { return points_; }
  double radius() const noexcept { return radius_; }
  /// Highest weight index N that is extracted.
  int highest_index() const noexcept { return highest_; }
  Complex node(int l) const;
  /// s_l = delta(radius e^{2 pi i l / L}) / dt.
  Complex frequency(int l) const;

  const MultistepScheme& scheme() const noexcept { return scheme_; }
  double step() const noexcept { return dt_; }

 private:
  MultistepScheme scheme_;
  double dt_;
  int highest_;
  int points_;
  double radius_;
};

/// Convolution weights W_0..W_N of an operator-valued kernel K(s).
struct WeightTable {
  std::vector<Eigen::MatrixXcd> weights;
  std::string kernel;
  double radius = 0.0;
  int contour_points = 0;

  int size() const noexcept { return static_cast<int>(weights.size()); }
  Eigen::Index rows() const { return weights.empty() ? 0 : weights.front().rows(); }
  Eigen::Index cols() const { return weights.empty() ? 0 : weights.front().cols(); }
  const Eigen::MatrixXcd& operator[](int n) const { return weights[static_cast<std::size_t>(n)]; }
};

using MatrixKernel = std::function<Eigen::MatrixXcd(Complex)>;
using ScalarKernel = std::function<Complex(Complex)>;

/// W_n = radius^-n / L * sum_l K(s_l) e^{-2 pi i n l / L}, evaluated with an FFT
/// over l for every matrix entry. Kernel failures are rethrown as
/// KernelEvaluationError carrying the offending frequency.
WeightTable cq_weights(const MatrixKernel& kernel, const MultistepScheme& scheme,
                       const TimeGrid& grid, std::string label = {});
WeightTable cq_weights(const MatrixKernel& kernel, const Contour& contour, std::string label = {});

/// Scalar kernels; returns the (complex) weights w_0..w_N.
std::vector<Complex> cq_scalar_weights(const ScalarKernel& kernel, const Contour& contour);

/// Real weights of a real-symmetric kernel, K(conj s) = conj K(s), for which
/// only the half contour l = 0..L/2 has to be sampled.
///
/// Sampled values are pushed in batches (one flattened kernel value per
/// column); the weights accumulate as the columns of `table` (entries x N+1):
///   table(:, n) += sum_l Re(c_{n,l} K(s_l)).
class RealWeightAccumulator {
 public:
  explicit RealWeightAccumulator(const Contour& contour);

  int frequency_count() const noexcept { return contour_.points() / 2 + 1; }
  Complex frequency(int l) const { return contour_.frequency(l); }
  int weight_count() const noexcept { return contour_.highest_index() + 1; }

  /// `values.col(b)` holds K(s_{first + b}) flattened.
  void accumulate(int first, const Eigen::MatrixXcd& values, Eigen::MatrixXd& table) const;

 private:
  Contour contour_;
};

/// sum_{j=0}^{n} W_j u^{n-j}.
Eigen::VectorXcd apply_convolution(const WeightTable& weights,
                                   std::span<const Eigen::VectorXcd> history, int n);
/// Real-valued variant using Re W_j.
Eigen::VectorXd apply_convolution(const WeightTable& weights,
                                  std::span<const Eigen::VectorXd> history, int n);

/// Weights of s^-1, the discrete integration operator (d/dt)^-1.
std::vector<double> antiderivative_weights(const MultistepScheme& scheme, const TimeGrid& grid);

/// [(d^dt)^-1 seq]^n for n = 0..seq.size()-1 (at most grid.steps()+1 entries).
std::vector<double> discrete_antiderivative(std::span<const double> seq,
                                            const MultistepScheme& scheme,
                                            const TimeGrid& grid);

/// Columns are time steps; integrates every row.
Eigen::MatrixXd discrete_antiderivative(const Eigen::MatrixXd& steps,
                                        const MultistepScheme& scheme, const TimeGrid& grid);

}  // namespace nlcq
