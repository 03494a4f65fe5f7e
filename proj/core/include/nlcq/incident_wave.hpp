#pragma once

#include <span>
#include <string>

#include <Eigen/Core>

namespace nlcq {

enum class WaveKind { spatially_constant, plane_wave, modulated_gaussian };

/// Incident field u_inc(x, t) and the derivatives entering the boundary
/// equations.
///
///   spatially_constant:  amp exp(-A (t - t0)^2)
///   plane_wave:          amp exp(-A (x.a - t - t0)^2)
///   modulated_gaussian:  amp cos(omega xi) exp(-((xi - t0) / sigma)^2), xi = t - d.x
///
/// A modulated Gaussian with d = 0 is spatially constant as well.
class IncidentWave {
 public:
  static IncidentWave spatially_constant(double amplitude, double width, double offset);
  static IncidentWave plane_wave(double amplitude, double width, double offset, const Eigen::Vector3d& direction);
  static IncidentWave modulated_gaussian(double amplitude, double omega, double sigma, double offset,
                                         const Eigen::Vector3d& direction);
  /// Identically zero field.
  static IncidentWave zero();

  WaveKind kind() const noexcept { return kind_; }
  double amplitude() const noexcept { return amplitude_; }
  double width() const noexcept { return width_; }
  double sigma() const noexcept { return sigma_; }
  double omega() const noexcept { return omega_; }
  double offset() const noexcept { return offset_; }
  const Eigen::Vector3d& direction() const noexcept { return direction_; }
  /// True when u_inc does not depend on x (its normal derivative vanishes).
  bool is_spatially_constant() const noexcept;
  std::string kind_name() const;

  double value(const Eigen::Vector3d& x, double t) const;
  /// du_inc/dt.
  double rate(const Eigen::Vector3d& x, double t) const;
  Eigen::Vector3d gradient(const Eigen::Vector3d& x, double t) const;
  double normal_derivative(const Eigen::Vector3d& x, const Eigen::Vector3d& n, double t) const;

  /// Spatially constant waves only; x is ignored.
  double value(double t) const { return value(Eigen::Vector3d::Zero(), t); }
  double rate(double t) const { return rate(Eigen::Vector3d::Zero(), t); }

 private:
  IncidentWave() = default;
  // profile F and F' of the travelling coordinate
  double profile(double xi) const;
  double profile_derivative(double xi) const;
  double coordinate(const Eigen::Vector3d& x, double t) const;

  WaveKind kind_ = WaveKind::spatially_constant;
  double amplitude_ = 0.0;
  double width_ = 1.0;
  double sigma_ = 1.0;
  double omega_ = 0.0;
  double offset_ = 0.0;
  Eigen::Vector3d direction_ = Eigen::Vector3d::Zero();
};

/// max |u_inc(x, 0)| over the points divided by |amplitude|; zero for the zero wave.
double causality_defect(const IncidentWave& wave, std::span<const Eigen::Vector3d> points);

/// causality_defect <= threshold (default 1e-8).
bool is_causal(const IncidentWave& wave, std::span<const Eigen::Vector3d> points, double threshold = 1e-8);

}  // namespace nlcq
