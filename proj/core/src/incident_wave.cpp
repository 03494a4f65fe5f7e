#include "nlcq/incident_wave.hpp"

#include <algorithm>
#include <cmath>

#include "nlcq/errors.hpp"

namespace nlcq {

IncidentWave IncidentWave::spatially_constant(double amplitude, double width, double offset) {
  if (!(width > 0.0)) throw ConfigError("wave width must be positive");
  IncidentWave w;
  w.kind_ = WaveKind::spatially_constant;
  w.amplitude_ = amplitude;
  w.width_ = width;
  w.offset_ = offset;
  return w;
}

IncidentWave IncidentWave::plane_wave(double amplitude, double width, double offset,
                                      const Eigen::Vector3d& direction) {
  if (!(width > 0.0)) throw ConfigError("wave width must be positive");
  if (direction.norm() == 0.0) throw ConfigError("plane wave direction must be nonzero");
  IncidentWave w;
  w.kind_ = WaveKind::plane_wave;
  w.amplitude_ = amplitude;
  w.width_ = width;
  w.offset_ = offset;
  w.direction_ = direction;
  return w;
}

IncidentWave IncidentWave::modulated_gaussian(double amplitude, double omega, double sigma, double offset,
                                              const Eigen::Vector3d& direction) {
  if (!(sigma > 0.0)) throw ConfigError("wave sigma must be positive");
  IncidentWave w;
  w.kind_ = WaveKind::modulated_gaussian;
  w.amplitude_ = amplitude;
  w.omega_ = omega;
  w.sigma_ = sigma;
  w.offset_ = offset;
  w.direction_ = direction;
  return w;
}

IncidentWave IncidentWave::zero() { return spatially_constant(0.0, 1.0, 0.0); }

bool IncidentWave::is_spatially_constant() const noexcept {
  return kind_ == WaveKind::spatially_constant || direction_.isZero(0.0) || amplitude_ == 0.0;
}

std::string IncidentWave::kind_name() const {
  switch (kind_) {
    case WaveKind::spatially_constant: return "spatially_constant";
    case WaveKind::plane_wave: return "plane_wave";
    case WaveKind::modulated_gaussian: return "modulated_gaussian";
  }
  return "unknown";
}

double IncidentWave::coordinate(const Eigen::Vector3d& x, double t) const {
  switch (kind_) {
    case WaveKind::spatially_constant: return t;
    case WaveKind::plane_wave: return t - direction_.dot(x);
    case WaveKind::modulated_gaussian: return t - direction_.dot(x);
  }
  return t;
}

// Every kind is F(xi) with xi = t - d.x (d = 0 for constant waves; the plane
// wave uses (x.a - t - t0)^2 = (xi + t0)^2).
double IncidentWave::profile(double xi) const {
  switch (kind_) {
    case WaveKind::spatially_constant: {
      const double z = xi - offset_;
      return amplitude_ * std::exp(-width_ * z * z);
    }
    case WaveKind::plane_wave: {
      const double z = xi + offset_;
      return amplitude_ * std::exp(-width_ * z * z);
    }
    case WaveKind::modulated_gaussian: {
      const double z = (xi - offset_) / sigma_;
      return amplitude_ * std::cos(omega_ * xi) * std::exp(-z * z);
    }
  }
  return 0.0;
}

double IncidentWave::profile_derivative(double xi) const {
  switch (kind_) {
    case WaveKind::spatially_constant: {
      const double z = xi - offset_;
      return -2.0 * width_ * z * amplitude_ * std::exp(-width_ * z * z);
    }
    case WaveKind::plane_wave: {
      const double z = xi + offset_;
      return -2.0 * width_ * z * amplitude_ * std::exp(-width_ * z * z);
    }
    case WaveKind::modulated_gaussian: {
      const double z = (xi - offset_) / sigma_;
      const double envelope = amplitude_ * std::exp(-z * z);
      return envelope * (-omega_ * std::sin(omega_ * xi) - 2.0 * z / sigma_ * std::cos(omega_ * xi));
    }
  }
  return 0.0;
}

double IncidentWave::value(const Eigen::Vector3d& x, double t) const { return profile(coordinate(x, t)); }

double IncidentWave::rate(const Eigen::Vector3d& x, double t) const {
  return profile_derivative(coordinate(x, t));
}

Eigen::Vector3d IncidentWave::gradient(const Eigen::Vector3d& x, double t) const {
  if (kind_ == WaveKind::spatially_constant) return Eigen::Vector3d::Zero();
  return -profile_derivative(coordinate(x, t)) * direction_;
}

double IncidentWave::normal_derivative(const Eigen::Vector3d& x, const Eigen::Vector3d& n, double t) const {
  return gradient(x, t).dot(n);
}

double causality_defect(const IncidentWave& wave, std::span<const Eigen::Vector3d> points) {
  if (wave.amplitude() == 0.0) return 0.0;
  double worst = 0.0;
  if (wave.is_spatially_constant()) {
    worst = std::abs(wave.value(0.0));
  } else {
    for (const auto& x : points) worst = std::max(worst, std::abs(wave.value(x, 0.0)));
  }
  return worst / std::abs(wave.amplitude());
}

bool is_causal(const IncidentWave& wave, std::span<const Eigen::Vector3d> points, double threshold) {
  return causality_defect(wave, points) <= threshold;
}

}  // namespace nlcq
