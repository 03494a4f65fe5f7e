#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace nlcq {

/// Invalid run configuration, mesh input or parameter set.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A kernel was evaluated where it is singular (coincident points).
class SingularEvaluation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A Laplace-domain quantity was requested outside Re s > 0.
class FrequencyDomainError : public std::domain_error {
 public:
  explicit FrequencyDomainError(std::complex<double> s);
  std::complex<double> frequency() const noexcept { return s_; }

 private:
  std::complex<double> s_;
};

/// Kernel evaluation failed at a contour point during weight generation.
class KernelEvaluationError : public std::runtime_error {
 public:
  KernelEvaluationError(std::complex<double> s, const std::string& what);
  std::complex<double> frequency() const noexcept { return s_; }

 private:
  std::complex<double> s_;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Newton iteration did not reach the increment tolerance within max_iters.
class NewtonFailure : public std::runtime_error {
 public:
  NewtonFailure(int step, int iterations, double increment);
  int step() const noexcept { return step_; }
  int iterations() const noexcept { return iterations_; }
  double increment() const noexcept { return increment_; }

 private:
  int step_;
  int iterations_;
  double increment_;
};

}  // namespace nlcq
