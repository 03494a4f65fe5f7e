#pragma once

#include <complex>

#include <Eigen/Core>

namespace nlcq {

/// Fundamental solution of Delta - s^2 in three dimensions,
/// Phi(z; s) = exp(-s|z|) / (4 pi |z|). Throws SingularEvaluation at z = 0.
std::complex<double> phi(const Eigen::Vector3d& z, std::complex<double> s);

/// Radial form of phi for a known distance r > 0.
std::complex<double> phi_radial(double r, std::complex<double> s);

/// d/dn(y) Phi(x - y; s) = exp(-s r)(1 + s r) / (4 pi r^2) * n_y.(x - y) / r,
/// r = |x - y|. Throws SingularEvaluation at x = y.
std::complex<double> phi_normal_derivative(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                                           const Eigen::Vector3d& n_y, std::complex<double> s);

}  // namespace nlcq
