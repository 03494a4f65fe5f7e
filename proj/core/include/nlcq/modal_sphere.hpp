#pragma once

#include <complex>

#include <Eigen/Core>

namespace nlcq {

/// Eigenvalues of V, K, K^t and W on the constant mode of the unit sphere.
///
///   lambda_V  = (1 - e^{-2s}) / (2s)
///   lambda_K  = lambda_Kt = -(1 - (1 + s) e^{-2s}) / (2s)
///   lambda_W  = (1/4 - lambda_K^2) / lambda_V
///
/// obtained by integrating the kernels over the sphere in the chord length
/// r = 2 sin(theta/2), where dS = 2 pi r dr.
struct ModalEigenvalues {
  std::complex<double> v;
  std::complex<double> k;
  std::complex<double> kt;
  std::complex<double> w;
};

/// Throws FrequencyDomainError unless Re s > 0.
ModalEigenvalues modal_eigenvalues(std::complex<double> s);

/// B(s) = [[s lambda_V, lambda_K], [-lambda_Kt, lambda_W / s]].
Eigen::Matrix2cd modal_B(std::complex<double> s);

/// Exterior impedance system: B(s) + [[0, -1/2], [1/2, 0]].
Eigen::Matrix2cd modal_B_imp(std::complex<double> s);

/// Interior ("trapping sphere") system [[s lambda_V, -lambda_K - 1/2],
/// [1/2 + lambda_Kt, lambda_W / s]].
Eigen::Matrix2cd modal_B_interior(std::complex<double> s);

/// Single- and double-layer potentials of the constant density at distance
/// R > 1 from the centre: returns (S(s)1, D(s)1).
std::pair<std::complex<double>, std::complex<double>> modal_potentials(double radius,
                                                                      std::complex<double> s);

}  // namespace nlcq
