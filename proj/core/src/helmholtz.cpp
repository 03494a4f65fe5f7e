#include "nlcq/helmholtz.hpp"

#include <numbers>

#include "nlcq/errors.hpp"

namespace nlcq {

namespace {
constexpr double kFourPi = 4.0 * std::numbers::pi;
}

std::complex<double> phi_radial(double r, std::complex<double> s) {
  if (!(r > 0.0)) throw SingularEvaluation("fundamental solution evaluated at zero distance");
  return std::exp(-s * r) / (kFourPi * r);
}

std::complex<double> phi(const Eigen::Vector3d& z, std::complex<double> s) {
  return phi_radial(z.norm(), s);
}

std::complex<double> phi_normal_derivative(const Eigen::Vector3d& x, const Eigen::Vector3d& y,
                                           const Eigen::Vector3d& n_y, std::complex<double> s) {
  const Eigen::Vector3d d = x - y;
  const double r = d.norm();
  if (!(r > 0.0)) throw SingularEvaluation("normal derivative evaluated at coincident points");
  return std::exp(-s * r) * (1.0 + s * r) / (kFourPi * r * r * r) * n_y.dot(d);
}

}  // namespace nlcq
