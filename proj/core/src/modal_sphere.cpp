#include "nlcq/modal_sphere.hpp"

#include "nlcq/errors.hpp"

namespace nlcq {

namespace {

using C = std::complex<double>;

// Below this modulus the closed forms lose digits to cancellation and the
// Taylor expansions are used instead.
constexpr double kSeriesRadius = 0.25;
constexpr int kSeriesTerms = 30;

// (1 - e^{-2s}) / (2s)
C single_layer_eigenvalue(C s) {
  if (std::abs(s) >= kSeriesRadius) return (1.0 - std::exp(-2.0 * s)) / (2.0 * s);
  // sum_{k>=1} -(-2s)^k / k! / (2s) = sum_{k>=1} (-2s)^{k-1} / k!
  C term = 1.0;  // (-2s)^0 / 1!
  C acc = term;
  for (int k = 2; k <= kSeriesTerms; ++k) {
    term *= -2.0 * s / static_cast<double>(k);
    acc += term;
  }
  return acc;
}

// 1/2 + lambda_K = (s - 1 + (1 + s) e^{-2s}) / (2s)
C half_plus_double_layer(C s) {
  if (std::abs(s) >= kSeriesRadius) return (s - 1.0 + (1.0 + s) * std::exp(-2.0 * s)) / (2.0 * s);
  // numerator = sum_{k>=3} (-2)^{k-1} (k-2) / k! s^k
  C acc = 0.0;
  C power = s * s;  // s^{k-1} for k = 3
  double factorial = 2.0;
  double sign_pow = 4.0;  // (-2)^{k-1} for k = 3
  for (int k = 3; k <= kSeriesTerms; ++k) {
    factorial *= k;
    acc += sign_pow * (k - 2) / factorial * power;
    power *= s;
    sign_pow *= -2.0;
  }
  return acc / 2.0;
}

void require_right_half_plane(C s) {
  if (!(s.real() > 0.0)) throw FrequencyDomainError(s);
}

}  // namespace

ModalEigenvalues modal_eigenvalues(std::complex<double> s) {
  require_right_half_plane(s);
  ModalEigenvalues ev;
  ev.v = single_layer_eigenvalue(s);
  const C half_plus_k = half_plus_double_layer(s);
  ev.k = half_plus_k - 0.5;
  ev.kt = ev.k;
  // 1/4 - k^2 = (1/2 - k)(1/2 + k)
  ev.w = (0.5 - ev.k) * half_plus_k / ev.v;
  return ev;
}

Eigen::Matrix2cd modal_B(std::complex<double> s) {
  const auto ev = modal_eigenvalues(s);
  Eigen::Matrix2cd b;
  b << s * ev.v, ev.k, -ev.kt, ev.w / s;
  return b;
}

Eigen::Matrix2cd modal_B_imp(std::complex<double> s) {
  Eigen::Matrix2cd b = modal_B(s);
  b(0, 1) -= 0.5;
  b(1, 0) += 0.5;
  return b;
}

Eigen::Matrix2cd modal_B_interior(std::complex<double> s) {
  const auto ev = modal_eigenvalues(s);
  Eigen::Matrix2cd b;
  b << s * ev.v, -ev.k - 0.5, 0.5 + ev.kt, ev.w / s;
  return b;
}

std::pair<std::complex<double>, std::complex<double>> modal_potentials(double radius,
                                                                      std::complex<double> s) {
  require_right_half_plane(s);
  if (!(radius > 1.0)) throw SingularEvaluation("modal potentials need a point outside the unit sphere");
  const double near = radius - 1.0;
  const double far = radius + 1.0;
  const C e_near = std::exp(-s * near);
  const C e_far = std::exp(-s * far);
  const C single = (e_near - e_far) / (2.0 * s * radius);
  // D1 = 1/(4R) [ -(R^2 - 1) e^{-sr}/r + (2/s) e^{-sr} + r e^{-sr} ]_{R-1}^{R+1}
  const double r2m1 = radius * radius - 1.0;
  auto antiderivative = [&](double r, C e) { return -r2m1 * e / r + 2.0 * e / s + r * e; };
  const C dbl = (antiderivative(far, e_far) - antiderivative(near, e_near)) / (4.0 * radius);
  return {single, dbl};
}

}  // namespace nlcq
