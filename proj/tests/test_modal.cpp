#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlcq/errors.hpp"
#include "nlcq/helmholtz.hpp"
#include "nlcq/modal_sphere.hpp"
#include "oracles.hpp"

using Complex = std::complex<double>;
constexpr double kPi = std::numbers::pi;

TEST_CASE("fundamental solution values") {
  const Eigen::Vector3d e1(1.0, 0.0, 0.0);
  CHECK(std::abs(nlcq::phi(e1, 1.0) - std::exp(-1.0) / (4.0 * kPi)) < 1e-15);
  CHECK(std::abs(nlcq::phi(e1, 1.0) - 0.029275) < 1e-5);
  CHECK(std::abs(nlcq::phi(2.0 * e1, 1.0) - std::exp(-2.0) / (8.0 * kPi)) < 1e-15);
  const Complex s(0.7, 2.3);
  const Eigen::Vector3d z(0.3, -0.4, 1.2);
  CHECK(std::abs(nlcq::phi(z, std::conj(s)) - std::conj(nlcq::phi(z, s))) < 1e-16);
  CHECK_THROWS_AS(nlcq::phi(Eigen::Vector3d::Zero(), s), nlcq::SingularEvaluation);
  CHECK_THROWS_AS(nlcq::phi_normal_derivative(z, z, e1, s), nlcq::SingularEvaluation);
}

TEST_CASE("normal derivative") {
  const Complex s(1.3, -0.8);
  const Eigen::Vector3d x(0.2, 0.1, 1.0);
  const Eigen::Vector3d y(0.2, 0.1, 0.0);
  CHECK(std::abs(nlcq::phi_normal_derivative(x, y, Eigen::Vector3d(1.0, 0.0, 0.0), s)) == 0.0);

  // both points on the unit sphere, n_y = y
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  for (int i = 0; i < 20; ++i) {
    const Eigen::Vector3d a = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
    const Eigen::Vector3d b = Eigen::Vector3d(normal(rng), normal(rng), normal(rng)).normalized();
    const double r = (a - b).norm();
    const Complex expected = -std::exp(-r) * (r + 1.0) / (8.0 * kPi * r);
    CHECK(std::abs(nlcq::phi_normal_derivative(a, b, b, 1.0) - expected) < 1e-14);
  }

  // finite difference along n_y at r = 1
  const Eigen::Vector3d n = Eigen::Vector3d(1.0, 2.0, -0.5).normalized();
  const Eigen::Vector3d xs(0.0, 0.0, 0.0);
  const Eigen::Vector3d ys = Eigen::Vector3d(0.6, 0.0, 0.8);
  const double h = 1e-4;
  for (const Complex sv : {Complex(1.0, 0.0), Complex(2.0, 3.0)}) {
    const Complex fd = (nlcq::phi(xs - (ys + h * n), sv) - nlcq::phi(xs - (ys - h * n), sv)) / (2.0 * h);
    CHECK(std::abs(nlcq::phi_normal_derivative(xs, ys, n, sv) - fd) < 1e-6);
  }
}

TEST_CASE("Helmholtz residual decays like h^2") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> re(0.1, 3.0);
  double prev = 0.0;
  for (const double h : {1e-2, 5e-3, 2.5e-3}) {
    double worst = 0.0;
    std::mt19937_64 local = rng;
    for (int i = 0; i < 100; ++i) {
      const Eigen::Vector3d x = Eigen::Vector3d(u(local), u(local), u(local)).normalized() * (0.5 + 0.5 * std::abs(u(local)));
      const Complex s(re(local), 2.0 * u(local));
      Complex lap = -6.0 * nlcq::phi(x, s);
      for (int d = 0; d < 3; ++d) {
        Eigen::Vector3d e = Eigen::Vector3d::Zero();
        e[d] = h;
        lap += nlcq::phi(x + e, s) + nlcq::phi(x - e, s);
      }
      lap /= h * h;
      worst = std::max(worst, std::abs(lap - s * s * nlcq::phi(x, s)));
    }
    if (prev > 0.0) CHECK(prev / worst == doctest::Approx(4.0).epsilon(0.05));
    prev = worst;
  }
}

TEST_CASE("decay bound for real frequencies") {
  for (const double s : {0.01, 0.5, 4.0}) {
    for (const double r : {0.1, 1.0, 7.0}) {
      CHECK(std::abs(nlcq::phi_radial(r, s)) <= 1.0 / (4.0 * kPi * r));
    }
  }
}

TEST_CASE("modal eigenvalues against surface quadrature") {
  for (const Complex s : {Complex(1.0, 0.0), Complex(0.5, 2.0), Complex(3.0, -1.0)}) {
    const auto ev = nlcq::modal_eigenvalues(s);
    CHECK(std::abs(ev.v - oracle::sphere_single_layer(s)) < 1e-8);
    CHECK(std::abs(ev.k - oracle::sphere_double_layer(s)) < 1e-8);
    CHECK(ev.kt == ev.k);
  }
  CHECK(std::abs(nlcq::modal_eigenvalues(1.0).v - 0.432332) < 1e-6);
  CHECK(std::abs(nlcq::modal_eigenvalues(1.0).v - (1.0 - std::exp(-2.0)) / 2.0) < 1e-15);
}

TEST_CASE("Laplace limits") {
  const auto ev = nlcq::modal_eigenvalues(1e-4);
  CHECK(std::abs(ev.v - 1.0) < 1e-3);
  CHECK(std::abs(ev.k + 0.5) < 1e-3);
  CHECK(std::abs(ev.w) < 1e-3);
  CHECK(std::abs(oracle::sphere_single_layer(1e-4) - 1.0) < 1e-3);
  CHECK(std::abs(oracle::sphere_double_layer(1e-4) + 0.5) < 1e-3);
}

TEST_CASE("Calderon identity at random frequencies") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> re(0.1, 10.0);
  std::uniform_real_distribution<double> im(-10.0, 10.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto ev = nlcq::modal_eigenvalues({re(rng), im(rng)});
    worst = std::max(worst, std::abs(ev.v * ev.w + ev.k * ev.k - 0.25));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("Calderon systems annihilate radiating and interior Cauchy data") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> re(0.2, 6.0);
  std::uniform_real_distribution<double> im(-6.0, 6.0);
  for (int i = 0; i < 50; ++i) {
    const Complex s(re(rng), im(rng));
    const auto ev = nlcq::modal_eigenvalues(s);
    // u = exp(-s r)/r scaled to unit trace: normal derivative -(s + 1)
    const Complex dtn_ext = -(s + 1.0);
    CHECK(std::abs(ev.v * dtn_ext - (ev.k - 0.5)) < 1e-12);
    CHECK(std::abs(ev.w + (ev.kt + 0.5) * dtn_ext) < 1e-12);
    // u = sinh(s r)/r: normal derivative s coth(s) - 1
    const Complex dtn_int = s / std::tanh(s) - 1.0;
    CHECK(std::abs(ev.v * dtn_int - (ev.k + 0.5)) < 1e-12);
    CHECK(std::abs(ev.w - (0.5 - ev.kt) * dtn_int) < 1e-12);
  }
}

TEST_CASE("impedance system structure") {
  const Complex s(1.0, 0.0);
  const auto ev = nlcq::modal_eigenvalues(s);
  const Eigen::Matrix2cd b = nlcq::modal_B(s);
  const Eigen::Matrix2cd bi = nlcq::modal_B_imp(s);
  const Eigen::Matrix2cd bint = nlcq::modal_B_interior(s);
  CHECK(std::abs(bi(0, 0) - ev.v) < 1e-15);
  const Eigen::Matrix2cd skew = bi - b;
  CHECK(std::abs(skew(0, 0)) == 0.0);
  CHECK(std::abs(skew(1, 1)) == 0.0);
  CHECK(std::abs(skew(0, 1) + 0.5) < 1e-15);
  CHECK(std::abs(skew(1, 0) - 0.5) < 1e-15);
  CHECK(std::abs(bint(0, 0) - bi(0, 0)) == 0.0);
  CHECK(std::abs(bint(1, 1) - bi(1, 1)) == 0.0);
  CHECK(std::abs(bint(0, 1) - (-ev.k - 0.5)) < 1e-15);
  CHECK(std::abs(bint(1, 0) - (0.5 + ev.kt)) < 1e-15);

  const Eigen::Vector2cd xi(1.0, 1.0);
  CHECK((xi.adjoint() * nlcq::modal_B_imp({2.0, 3.0}) * xi)(0, 0).real() > 0.0);
  CHECK_THROWS_AS(nlcq::modal_eigenvalues({0.0, 1.0}), nlcq::FrequencyDomainError);
  CHECK_THROWS_AS(nlcq::modal_B_imp({-1.0, 0.0}), nlcq::FrequencyDomainError);
}

TEST_CASE("coercivity of the exterior system") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> re(0.05, 20.0);
  std::uniform_real_distribution<double> im(-30.0, 30.0);
  std::normal_distribution<double> normal;
  double worst = 1e300;
  for (int i = 0; i < 1000; ++i) {
    const Complex s(re(rng), im(rng));
    const Eigen::Vector2cd xi(Complex(normal(rng), normal(rng)), Complex(normal(rng), normal(rng)));
    const double q = (xi.adjoint() * nlcq::modal_B_imp(s) * xi)(0, 0).real() / xi.squaredNorm();
    worst = std::min(worst, q);
  }
  CHECK(worst > 0.0);
}

TEST_CASE("layer potentials of the constant mode") {
  const Complex s(0.8, 1.5);
  const double radius = 2.0;
  const auto [single, dbl] = nlcq::modal_potentials(radius, s);
  // direct quadrature over the sphere with x on the z axis
  const Eigen::Vector3d x(0.0, 0.0, radius);
  const Complex sq = oracle::sphere_integral([&](const Eigen::Vector3d& y, double w) -> Complex {
    return nlcq::phi(x - y, s) * w;
  });
  const Complex dq = oracle::sphere_integral([&](const Eigen::Vector3d& y, double w) -> Complex {
    return nlcq::phi_normal_derivative(x, y, y, s) * w;
  });
  CHECK(std::abs(single - sq) < 1e-8);
  CHECK(std::abs(dbl - dq) < 1e-8);
  CHECK_THROWS_AS(nlcq::modal_potentials(1.0, s), nlcq::SingularEvaluation);
}
