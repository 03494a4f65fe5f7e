#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "nlcq/cq.hpp"
#include "nlcq/errors.hpp"
#include "nlcq/modal_sphere.hpp"
#include "oracles.hpp"

using nlcq::Complex;
using nlcq::MultistepScheme;
using nlcq::TimeGrid;

namespace {

Eigen::MatrixXcd scalar(Complex c) { return Eigen::MatrixXcd::Constant(1, 1, c); }

}  // namespace

TEST_CASE("generating functions") {
  const auto b1 = MultistepScheme::bdf1();
  const auto b2 = MultistepScheme::bdf2();
  CHECK(std::abs(nlcq::bdf_delta(b1, 1.0)) == 0.0);
  CHECK(std::abs(nlcq::bdf_delta(b2, 0.0) - 1.5) == 0.0);
  CHECK(std::abs(nlcq::bdf_delta(b2, 1.0)) < 1e-15);
  CHECK(b2.coefficients()[0] == 1.5);
  CHECK(b2.coefficients()[1] == -2.0);
  CHECK(b2.coefficients()[2] == 0.5);
  CHECK(b1.order() == 1);
  CHECK(b2.order() == 2);

  // delta'(1) = -1 by central differences
  for (const auto& s : {b1, b2}) {
    const double h = 1e-6;
    const Complex d = (s.delta(1.0 + h) - s.delta(1.0 - h)) / (2.0 * h);
    CHECK(std::abs(d + 1.0) < 1e-8);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 50; ++i) {
    const Complex z(u(rng), u(rng));
    CHECK(std::abs(b1.delta(z) - oracle::bdf1(z)) < 1e-15);
    CHECK(std::abs(b2.delta(z) - oracle::bdf2(z)) < 1e-14);
  }
  CHECK(MultistepScheme::from_name("BDF2") == b2);
  CHECK_THROWS_AS(MultistepScheme::from_name("radau"), nlcq::ConfigError);
}

TEST_CASE("A-stability on sampled points of the unit disc") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> radius(0.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  for (const auto& scheme : {MultistepScheme::bdf1(), MultistepScheme::bdf2()}) {
    int bad = 0;
    for (int i = 0; i < 10000; ++i) {
      const Complex z = std::polar(std::sqrt(radius(rng)) * (1.0 - 1e-12), angle(rng));
      if (!(scheme.delta(z).real() > 0.0)) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("time grid") {
  const TimeGrid grid(3.0, 64);
  CHECK(grid.step() == doctest::Approx(3.0 / 64));
  CHECK(grid.time(64) == doctest::Approx(3.0));
  CHECK_THROWS_AS(TimeGrid(0.0, 4), nlcq::ConfigError);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), nlcq::ConfigError);
}

TEST_CASE("weights of s: backward difference quotient") {
  const TimeGrid grid(1.0, 32);
  const double dt = grid.step();
  const auto w = nlcq::cq_weights([](Complex s) { return scalar(s); }, MultistepScheme::bdf1(), grid);
  REQUIRE(w.size() == 33);
  CHECK(std::abs(w[0](0, 0) - 1.0 / dt) < 1e-10 / dt);
  CHECK(std::abs(w[1](0, 0) + 1.0 / dt) < 1e-10 / dt);
  for (int n = 2; n <= 32; ++n) CHECK(std::abs(w[n](0, 0)) < 1e-10 / dt);

  const auto w2 = nlcq::cq_weights([](Complex s) { return scalar(s); }, MultistepScheme::bdf2(), grid);
  CHECK(std::abs(w2[0](0, 0) - 1.5 / dt) < 1e-10 / dt);
  CHECK(std::abs(w2[1](0, 0) + 2.0 / dt) < 1e-10 / dt);
  CHECK(std::abs(w2[2](0, 0) - 0.5 / dt) < 1e-10 / dt);
}

TEST_CASE("weights of 1/s against the geometric-series formulas") {
  const TimeGrid grid(2.0, 256);
  const double dt = grid.step();
  const auto w1 = nlcq::antiderivative_weights(MultistepScheme::bdf1(), grid);
  const auto w2 = nlcq::antiderivative_weights(MultistepScheme::bdf2(), grid);
  double err1 = 0.0;
  double err2 = 0.0;
  for (int n = 0; n <= 256; ++n) {
    err1 = std::max(err1, std::abs(w1[static_cast<std::size_t>(n)] - dt));
    err2 = std::max(err2, std::abs(w2[static_cast<std::size_t>(n)] - dt * (1.0 - std::pow(3.0, -(n + 1)))));
  }
  CHECK(err1 < 1e-10);
  CHECK(err2 < 1e-10);
}

TEST_CASE("matrix weights agree with a direct DFT and with K(delta(0)/dt)") {
  const TimeGrid grid(3.0, 40);
  const auto scheme = MultistepScheme::bdf2();
  const nlcq::MatrixKernel kernel = [](Complex s) { return Eigen::MatrixXcd(nlcq::modal_B_imp(s)); };
  const auto table = nlcq::cq_weights(kernel, scheme, grid, "B_imp");
  CHECK(table.kernel == "B_imp");
  CHECK(table.rows() == 2);
  CHECK(table.contour_points >= 41);

  const auto ref = oracle::series_coefficients(kernel, oracle::bdf2, grid.step(), 40, 512, std::pow(1e-15, 1.0 / 512));
  double scale = 0.0;
  double err = 0.0;
  for (int n = 0; n <= 40; ++n) {
    scale = std::max(scale, ref[static_cast<std::size_t>(n)].norm());
    err = std::max(err, (table[n] - ref[static_cast<std::size_t>(n)]).norm());
  }
  CHECK(err < 1e-9 * scale);
  CHECK((table[0] - kernel(1.5 / grid.step())).norm() < 1e-10 * scale);

  // Z-transform round trip inside the contour
  for (const Complex z : {Complex(0.5, 0.0), Complex(-0.3, 0.4), Complex(0.0, 0.6)}) {
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(2, 2);
    Complex zn = 1.0;
    for (int n = 0; n <= 40; ++n, zn *= z) sum += table[n] * zn;
    CHECK((sum - kernel(scheme.delta(z) / grid.step())).norm() < 1e-9 * scale);
  }
}

TEST_CASE("doubling the contour points leaves the modal weights unchanged") {
  const TimeGrid grid(4.0, 128);
  for (const auto& scheme : {MultistepScheme::bdf1(), MultistepScheme::bdf2()}) {
    for (const bool interior : {false, true}) {
      const nlcq::MatrixKernel kernel = [interior](Complex s) {
        return Eigen::MatrixXcd(interior ? nlcq::modal_B_interior(s) : nlcq::modal_B_imp(s));
      };
      const nlcq::Contour base(scheme, grid);
      const int points = 2 * base.points();
      const nlcq::Contour doubled(scheme, grid, points, std::pow(2.2e-16, 1.0 / (points + 128)));
      const auto a = nlcq::cq_weights(kernel, base);
      const auto b = nlcq::cq_weights(kernel, doubled);
      double scale = 0.0;
      double diff = 0.0;
      for (int n = 0; n <= 128; ++n) {
        scale = std::max(scale, a[n].cwiseAbs().maxCoeff());
        diff = std::max(diff, (a[n] - b[n]).cwiseAbs().maxCoeff());
      }
      CHECK(diff < 1e-8 * scale);
    }
  }
}

TEST_CASE("contour parameters") {
  const TimeGrid grid(1.0, 100);
  const nlcq::Contour c(MultistepScheme::bdf2(), grid);
  CHECK(c.points() == 256);
  CHECK(c.highest_index() == 100);
  CHECK(std::pow(c.radius(), c.points() + 100) == doctest::Approx(2.220446e-16).epsilon(1e-3));
  const auto m = nlcq::Contour::minimal(MultistepScheme::bdf2(), grid);
  CHECK(m.points() == 202);
  CHECK(std::abs(c.frequency(0) - c.scheme().delta(c.radius()) / grid.step()) < 1e-12);
  CHECK_THROWS_AS(nlcq::Contour(MultistepScheme::bdf1(), grid, 50, 0.5), nlcq::ConfigError);
  CHECK_THROWS_AS(nlcq::Contour(MultistepScheme::bdf1(), grid, 256, 1.5), nlcq::ConfigError);
}

TEST_CASE("half-contour accumulation of real weights") {
  const TimeGrid grid(2.0, 30);
  const auto scheme = MultistepScheme::bdf2();
  const auto contour = nlcq::Contour::minimal(scheme, grid);
  const nlcq::RealWeightAccumulator acc(contour);
  CHECK(acc.frequency_count() == contour.points() / 2 + 1);
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(4, acc.weight_count());
  for (int first = 0; first < acc.frequency_count(); first += 5) {
    const int batch = std::min(5, acc.frequency_count() - first);
    Eigen::MatrixXcd values(4, batch);
    for (int b = 0; b < batch; ++b) {
      const Eigen::Matrix2cd k = nlcq::modal_B_imp(acc.frequency(first + b));
      values.col(b) = Eigen::Map<const Eigen::Vector4cd>(k.data());
    }
    acc.accumulate(first, values, table);
  }
  const auto full = nlcq::cq_weights([](Complex s) { return Eigen::MatrixXcd(nlcq::modal_B_imp(s)); }, scheme, grid);
  double err = 0.0;
  for (int n = 0; n <= 30; ++n) {
    const Eigen::Matrix2d w = Eigen::Map<const Eigen::Matrix2d>(table.col(n).data());
    err = std::max(err, (w - full[n].real()).cwiseAbs().maxCoeff());
  }
  CHECK(err < 1e-9 * full[0].cwiseAbs().maxCoeff());
}

TEST_CASE("kernel failures carry the frequency") {
  const TimeGrid grid(1.0, 8);
  const nlcq::MatrixKernel bad = [](Complex s) -> Eigen::MatrixXcd {
    if (s.imag() > 0.0) throw std::runtime_error("boom");
    return scalar(s);
  };
  try {
    nlcq::cq_weights(bad, MultistepScheme::bdf1(), grid);
    FAIL("expected an exception");
  } catch (const nlcq::KernelEvaluationError& e) {
    CHECK(e.frequency().imag() > 0.0);
    CHECK(e.frequency().real() > 0.0);
  }
}

TEST_CASE("discrete convolution") {
  const TimeGrid grid(1.0, 10);
  const auto id = nlcq::cq_weights([](Complex) { return Eigen::MatrixXcd::Identity(2, 2); }, MultistepScheme::bdf2(),
                                   grid);
  std::vector<Eigen::VectorXd> hist;
  for (int n = 0; n <= 10; ++n) hist.push_back(Eigen::Vector2d(n, -2.0 * n));
  for (int n = 0; n <= 10; ++n) CHECK((nlcq::apply_convolution(id, hist, n) - hist[static_cast<std::size_t>(n)]).norm() < 1e-12);

  const auto inv = nlcq::cq_weights([](Complex s) { return scalar(1.0 / s); }, MultistepScheme::bdf1(), grid);
  std::vector<Eigen::VectorXd> constant(11, Eigen::VectorXd::Constant(1, 2.5));
  for (int n = 0; n <= 10; ++n) {
    CHECK(nlcq::apply_convolution(inv, constant, n)[0] == doctest::Approx((n + 1) * grid.step() * 2.5).epsilon(1e-10));
  }
  std::vector<Eigen::VectorXcd> zeros(11, Eigen::VectorXcd::Zero(1));
  CHECK(nlcq::apply_convolution(inv, zeros, 7).norm() == 0.0);

  std::vector<Eigen::VectorXd> wrong(11, Eigen::VectorXd::Zero(3));
  CHECK_THROWS_AS(nlcq::apply_convolution(inv, wrong, 4), nlcq::DimensionMismatch);
  CHECK_THROWS_AS(nlcq::apply_convolution(inv, constant, 11), nlcq::DimensionMismatch);
  CHECK_THROWS_AS(nlcq::apply_convolution(inv, std::span(constant).first(3), 5), nlcq::DimensionMismatch);
}

TEST_CASE("discrete antiderivative") {
  const TimeGrid grid(2.0, 50);
  const double dt = grid.step();
  const std::vector<double> ones(51, 1.0);
  const auto i1 = nlcq::discrete_antiderivative(ones, MultistepScheme::bdf1(), grid);
  for (int n = 0; n <= 50; ++n) CHECK(i1[static_cast<std::size_t>(n)] == doctest::Approx((n + 1) * dt).epsilon(1e-10));

  std::vector<double> pulse(51, 0.0);
  pulse[0] = 1.0;
  const auto i2 = nlcq::discrete_antiderivative(pulse, MultistepScheme::bdf2(), grid);
  for (int n = 0; n <= 50; ++n) {
    CHECK(std::abs(i2[static_cast<std::size_t>(n)] - dt * (1.0 - std::pow(3.0, -(n + 1)))) < 1e-12);
  }
  const auto z = nlcq::discrete_antiderivative(std::vector<double>(51, 0.0), MultistepScheme::bdf2(), grid);
  for (double v : z) CHECK(v == 0.0);
  CHECK_THROWS_AS(nlcq::discrete_antiderivative(std::vector<double>(52, 1.0), MultistepScheme::bdf2(), grid),
                  nlcq::DimensionMismatch);

  Eigen::MatrixXd rows(2, 51);
  rows.row(0).setOnes();
  rows.row(1).setZero();
  rows(1, 0) = 1.0;
  const Eigen::MatrixXd both = nlcq::discrete_antiderivative(rows, MultistepScheme::bdf2(), grid);
  CHECK(std::abs(both(1, 10) - i2[10]) < 1e-14);
}

TEST_CASE("differentiation then integration reproduces the sequence") {
  const TimeGrid grid(1.0, 64);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> normal;
  for (const auto& scheme : {MultistepScheme::bdf1(), MultistepScheme::bdf2()}) {
    const auto d = nlcq::cq_weights([](Complex s) { return scalar(s); }, scheme, grid);
    std::vector<Eigen::VectorXd> seq;
    for (int n = 0; n <= 64; ++n) seq.push_back(Eigen::VectorXd::Constant(1, normal(rng)));
    std::vector<double> derivative;
    for (int n = 0; n <= 64; ++n) derivative.push_back(nlcq::apply_convolution(d, seq, n)[0]);
    const auto back = nlcq::discrete_antiderivative(derivative, scheme, grid);
    double err = 0.0;
    for (int n = 0; n <= 64; ++n) err = std::max(err, std::abs(back[static_cast<std::size_t>(n)] - seq[static_cast<std::size_t>(n)][0]));
    CHECK(err < 1e-10);
  }
}
