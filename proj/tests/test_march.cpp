#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "nlcq/backends.hpp"
#include "nlcq/errors.hpp"
#include "nlcq/march.hpp"
#include "nlcq/mesh.hpp"
#include "nlcq/modal_sphere.hpp"
#include "nlcq/quadrature.hpp"
#include "nlcq/spaces.hpp"

using namespace nlcq;
using Complex = std::complex<double>;

namespace {

IncidentWave pulse() { return IncidentWave::spatially_constant(-2.0, 10.0, std::numbers::pi / 2.0); }
Impedance quadratic() { return Impedance::power_law(0.5, 1.0); }

// Dense matrix of the weight B_n, column by column.
Eigen::MatrixXd dense_weight(const ConvolutionSystem& w, int n) {
  const Eigen::Index nx = w.dim_x();
  const Eigen::Index ny = w.dim_y();
  Eigen::MatrixXd b(nx + ny, nx + ny);
  for (Eigen::Index c = 0; c < nx + ny; ++c) {
    TracePair e = TracePair::zero(nx, ny);
    if (c < nx) e.phi[c] = 1.0; else e.psi[c - nx] = 1.0;
    Eigen::VectorXd ox = Eigen::VectorXd::Zero(nx);
    Eigen::VectorXd oy = Eigen::VectorXd::Zero(ny);
    w.apply_add(n, e, ox, oy);
    b.col(c) << ox, oy;
  }
  return b;
}

// Linear impedance g(mu) = a mu: the whole march is one block lower
// triangular system, solved here at once.
Eigen::VectorXd all_at_once(const Backend& backend, const ConvolutionSystem& w, const TimeGrid& grid,
                            const IncidentWave& wave, double a, Problem problem) {
  const Eigen::Index nx = w.dim_x();
  const Eigen::Index ny = w.dim_y();
  const Eigen::Index d = nx + ny;
  const int steps = grid.steps() + 1;
  Eigen::VectorXd dummy;
  Eigen::MatrixXd mass;
  backend.nonlinearity(Impedance::power_law(1.0, 0.0), Eigen::VectorXd::Zero(ny), dummy, mass);
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(d * steps, d * steps);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(d * steps);
  std::vector<Eigen::MatrixXd> b;
  for (int n = 0; n < steps; ++n) b.push_back(dense_weight(w, n));
  for (int n = 0; n < steps; ++n) {
    for (int j = 0; j <= n; ++j) big.block(n * d, (n - j) * d, d, d) = b[static_cast<std::size_t>(j)];
    big.block(n * d + nx, n * d + nx, ny, ny) += a * mass;
    Eigen::VectorXd f = -a * mass * backend.velocity_trace(wave, grid.time(n));
    if (problem == Problem::exterior) f -= backend.neumann_load(wave, grid.time(n));
    rhs.segment(n * d + nx, ny) = f;
  }
  return big.partialPivLu().solve(rhs);
}

double max_difference(const MarchResult& r, const Eigen::VectorXd& stacked, Eigen::Index nx, Eigen::Index ny) {
  double worst = 0.0;
  for (std::size_t n = 0; n < r.traces.size(); ++n) {
    Eigen::VectorXd xi(nx + ny);
    xi << r.traces[n].phi, r.traces[n].psi;
    worst = std::max(worst, (xi - stacked.segment(static_cast<Eigen::Index>(n) * (nx + ny), nx + ny)).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace

TEST_CASE("incident wave formulas") {
  const auto w = pulse();
  for (double t : {0.0, 1.0, 1.5, 2.7}) {
    const double z = t - std::numbers::pi / 2.0;
    CHECK(w.value(t) == doctest::Approx(-2.0 * std::exp(-10.0 * z * z)).epsilon(1e-14));
    const double h = 1e-6;
    CHECK(std::abs(w.rate(t) - (w.value(t + h) - w.value(t - h)) / (2 * h)) < 1e-7);
  }
  CHECK(w.is_spatially_constant());
  CHECK(w.gradient(Eigen::Vector3d(0.3, 0.2, 0.1), 1.4).norm() == 0.0);

  const Eigen::Vector3d a(1.0, -1.0, 0.0);
  const auto p = IncidentWave::plane_wave(1.0, 8.0, -2.5, a);
  CHECK_FALSE(p.is_spatially_constant());
  const Eigen::Vector3d x(0.4, -0.2, 0.7);
  const Eigen::Vector3d n = Eigen::Vector3d(1.0, 2.0, -0.5).normalized();
  for (double t : {0.0, 0.5, 1.3}) {
    const double z = x.dot(a) - t + 2.5;
    CHECK(p.value(x, t) == doctest::Approx(std::exp(-8.0 * z * z)).epsilon(1e-14));
    const double h = 1e-6;
    Eigen::Vector3d fd;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector3d e = Eigen::Vector3d::Unit(k) * h;
      fd[k] = (p.value(x + e, t) - p.value(x - e, t)) / (2 * h);
    }
    CHECK((p.gradient(x, t) - fd).norm() < 1e-7);
    CHECK(std::abs(p.rate(x, t) - (p.value(x, t + h) - p.value(x, t - h)) / (2 * h)) < 1e-7);
    CHECK(p.normal_derivative(x, n, t) == doctest::Approx(p.gradient(x, t).dot(n)).epsilon(1e-14));
  }

  const auto m = IncidentWave::modulated_gaussian(1.5, 4.0, 0.3, 1.0, Eigen::Vector3d(0.0, 0.0, 1.0));
  const double xi = 0.8 - x.z();
  CHECK(m.value(x, 0.8) ==
        doctest::Approx(1.5 * std::cos(4.0 * xi) * std::exp(-std::pow((xi - 1.0) / 0.3, 2))).epsilon(1e-14));
  CHECK(IncidentWave::modulated_gaussian(1.0, 2.0, 0.5, 1.0, Eigen::Vector3d::Zero()).is_spatially_constant());

  CHECK_THROWS_AS(IncidentWave::spatially_constant(1.0, 0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(IncidentWave::plane_wave(1.0, 1.0, 0.0, Eigen::Vector3d::Zero()), ConfigError);
  CHECK_THROWS_AS(IncidentWave::modulated_gaussian(1.0, 1.0, -1.0, 0.0, a), ConfigError);
}

TEST_CASE("causality of the incident wave") {
  const std::vector<Eigen::Vector3d> pts = {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(-1, 0, 0)};
  CHECK(is_causal(pulse(), pts));
  CHECK(is_causal(IncidentWave::zero(), pts));
  CHECK_FALSE(is_causal(IncidentWave::spatially_constant(1.0, 1.0, 0.5), pts));
  // the worst point is (-1, 0, 0), where x.a - t0 = 1.5
  const auto p = IncidentWave::plane_wave(1.0, 8.0, -2.5, Eigen::Vector3d(1, -1, 0));
  CHECK(causality_defect(p, pts) == doctest::Approx(std::exp(-8.0 * 1.5 * 1.5)).epsilon(1e-12));
}

TEST_CASE("modal backend weights and restrictions") {
  const ModalBackend modal;
  const TimeGrid grid(3.0, 32);
  for (auto scheme : {MultistepScheme::bdf1(), MultistepScheme::bdf2()}) {
    for (auto problem : {Problem::exterior, Problem::interior}) {
      const auto w = modal.discretize(scheme, grid, problem);
      const MatrixKernel k = [problem](Complex s) -> Eigen::MatrixXcd {
        return problem == Problem::exterior ? modal_B_imp(s) : modal_B_interior(s);
      };
      const auto ref = cq_weights(k, scheme, grid);
      REQUIRE(w->weight_count() == 33);
      for (int n = 0; n <= 32; ++n) CHECK((dense_weight(*w, n) - ref[n].real()).norm() < 1e-12);
    }
  }
  CHECK_THROWS_AS(modal.check_wave(IncidentWave::plane_wave(1.0, 1.0, 0.0, Eigen::Vector3d(1, 0, 0))), ConfigError);
  CHECK_THROWS_AS(solve_marching(modal, MultistepScheme::bdf2(), grid,
                                 IncidentWave::plane_wave(1.0, 1.0, 0.0, Eigen::Vector3d(1, 0, 0)), quadratic(),
                                 NewtonConfig{}, Problem::exterior),
                  ConfigError);
  CHECK(modal.neumann_load(pulse(), 1.5).norm() == 0.0);
  CHECK(modal.velocity_trace(pulse(), 1.2)[0] == pulse().rate(1.2));
  CHECK_THROWS_AS(modal.potential_kernel(Eigen::Vector3d(0.5, 0, 0)), ConfigError);
}

TEST_CASE("bem3d backend traces and nonlinearity") {
  const BemBackend bem(icosphere(1), 1, 3);
  const auto m = mass_matrix_y(bem.spaces());
  const Eigen::MatrixXd my(m);

  const Eigen::VectorXd v = bem.velocity_trace(pulse(), 1.2);
  CHECK((v - pulse().rate(1.2) * Eigen::VectorXd::Ones(bem.dim_y())).norm() < 1e-14);
  CHECK(bem.neumann_load(pulse(), 1.2).norm() == 0.0);

  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::VectorXd mu(bem.dim_y());
  for (auto& c : mu) c = normal(rng);
  Eigen::VectorXd value;
  Eigen::MatrixXd jac;
  bem.nonlinearity(Impedance::power_law(0.7, 0.0), mu, value, jac);
  CHECK((value - 0.7 * my * mu).norm() < 1e-12 * value.norm());
  CHECK((jac - 0.7 * my).norm() < 1e-12 * jac.norm());

  // Jacobian of the quadratic law against a difference quotient
  bem.nonlinearity(quadratic(), mu, value, jac);
  Eigen::VectorXd dir(bem.dim_y());
  for (auto& c : dir) c = normal(rng);
  const double h = 1e-6;
  Eigen::VectorXd vp, vm;
  Eigen::MatrixXd unused;
  bem.nonlinearity(quadratic(), mu + h * dir, vp, unused);
  bem.nonlinearity(quadratic(), mu - h * dir, vm, unused);
  CHECK(((vp - vm) / (2 * h) - jac * dir).norm() < 1e-6 * (jac * dir).norm());

  // Y_h bases sum to one, so the load sums to the flux of grad u_inc
  // through the polyhedron; reference from a degree-12 rule per face
  const auto p = IncidentWave::plane_wave(1.0, 8.0, -2.5, Eigen::Vector3d(1, -1, 0));
  const Eigen::VectorXd load = bem.neumann_load(p, 2.0);
  const auto rule = triangle_rule(12);
  const auto& mesh = bem.mesh();
  double flux = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    const auto& tri = mesh.triangle(t);
    for (int q = 0; q < rule.size(); ++q) {
      const Eigen::Vector3d& b = rule.barycentric[static_cast<std::size_t>(q)];
      const Eigen::Vector3d x = b[0] * mesh.vertex(tri[0]) + b[1] * mesh.vertex(tri[1]) + b[2] * mesh.vertex(tri[2]);
      flux += rule.weights[static_cast<std::size_t>(q)] * mesh.area(t) * p.normal_derivative(x, mesh.normal(t), 2.0);
    }
  }
  CHECK(load.norm() > 1e-2);
  CHECK(std::abs(load.sum() - flux) < 1e-3 * std::abs(flux));
  CHECK_THROWS_AS(bem.potential_kernel(Eigen::Vector3d(1.01, 0.0, 0.0)), ConfigError);
  CHECK_NOTHROW(bem.potential_kernel(Eigen::Vector3d(3.0, 0.0, 0.0)));
}

TEST_CASE("zero incident wave gives the zero solution") {
  const ModalBackend modal;
  const TimeGrid grid(2.0, 40);
  const auto r = solve_marching(modal, MultistepScheme::bdf2(), grid, IncidentWave::zero(), quadratic(),
                                NewtonConfig{}, Problem::exterior);
  REQUIRE(r.traces.size() == 41);
  for (const auto& xi : r.traces) {
    CHECK(xi.phi.norm() == 0.0);
    CHECK(xi.psi.norm() == 0.0);
  }
  const BemBackend bem(icosphere(0), 0, 3);
  const auto rb = solve_marching(bem, MultistepScheme::bdf1(), TimeGrid(1.0, 8), IncidentWave::zero(), quadratic(),
                                 NewtonConfig{}, Problem::exterior);
  for (const auto& xi : rb.traces) CHECK(xi.phi.norm() + xi.psi.norm() == 0.0);
}

TEST_CASE("linear impedance: one Newton iteration and the all-at-once system") {
  const ModalBackend modal;
  const TimeGrid grid(3.0, 32);
  for (auto scheme : {MultistepScheme::bdf1(), MultistepScheme::bdf2()}) {
    for (auto problem : {Problem::exterior, Problem::interior}) {
      const auto w = modal.discretize(scheme, grid, problem);
      const auto r = solve_marching(modal, *w, grid, pulse(), Impedance::power_law(1.0, 0.0), NewtonConfig{}, problem);
      for (const auto& d : r.diagnostics) CHECK(d.iterations == 1);
      const Eigen::VectorXd ref = all_at_once(modal, *w, grid, pulse(), 1.0, problem);
      CHECK(max_difference(r, ref, 1, 1) < 1e-9 * ref.cwiseAbs().maxCoeff());
    }
  }

  // Galerkin version with a plane wave, so the Neumann load enters
  const BemBackend bem(icosphere(0), 1, 3);
  const TimeGrid g(2.0, 12);
  const auto p = IncidentWave::plane_wave(1.0, 8.0, -2.0, Eigen::Vector3d(0.6, 0.8, 0.0));
  const auto w = bem.discretize(MultistepScheme::bdf2(), g, Problem::exterior);
  const auto r = solve_marching(bem, *w, g, p, Impedance::power_law(0.5, 0.0), NewtonConfig{}, Problem::exterior);
  const Eigen::VectorXd ref = all_at_once(bem, *w, g, p, 0.5, Problem::exterior);
  CHECK(ref.cwiseAbs().maxCoeff() > 1e-3);
  CHECK(max_difference(r, ref, bem.dim_x(), bem.dim_y()) < 1e-9 * ref.cwiseAbs().maxCoeff());
}

TEST_CASE("Newton residuals decrease within each step") {
  const ModalBackend modal;
  const TimeGrid grid(3.0, 64);
  NewtonConfig cfg;
  cfg.tol_increment = 1e-13;
  const auto r = solve_marching(modal, MultistepScheme::bdf2(), grid, pulse(), quadratic(), cfg, Problem::exterior);
  int multi = 0;
  for (const auto& d : r.diagnostics) {
    REQUIRE(static_cast<int>(d.residuals.size()) == d.iterations);
    if (d.iterations > 1) ++multi;
    for (std::size_t k = 1; k < d.residuals.size(); ++k) {
      CHECK((d.residuals[k] <= d.residuals[k - 1] || d.residuals[k] < 1e-13));
    }
  }
  CHECK(multi > 0);
  CHECK(r.median_iterations() <= 5.0);
}

TEST_CASE("history right-hand side") {
  const ModalBackend modal;
  const TimeGrid grid(1.0, 8);
  const auto w = modal.discretize(MultistepScheme::bdf2(), grid, Problem::exterior);
  const TraceSequence none;
  CHECK(rhs_history(0, *w, none, modal, pulse(), grid, Problem::exterior).norm() == 0.0);

  TraceSequence hist = {{Eigen::VectorXd::Constant(1, 0.3), Eigen::VectorXd::Constant(1, -0.2)},
                        {Eigen::VectorXd::Constant(1, 1.1), Eigen::VectorXd::Constant(1, 0.4)}};
  const Eigen::VectorXd f = rhs_history(2, *w, hist, modal, pulse(), grid, Problem::exterior);
  Eigen::Vector2d x0(0.3, -0.2), x1(1.1, 0.4);
  const Eigen::VectorXd expect = -(dense_weight(*w, 2) * x0 + dense_weight(*w, 1) * x1);
  CHECK((f - expect).norm() < 1e-14);

  CHECK_THROWS_AS(rhs_history(3, *w, hist, modal, pulse(), grid, Problem::exterior), DimensionMismatch);
  CHECK_THROWS_AS(rhs_history(9, *w, hist, modal, pulse(), grid, Problem::exterior), DimensionMismatch);
  TraceSequence bad = {{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(1)}};
  CHECK_THROWS_AS(rhs_history(1, *w, bad, modal, pulse(), grid, Problem::exterior), DimensionMismatch);

  const BemBackend bem(icosphere(0), 0, 3);
  CHECK_THROWS_AS(solve_marching(bem, *w, grid, pulse(), quadratic(), NewtonConfig{}, Problem::exterior),
                  DimensionMismatch);
  const TimeGrid longer(1.0, 16);
  CHECK_THROWS_AS(solve_marching(modal, *w, longer, pulse(), quadratic(), NewtonConfig{}, Problem::exterior),
                  DimensionMismatch);
}

TEST_CASE("Newton failure reports the step") {
  const ModalBackend modal;
  const TimeGrid grid(3.0, 64);
  NewtonConfig cfg;
  cfg.tol_increment = 1e-12;
  const auto ok = solve_marching(modal, MultistepScheme::bdf2(), grid, pulse(), quadratic(), cfg, Problem::exterior);
  int first = -1;
  for (const auto& d : ok.diagnostics) {
    if (d.iterations > 1) {
      first = d.step;
      break;
    }
  }
  REQUIRE(first >= 0);
  cfg.max_iters = 1;
  try {
    (void)solve_marching(modal, MultistepScheme::bdf2(), grid, pulse(), quadratic(), cfg, Problem::exterior);
    FAIL("expected NewtonFailure");
  } catch (const NewtonFailure& e) {
    CHECK(e.step() == first);
    CHECK(e.iterations() == 1);
    CHECK(e.increment() >= 1e-12);
  }
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = NewtonConfig{};
  cfg.tol_increment = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("march log lines") {
  const ModalBackend modal;
  const TimeGrid grid(1.0, 10);
  std::ostringstream log;
  (void)solve_marching(modal, MultistepScheme::bdf1(), grid, IncidentWave::spatially_constant(1.0, 1.0, 0.0),
                       quadratic(), NewtonConfig{}, Problem::exterior, &log);
  const std::string text = log.str();
  CHECK(text.find("warning") != std::string::npos);
  CHECK(text.find("# n, t_n, newton_iters, final_increment") != std::string::npos);
  CHECK(std::count(text.begin(), text.end(), '\n') == 13);
}

TEST_CASE("integrated traces") {
  const TimeGrid grid(2.0, 20);
  const double dt = grid.step();
  TraceSequence ones(21, {Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)});
  const auto i1 = integrated_traces(ones, MultistepScheme::bdf1(), grid);
  for (int n = 0; n <= 20; ++n) {
    CHECK(i1[n].phi[1] == doctest::Approx((n + 1) * dt).epsilon(1e-10));
    CHECK(i1[n].psi[2] == doctest::Approx((n + 1) * dt).epsilon(1e-10));
  }
  TraceSequence zero(21, TracePair::zero(2, 3));
  for (const auto& xi : integrated_traces(zero, MultistepScheme::bdf2(), grid)) CHECK(xi.phi.norm() + xi.psi.norm() == 0.0);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  TraceSequence a(21, TracePair::zero(2, 3)), b(21, TracePair::zero(2, 3)), c(21, TracePair::zero(2, 3));
  for (int n = 0; n <= 20; ++n) {
    for (int k = 0; k < 2; ++k) a[n].phi[k] = normal(rng), b[n].phi[k] = normal(rng);
    for (int k = 0; k < 3; ++k) a[n].psi[k] = normal(rng), b[n].psi[k] = normal(rng);
    c[n] = {2.0 * a[n].phi - 3.0 * b[n].phi, 2.0 * a[n].psi - 3.0 * b[n].psi};
  }
  const auto ia = integrated_traces(a, MultistepScheme::bdf2(), grid);
  const auto ib = integrated_traces(b, MultistepScheme::bdf2(), grid);
  const auto ic = integrated_traces(c, MultistepScheme::bdf2(), grid);
  for (int n = 0; n <= 20; ++n) {
    CHECK((ic[n].phi - 2.0 * ia[n].phi + 3.0 * ib[n].phi).norm() < 1e-12);
    CHECK((ic[n].psi - 2.0 * ia[n].psi + 3.0 * ib[n].psi).norm() < 1e-12);
  }
  CHECK_THROWS_AS(integrated_traces(TraceSequence(22, TracePair::zero(1, 1)), MultistepScheme::bdf2(), grid),
                  DimensionMismatch);
}

TEST_CASE("field evaluation") {
  const ModalBackend modal;
  const auto scheme = MultistepScheme::bdf2();
  const TimeGrid grid(3.0, 128);
  TraceSequence zero(129, TracePair::zero(1, 1));
  for (double u : evaluate_field(modal, Eigen::Vector3d(2, 0, 0), zero, scheme, grid)) CHECK(u == 0.0);

  const auto r = solve_marching(modal, scheme, grid, pulse(), quadratic(), NewtonConfig{}, Problem::exterior);
  const auto f = evaluate_field(modal, Eigen::Vector3d(3, 0, 0), r.traces, scheme, grid);
  const auto g = evaluate_field(modal, Eigen::Vector3d(0, 0, -3), r.traces, scheme, grid);
  double peak = 0.0, early = 0.0;
  for (int n = 0; n <= 128; ++n) {
    CHECK(f[n] == g[n]);
    peak = std::max(peak, std::abs(f[n]));
    if (grid.time(n) < 2.0) early = std::max(early, std::abs(f[n]));
  }
  CHECK(peak > 1e-2);
  // the scattered wave needs time 2 to travel from the surface to radius 3
  CHECK(early < 1e-8);
}

TEST_CASE("modal and Galerkin backends agree on the sphere") {
  const ModalBackend modal;
  const BemBackend bem(icosphere(2), 0, 3);
  const auto scheme = MultistepScheme::bdf2();
  const TimeGrid grid(3.0, 64);
  const auto mr = solve_marching(modal, scheme, grid, pulse(), quadratic(), NewtonConfig{}, Problem::exterior);
  const auto br = solve_marching(bem, scheme, grid, pulse(), quadratic(), NewtonConfig{}, Problem::exterior);
  double mp = 0, mq = 0, ep = 0, eq = 0;
  for (int n = 0; n <= 64; ++n) {
    const double a = mr.traces[n].phi[0];
    const double b = mr.traces[n].psi[0];
    mp = std::max(mp, std::abs(a));
    mq = std::max(mq, std::abs(b));
    ep = std::max(ep, std::abs(bem.mean_x(br.traces[n].phi) - a));
    eq = std::max(eq, std::abs(bem.mean_y(br.traces[n].psi) - b));
  }
  MESSAGE("relative mean deviation phi " << ep / mp << " psi " << eq / mq);
  CHECK(ep < 0.05 * mp);
  CHECK(eq < 0.05 * mq);
}
