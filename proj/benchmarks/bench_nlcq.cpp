#include <benchmark/benchmark.h>

#include <numbers>

#include "nlcq/backends.hpp"
#include "nlcq/bem3d.hpp"
#include "nlcq/march.hpp"
#include "nlcq/mesh.hpp"
#include "nlcq/modal_sphere.hpp"
#include "nlcq/spaces.hpp"

namespace {

using Complex = std::complex<double>;

void BM_ModalWeights(benchmark::State& state) {
  const nlcq::TimeGrid grid(3.0, static_cast<int>(state.range(0)));
  const nlcq::MatrixKernel k = [](Complex s) -> Eigen::MatrixXcd { return nlcq::modal_B_imp(s); };
  for (auto _ : state) benchmark::DoNotOptimize(nlcq::cq_weights(k, nlcq::MultistepScheme::bdf2(), grid));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ModalWeights)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ModalMarch(benchmark::State& state) {
  const nlcq::ModalBackend modal;
  const nlcq::TimeGrid grid(3.0, static_cast<int>(state.range(0)));
  const auto scheme = nlcq::MultistepScheme::bdf2();
  const auto weights = modal.discretize(scheme, grid, nlcq::Problem::exterior);
  const auto wave = nlcq::IncidentWave::spatially_constant(-2.0, 10.0, std::numbers::pi / 2.0);
  const auto imp = nlcq::Impedance::power_law(0.5, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        nlcq::solve_marching(modal, *weights, grid, wave, imp, nlcq::NewtonConfig{}, nlcq::Problem::exterior));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ModalMarch)->RangeMultiplier(4)->Range(64, 4096)->Complexity(benchmark::oNSquared);

void BM_GalerkinAssembly(benchmark::State& state) {
  const auto mesh = nlcq::icosphere(static_cast<int>(state.range(0)));
  const nlcq::TraceSpaces spaces(mesh, 0);
  const nlcq::GalerkinAssembler assembler(spaces, static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(assembler.assemble(Complex(1.0, 2.0)));
  state.counters["triangles"] = mesh.triangle_count();
}
BENCHMARK(BM_GalerkinAssembly)->Args({1, 3})->Args({2, 3})->Args({2, 4})->Unit(benchmark::kMillisecond);

void BM_GalerkinBatch(benchmark::State& state) {
  const auto mesh = nlcq::icosphere(2);
  const nlcq::TraceSpaces spaces(mesh, 0);
  const nlcq::GalerkinAssembler assembler(spaces, 3);
  std::vector<Complex> s;
  for (int b = 0; b < state.range(0); ++b) s.emplace_back(1.0, 0.5 * b);
  for (auto _ : state) benchmark::DoNotOptimize(assembler.assemble_batch(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GalerkinBatch)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_CubeWeights(benchmark::State& state) {
  const nlcq::BemBackend bem(nlcq::unit_cube(3), 0, 3);
  const nlcq::TimeGrid grid(4.0, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bem.discretize(nlcq::MultistepScheme::bdf2(), grid, nlcq::Problem::exterior));
  }
}
BENCHMARK(BM_CubeWeights)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
