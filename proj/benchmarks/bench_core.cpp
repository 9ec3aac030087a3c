#include <benchmark/benchmark.h>

#include <numbers>

#include "lattice3b/efimov.hpp"
#include "lattice3b/three_body.hpp"
#include "lattice3b/two_body.hpp"

using namespace lattice3b;

namespace {

const ModelParams& par1() {
  static const ModelParams p = make_params(1.0, 1e-8);
  return p;
}

void BM_quadrature_inv_eps(benchmark::State& state) {
  GridSpec spec;
  spec.n_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        quadrature([](const TorusVec& p) { return 1.0 / dispersion(p); }, spec));
  }
}
BENCHMARK(BM_quadrature_inv_eps)->Arg(32)->Arg(64)->Arg(128);

void BM_determinant(benchmark::State& state) {
  const TorusVec k = wrap(1.2, 0.4, -0.3);
  for (auto _ : state)
    benchmark::DoNotOptimize(determinant(k, -0.5, par1()).value);
}
BENCHMARK(BM_determinant);

void BM_bound_state(benchmark::State& state) {
  const TorusVec k = wrap(std::numbers::pi, 0, 0);
  for (auto _ : state)
    benchmark::DoNotOptimize(bound_state_energy(k, par1()).z_gamma);
}
BENCHMARK(BM_bound_state);

void BM_bs_assemble(benchmark::State& state) {
  GridSpec grid;
  grid.n_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        bs_assemble({}, -0.2, par1(), grid, DeltaEval::shared_grid).values.size());
  }
}
BENCHMARK(BM_bs_assemble)->Arg(4)->Arg(6)->Arg(8);

void BM_eigen_count(benchmark::State& state) {
  GridSpec grid;
  grid.n_per_axis = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigen_count_N({}, -0.2, par1(), grid,
                                           ExchangeSector::symmetric,
                                           DeltaEval::shared_grid)
                                 .count);
  }
}
BENCHMARK(BM_eigen_count)->Arg(6)->Arg(8);

void BM_partial_wave(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(partial_wave(4, 0.7, par1()));
}
BENCHMARK(BM_partial_wave);

void BM_s_operator_count(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(s_operator_count(10.0, 1.0, par1(), 4, 200).count);
}
BENCHMARK(BM_s_operator_count);

}  // namespace

BENCHMARK_MAIN();
