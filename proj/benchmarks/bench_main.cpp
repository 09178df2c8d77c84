#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "fpcons/constitutive.hpp"
#include "fpcons/hyperbolicity.hpp"
#include "fpcons/solver.hpp"

using namespace fpcons;

namespace {

Ten4 neo_hookean_S4() {
  Ten2 F = Ten2::diag(1.1, 0.95, 1.02);
  F(0, 1) = 0.05;
  return neo_hookean({2.0, 1.0}).elasticity(F);
}

}  // namespace

static void BM_EigGeneralBlockMatrix(benchmark::State& state) {
  BlockMatrix12 M = assemble_M(neo_hookean_S4(), 1.0, normalized(Vec3{{1, 2, 3}}));
  for (auto _ : state) benchmark::DoNotOptimize(eig_general(M.entries));
}
BENCHMARK(BM_EigGeneralBlockMatrix);

static void BM_Eigenstructure(benchmark::State& state) {
  BlockMatrix12 M = assemble_M(neo_hookean_S4(), 1.0, normalized(Vec3{{1, 2, 3}}));
  for (auto _ : state) benchmark::DoNotOptimize(eigenstructure(M));
}
BENCHMARK(BM_Eigenstructure);

static void BM_DirectionScan(benchmark::State& state) {
  StoredEnergy se = neo_hookean({2.0, 1.0});
  ScanOptions opts{static_cast<int>(state.range(0)), 0.0, state.range(1) != 0};
  for (auto _ : state)
    benchmark::DoNotOptimize(scan_directions(se.elasticity, Ten2::diag(1.1, 0.95, 1.02), 1.0, opts));
}
BENCHMARK(BM_DirectionScan)->Args({256, 0})->Args({256, 1})->Unit(benchmark::kMillisecond);

static void BM_SolverStep1D(benchmark::State& state) {
  ConstitutiveModel m = classical_model(1.0, neo_hookean({2.0, 1.0}));
  Field f = sine_wave_field(m, Grid::line(static_cast<int>(state.range(0)), 1.0), {1e-3, 1, Vec3::basis(0), {}});
  for (auto _ : state) benchmark::DoNotOptimize(step_lax_friedrichs(m, f, 0.5));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolverStep1D)->Arg(400)->Arg(1600)->Unit(benchmark::kMicrosecond);

static void BM_SolverStep3D(benchmark::State& state) {
  ConstitutiveModel m = classical_model(1.0, linear_isotropic({2.0, 1.0}));
  Grid g = Grid::cube(static_cast<int>(state.range(0)), 1.0);
  Field f{g, std::vector<State>(g.size())};
  for (std::size_t i = 0; i < f.cells.size(); ++i)
    f.cells[i].F(0, 0) += 1e-3 * std::sin(2 * std::numbers::pi * g.center(i)[0]);
  for (auto _ : state) benchmark::DoNotOptimize(step_lax_friedrichs(m, f, 0.5));
}
BENCHMARK(BM_SolverStep3D)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
