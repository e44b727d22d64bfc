#include <benchmark/benchmark.h>

#include <quadent/dynamics.hpp>
#include <quadent/entropy.hpp>
#include <quadent/fock_oracle.hpp>
#include <quadent/lyapunov.hpp>
#include <quadent/pipeline.hpp>
#include <quadent/scenarios.hpp>
#include <quadent/ssa_bounds.hpp>
#include <quadent/subsystem_exponent.hpp>

#include "generators.hpp"

namespace {

using namespace quadent;

QuadraticHamiltonian builtin(const std::string& name) {
  return hamiltonian_from_spec(builtin_scenario(name).hamiltonian);
}

void BM_PropagateConstant(benchmark::State& state) {
  const auto h = builtin("inverted_pair");
  const double horizon = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(h, horizon, 0.05, {.samples = 100}));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(horizon / 0.05));
}
BENCHMARK(BM_PropagateConstant)->Arg(60)->Arg(600)->Unit(benchmark::kMillisecond);

void BM_PropagatePeriodic(benchmark::State& state) {
  const auto h = builtin("parametric_drive");
  const double horizon = 2.0 * 3.141592653589793 * static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(propagate(h, horizon, horizon / (100.0 * state.range(0)), {.samples = 50}));
}
BENCHMARK(BM_PropagatePeriodic)->Arg(30)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_LyapunovSpectrum(benchmark::State& state) {
  HamiltonianSpec spec;
  spec.builtin = "coupled_chain";
  spec.params = {{"modes", static_cast<double>(state.range(0))}};
  const auto h = hamiltonian_from_spec(spec);
  LyapunovOptions opts;
  opts.require_convergence = false;
  for (auto _ : state) benchmark::DoNotOptimize(lyapunov_spectrum(h, 300.0, 0.05, opts));
}
BENCHMARK(BM_LyapunovSpectrum)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_SubsystemExponents(benchmark::State& state) {
  const auto h = builtin("coupled_chain");
  const auto series = propagate(h, 300.0, 0.05, {.samples = 100});
  LyapunovOptions opts;
  opts.require_convergence = false;
  const auto lyap = lyapunov_from_propagation(series, opts);
  const auto sub = SubsystemSpec::modes(4, {0, 1});
  const auto g0 = CovarianceMatrix::vacuum(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(subsystem_exponent_algebraic(sub, lyap));
    benchmark::DoNotOptimize(subsystem_exponent_volumetric(sub, series, g0, 0.5));
  }
}
BENCHMARK(BM_SubsystemExponents)->Unit(benchmark::kMillisecond);

void BM_WilliamsonSpectrum(benchmark::State& state) {
  quadent::testing::Rng rng(7);
  const int modes = static_cast<int>(state.range(0));
  const CovarianceMatrix g(quadent::testing::random_covariance(modes, rng, false));
  for (auto _ : state) benchmark::DoNotOptimize(von_neumann_entropy(g));
}
BENCHMARK(BM_WilliamsonSpectrum)->RangeMultiplier(2)->Range(1, 16);

void BM_RestrictedEntropies(benchmark::State& state) {
  const auto series = propagate(builtin("coupled_chain"), 456.0, 0.05, {.samples = 4});
  const auto sub = SubsystemSpec::modes(4, {0, 1});
  const auto g0 = CovarianceMatrix::vacuum(4);
  for (auto _ : state) benchmark::DoNotOptimize(restricted_entropies(series.back().stretch, g0, sub));
}
BENCHMARK(BM_RestrictedEntropies);

void BM_GssRhsMinimize(benchmark::State& state) {
  quadent::testing::Rng rng(11);
  const int modes = static_cast<int>(state.range(0));
  const Matrix m = quadent::testing::random_symplectic(modes, rng, 0.6);
  const ModeCount split(modes, modes / 2);
  for (auto _ : state) benchmark::DoNotOptimize(gss_rhs_minimize(m, split));
}
BENCHMARK(BM_GssRhsMinimize)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_FockEvolve(benchmark::State& state) {
  const auto h = builtin("two_mode_squeezer");
  FockConfig cfg;
  cfg.cutoff = static_cast<int>(state.range(0));
  const FockState psi = FockState::vacuum(2, cfg.cutoff);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_fock(psi, h, 3.0, cfg, 30));
}
BENCHMARK(BM_FockEvolve)->Arg(12)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_RunScenario(benchmark::State& state) {
  const auto cfg = builtin_scenario("inverted_pair");
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
}
BENCHMARK(BM_RunScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
