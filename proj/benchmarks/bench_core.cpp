#include <benchmark/benchmark.h>

#include "levi/thermal.hpp"

namespace {

using namespace levi;

DerivedCouplings small_couplings() {
    ExperimentConfig cfg;
    cfg.theta = 0.0;
    cfg.has_dimensionless = true;
    cfg.dimensionless = {0.5, 0.05, 0.0};
    return derive_couplings(cfg);
}

void BM_EvolveCoherent(benchmark::State& state) {
    const SectorCouplings c = SectorCouplings::from(derive_couplings(ExperimentConfig{}));
    const CoherentLabel beta(complex(3, -1));
    double t = 1e-6;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_coherent(beta, SpinZ::plus, t, c));
        t += 1e-9;
    }
}
BENCHMARK(BM_EvolveCoherent);

void BM_RunSequenceRamsey(benchmark::State& state) {
    const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    const PulseSequence seq = PulseSequence::echo(c, true);
    for (auto _ : state) benchmark::DoNotOptimize(run_sequence(seq, CoherentLabel(complex(2, 1)), c));
}
BENCHMARK(BM_RunSequenceRamsey);

// Cold: spectrum recomputed each time. Warm: served from the cache.
void BM_OraclePropagate(benchmark::State& state) {
    const int dim = static_cast<int>(state.range(0));
    const bool warm = state.range(1) != 0;
    const DerivedCouplings c = small_couplings();
    const SectorCouplings sc = SectorCouplings::from(c);
    const fock::FockState psi = fock::coherent_fock(complex(1, 1), dim);
    fock::PropagatorCache cache;
    for (auto _ : state) {
        if (!warm) cache.clear();
        benchmark::DoNotOptimize(fock::propagate(psi, SpinZ::plus, 0.3 * c.t0, sc, fock::kTailTolerance, cache));
    }
}
BENCHMARK(BM_OraclePropagate)->ArgsProduct({{160, 320}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_SamplePFunction(benchmark::State& state) {
    const ThermalSpec spec{1000.0, state.range(0), 1};
    for (auto _ : state) benchmark::DoNotOptimize(sample_p_function(spec, 1));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePFunction)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_MonteCarloFringe(benchmark::State& state) {
    const DerivedCouplings c = derive_couplings(ExperimentConfig{});
    const PulseSequence seq = PulseSequence::ramsey(c);
    MonteCarloOptions opts;
    opts.threads = 1;
    opts.keep_samples = false;
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_fringe({1000.0, state.range(0), 1}, c.theta, c, seq, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarloFringe)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
