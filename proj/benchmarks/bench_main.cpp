#include <benchmark/benchmark.h>

#include "nvsense/brownian.hpp"
#include "nvsense/diamond.hpp"
#include "nvsense/electrolyte.hpp"
#include "nvsense/pipeline.hpp"

using namespace nvsense;

static void BM_InterfaceSolve(benchmark::State& state) {
    electrolyte::ElectrolyteParams ep;
    ep.c_b = static_cast<double>(state.range(0)) / 100.0;
    diamond::DiamondParams dp;
    const auto band = diamond::make_band_model(dp);
    for (auto _ : state) {
        auto sol = diamond::solve_interface(ep, dp, band);
        benchmark::DoNotOptimize(sol.phi0);
    }
}
BENCHMARK(BM_InterfaceSolve)->Arg(1)->Arg(100)->Arg(10000);

static void BM_TransferDerivative(benchmark::State& state) {
    electrolyte::ElectrolyteParams ep;
    diamond::DiamondParams dp;
    const auto band = diamond::make_band_model(dp);
    const auto sol = diamond::solve_interface(ep, dp, band);
    for (auto _ : state) {
        benchmark::DoNotOptimize(diamond::transfer_derivative(ep, dp, band, 10e-9, &sol));
    }
}
BENCHMARK(BM_TransferDerivative);

static void BM_FieldCorrelatorFull(benchmark::State& state) {
    electrolyte::ElectrolyteParams ep;
    for (auto _ : state) {
        benchmark::DoNotOptimize(electrolyte::field_correlator_full(ep, 0.1, 1e-4));
    }
}
BENCHMARK(BM_FieldCorrelatorFull);

static void BM_ChargeIntegral(benchmark::State& state) {
    diamond::DiamondParams dp;
    const auto band = diamond::make_band_model(dp);
    double phi = 0.0;
    for (auto _ : state) {
        phi = phi < 1.4 ? phi + 1e-3 : 0.0;
        benchmark::DoNotOptimize(diamond::charge_integral(dp, band, 1.49, phi));
    }
}
BENCHMARK(BM_ChargeIntegral);

static void BM_WalkerSteps(benchmark::State& state) {
    brownian::McConfig cfg;
    cfg.n_particles = static_cast<int>(state.range(0));
    cfg.n_steps = 200;
    cfg.replicas = 2;
    for (auto _ : state) {
        auto pts = brownian::simulate_field_correlator(cfg, {0.0});
        benchmark::DoNotOptimize(pts.front().value);
    }
    state.SetItemsProcessed(state.iterations() * 2 * cfg.n_particles * (cfg.n_steps + 100) *
                            cfg.replicas);
}
BENCHMARK(BM_WalkerSteps)->Arg(1000)->Arg(10000)->UseRealTime();

BENCHMARK_MAIN();
