#include <benchmark/benchmark.h>

#include "rtp/hitting.hpp"
#include "rtp/lattice.hpp"
#include "rtp/measures.hpp"

using namespace rtp;

static void BM_StationarySolve(benchmark::State& state)
{
    const LatticeParams p = LatticeParams::scaled_chain(static_cast<int>(state.range(0)), 1.0, TumbleKind::finite(1.0, 1.0));
    for (auto _ : state)
        benchmark::DoNotOptimize(stationary_distribution(p).residual());
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_StationarySolve)->RangeMultiplier(8)->Range(8, 8192)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_W1LatticeVsContinuous(benchmark::State& state)
{
    const int L = static_cast<int>(state.range(0));
    const PointMeasure pi = to_points(citp_invariant(1.0, 1.0), 1000);
    const PointMeasure piL =
        to_points(stationary_distribution(LatticeParams::scaled_chain(L, 1.0, TumbleKind::instantaneous(1.0))));
    for (auto _ : state)
        benchmark::DoNotOptimize(w1_distance(piL, pi));
}
BENCHMARK(BM_W1LatticeVsContinuous)->Arg(8)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_CftpInvariant(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(cftp_invariant(2.0, 0.5, 1.0).total_mass());
}
BENCHMARK(BM_CftpInvariant);

static void BM_StationarityResidual(benchmark::State& state)
{
    const TumbleKind k = TumbleKind::finite(1.0, 1.0);
    const AtomicDensityMeasure m = invariant_measure(k, 1.0);
    Stream rng(1);
    const auto family = random_test_functions(k, 1.0, 10, 12, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(stationarity_residual(m, k, 1.0, family).max_relative);
}
BENCHMARK(BM_StationarityResidual)->Unit(benchmark::kMillisecond);

static void BM_DiagonalReturnSolve(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(diagonal_return_statistics(2.0, 0.5).per_step_mean);
}
BENCHMARK(BM_DiagonalReturnSolve);

static void BM_HittingMonteCarlo(benchmark::State& state)
{
    const TumbleKind k = TumbleKind::instantaneous(1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(monte_carlo_hitting(k, 1.0, JamAtZero{{0.5, {1, -1}}}, 10000, 3).mean);
}
BENCHMARK(BM_HittingMonteCarlo)->Unit(benchmark::kMillisecond);
