#include <benchmark/benchmark.h>

#include "rtp/coupling.hpp"
#include "rtp/lattice.hpp"
#include "rtp/pdmp.hpp"

using namespace rtp;

static void BM_PairVelocityEvents(benchmark::State& state)
{
    PairVelocitySampler s(TumbleKind::finite(1.0, 1.0), {0, 0}, Stream(1), Stream(2));
    for (auto _ : state)
        benchmark::DoNotOptimize(s.advance());
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PairVelocityEvents);

static void BM_LatticeEvents(benchmark::State& state)
{
    const LatticeParams p = LatticeParams::scaled_chain(static_cast<int>(state.range(0)), 1.0, TumbleKind::instantaneous(1.0));
    DiscreteSimulator sim(p, {1, {1, -1}}, 3);
    const double inf = std::numeric_limits<double>::infinity();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim.step(inf));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LatticeEvents)->Arg(16)->Arg(1024);

static void BM_ContinuousSegments(benchmark::State& state)
{
    ContinuousSimulator sim({1.0, TumbleKind::instantaneous(1.0)}, {0.5, {1, -1}}, 4);
    const double inf = std::numeric_limits<double>::infinity();
    for (auto _ : state)
        benchmark::DoNotOptimize(sim.next_segment(inf));
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ContinuousSegments);

static void BM_OccupationHorizon(benchmark::State& state)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    for (auto _ : state)
        benchmark::DoNotOptimize(stream_occupation(params, {0.5, {1, -1}}, 1e4, 50, 5).jammed_fraction(Boundary::zero));
}
BENCHMARK(BM_OccupationHorizon)->Unit(benchmark::kMillisecond);

static void BM_CoupledSupDeviation(benchmark::State& state)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    const int L = static_cast<int>(state.range(0));
    std::uint64_t rep = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(coupled_sup_deviation(L, params, 0.5, {1, 1}, 1.0, 6, rep++));
    state.SetComplexityN(L);
}
BENCHMARK(BM_CoupledSupDeviation)->RangeMultiplier(16)->Range(1 << 10, 1 << 18)->Unit(benchmark::kMicrosecond);

static void BM_ContinuousCouplingTime(benchmark::State& state)
{
    const ContParams params{1.0, TumbleKind::instantaneous(1.0)};
    std::uint64_t rep = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            continuous_coupling_times(params, {0.0, {1, -1}}, {1.0, {-1, 1}}, 1e4, 7, rep++).tau_coupling);
}
BENCHMARK(BM_ContinuousCouplingTime)->Unit(benchmark::kMicrosecond);
