/**
 * @file bench_kernels.cpp
 * @brief Serial vs OpenMP timings of the hot kernels.
 */
#include <benchmark/benchmark.h>

#include <random>

#include "refofdm/analysis.hpp"
#include "refofdm/channel.hpp"
#include "refofdm/filterbank.hpp"
#include "refofdm/kernels.hpp"

using namespace refofdm;

namespace {

cvec noise(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    cvec v(n);
    for (auto& x : v)
        x = {g(rng), g(rng)};
    return v;
}

Exec exec_of(const benchmark::State& st)
{
    return st.range(0) ? Exec::Parallel : Exec::Serial;
}

void BM_ConvolveDirect(benchmark::State& st)
{
    const cvec x = noise(std::size_t(st.range(1)), 1);
    const rvec h = make_ldacs_filter(498).taps;
    for (auto _ : st)
        benchmark::DoNotOptimize(convolve_direct(x, h, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * st.range(1));
}

void BM_Dtft(benchmark::State& st)
{
    const rvec h = ldacs_prototype()->coefficients;
    rvec w(std::size_t(st.range(1)));
    for (std::size_t i = 0; i < w.size(); ++i)
        w[i] = -kPi + 2.0 * kPi * double(i) / double(w.size());
    for (auto _ : st)
        benchmark::DoNotOptimize(dtft(h, w, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * st.range(1));
}

void BM_TdlPropagate(benchmark::State& st)
{
    const std::size_t n = std::size_t(st.range(1));
    const ChannelProfile p = build_channel(Scenario::ENR);
    const FadingRealization r = realize_fading(p, n, 3);
    const cvec x = noise(n, 2);
    for (auto _ : st)
        benchmark::DoNotOptimize(tdl_propagate(x, r.taps, r.delays, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * st.range(1));
}

void BM_RealizeFading(benchmark::State& st)
{
    const ChannelProfile p = build_channel(Scenario::APT);
    for (auto _ : st)
        benchmark::DoNotOptimize(realize_fading(p, std::size_t(st.range(1)), 4, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * st.range(1));
}

void BM_MonteCarlo(benchmark::State& st)
{
    LinkScenario sc;
    sc.tx = make_tx_config(498, Modulation::QPSK, Waveform::RefOFDM);
    sc.channel = build_channel(Scenario::ENR);
    for (auto _ : st)
        benchmark::DoNotOptimize(run_ber_monte_carlo(sc, {5.0, 10.0, 15.0, 20.0}, 1u << 30, std::uint64_t(st.range(1)),
                                                     5, exec_of(st)));
}

}  // namespace

BENCHMARK(BM_ConvolveDirect)->ArgsProduct({{0, 1}, {1 << 14, 1 << 17}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dtft)->ArgsProduct({{0, 1}, {4096, 65536}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TdlPropagate)->ArgsProduct({{0, 1}, {1 << 16, 1 << 20}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RealizeFading)->ArgsProduct({{0, 1}, {1 << 14, 1 << 17}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo)->ArgsProduct({{0, 1}, {20000}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
