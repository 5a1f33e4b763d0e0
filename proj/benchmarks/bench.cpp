// SPDX-License-Identifier: Apache-2.0
// Copyright (C) 2026 qmimo authors
//
// Microbenchmarks for the hot paths of a sweep: the per-trial precoder
// factorization, the per-SNR allocation, the quantizer element pass, and the
// determinant-based rate. Run with --benchmark_filter=<regex> to narrow.

#include <benchmark/benchmark.h>

#include <random>

#include "qmimo/channel.hpp"
#include "qmimo/harness.hpp"
#include "qmimo/power.hpp"
#include "qmimo/precoder.hpp"
#include "qmimo/quantizer.hpp"
#include "qmimo/rate.hpp"
#include "qmimo/rng.hpp"

using namespace qmimo;

namespace {

SpectrumView random_spectrum(int n, std::uint64_t seed) {
    auto rng = substream(seed, 0);
    std::uniform_real_distribution<double> u(0.4, 1.6);
    SpectrumView sp;
    sp.phi.resize(n);
    for (int i = 0; i < n; ++i) sp.phi(i) = std::sqrt(u(rng));
    sp.owner.assign(n, 0);
    return sp;
}

void bd_factorization(benchmark::State& state) {
    SystemScenario sc = preset("fig2");
    auto rng = substream(1, 0);
    ChannelSet ch = gen_channel(sc, rng);
    for (auto _ : state) {
        auto factors = factorize_users(ch, PrecoderKind::BD, 1.0, 1.0);
        benchmark::DoNotOptimize(factors);
    }
}
BENCHMARK(bd_factorization)->Unit(benchmark::kMillisecond);

void rbd_factorization(benchmark::State& state) {
    SystemScenario sc = preset("fig2");
    auto rng = substream(1, 0);
    ChannelSet ch = gen_channel(sc, rng);
    for (auto _ : state) {
        auto factors = factorize_users(ch, PrecoderKind::RBD, 0.1, 1.0);
        benchmark::DoNotOptimize(factors);
    }
}
BENCHMARK(rbd_factorization)->Unit(benchmark::kMillisecond);

void quantization_aware_allocation(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SpectrumView sp = random_spectrum(n, 7);
    const double delta = build_quantizer(2, 1.0, 64).delta;
    for (auto _ : state) {
        AllocationResult r = cqa_maas(sp, 0.9 * n, delta, n);
        benchmark::DoNotOptimize(r);
    }
    state.SetComplexityN(n);
}
BENCHMARK(quantization_aware_allocation)->RangeMultiplier(2)->Range(8, 256)->Complexity();

void classical_waterfilling(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    SpectrumView sp = random_spectrum(n, 8);
    for (auto _ : state) {
        AllocationResult r = waterfilling(sp, 0.5, n);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(classical_waterfilling)->Range(8, 256);

void quantize_block(benchmark::State& state) {
    QuantizerModel m = build_quantizer(static_cast<int>(state.range(0)), 1.0, 64);
    auto rng = substream(9, 0);
    std::normal_distribution<double> n01(0.0, std::sqrt(1.0 / 128.0));
    Eigen::VectorXcd x(4096);
    for (int i = 0; i < 4096; ++i) x(i) = std::complex<double>(n01(rng), n01(rng));
    for (auto _ : state) {
        Eigen::VectorXcd q = quantize(x, m);
        benchmark::DoNotOptimize(q);
    }
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(quantize_block)->Arg(1)->Arg(3)->Arg(8);

void determinant_rate(benchmark::State& state) {
    SystemScenario sc = preset("fig2");
    auto rng = substream(11, 0);
    ChannelSet ch = gen_channel(sc, rng);
    PrecoderResult pr = build_cqa_precoder(
        ch, sc, PrecoderKind::BD, 1.0, [](const SpectrumView& sp) {
            return equal_allocation(static_cast<int>(sp.phi.size()),
                                    static_cast<double>(sp.phi.size()));
        });
    const double delta = build_quantizer(3, 1.0, 64).delta;
    for (auto _ : state) {
        const double r = sum_rate_bussgang(ch.h, pr.p, delta, 10.0, 32);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(determinant_rate)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
