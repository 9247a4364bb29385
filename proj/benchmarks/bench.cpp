#include <benchmark/benchmark.h>

#include <vector>

#include "otafl/channel.hpp"
#include "otafl/ofdm.hpp"
#include "otafl/quantizer.hpp"
#include "otafl/rng.hpp"

using namespace otafl;

namespace {

std::vector<cplx> random_symbols(std::size_t n, std::uint64_t seed) {
    RngStream rng = SeedTree(seed).stream("bench");
    std::vector<cplx> xs(n);
    for (auto& x : xs) x = rng.complex_normal(1.0);
    return xs;
}

void BM_FftRadix2(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = random_symbols(n, 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fft::transform(x, false));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_FftRadix2)->Arg(64)->Arg(1024)->Arg(4096);

void BM_QuantizerDesign(benchmark::State& state) {
    const int bits = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(design_gaussian_quantizer(bits));
    }
}
BENCHMARK(BM_QuantizerDesign)->Arg(1)->Arg(4)->Arg(8);

void BM_QuantizeBlock(benchmark::State& state) {
    const auto spec = design_gaussian_quantizer(static_cast<int>(state.range(0)));
    const auto xs = random_symbols(2048, 2);
    for (auto _ : state) {
        cplx acc(0.0, 0.0);
        for (const auto& x : xs) acc += quantize_complex(spec, 1.0, x);
        benchmark::DoNotOptimize(acc);
    }
    state.SetItemsProcessed(state.iterations() * 2048);
}
BENCHMARK(BM_QuantizeBlock)->Arg(1)->Arg(3);

void BM_Transmit(benchmark::State& state) {
    const std::size_t workers = 20;
    const auto antennas = static_cast<std::size_t>(state.range(0));
    const std::size_t n = 1024, n_cp = 1024;
    const ChannelProfile profile = default_profile(8e-4);

    SeedTree tree(3);
    std::vector<OfdmWord> words;
    RngStream wrng = tree.stream("payload");
    for (std::size_t m = 0; m < workers; ++m) {
        GradientSegment seg;
        seg.values = random_symbols(n, 100 + m);
        words.push_back(modulate(seg, n_cp));
    }
    RngStream crng = tree.stream("channel");
    const auto realization = draw_realization(profile, workers, antennas, crng);

    std::uint64_t word_idx = 0;
    for (auto _ : state) {
        RngStream nrng = tree.stream("noise", word_idx++);
        benchmark::DoNotOptimize(transmit(words, realization, profile, nrng));
    }
}
BENCHMARK(BM_Transmit)->Arg(5)->Arg(40);

void BM_FreqResponseGrid(benchmark::State& state) {
    const std::size_t workers = 20;
    const auto antennas = static_cast<std::size_t>(state.range(0));
    const ChannelProfile profile = default_profile(0.0);
    RngStream rng = SeedTree(4).stream("grid");
    const auto realization = draw_realization(profile, workers, antennas, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(freq_response_grid(realization, profile, 1024));
    }
}
BENCHMARK(BM_FreqResponseGrid)->Arg(5)->Arg(40);

}  // namespace

BENCHMARK_MAIN();
