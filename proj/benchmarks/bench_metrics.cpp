#include <benchmark/benchmark.h>

#include <random>

#include "sphereview/metrics.hpp"

namespace {

using namespace sphereview;

const GridDims kDims{256, 128};

Grid random_prediction(const GridDims& dims, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    Grid s(dims, 1);
    for (float& v : s.data()) v = dist(rng);
    return s;
}

Mask random_mask(const GridDims& dims, uint32_t seed) {
    std::mt19937 rng(seed);
    std::bernoulli_distribution coin(0.25);
    Mask m(dims);
    for (auto& v : m.data()) v = coin(rng) ? 1 : 0;
    m.data()[0] = 1; // never empty
    return m;
}

void BM_Mae(benchmark::State& state) {
    Grid s = random_prediction(kDims, 1);
    Mask g = random_mask(kDims, 2);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::mae(s, g));
}
BENCHMARK(BM_Mae)->Unit(benchmark::kMicrosecond);

void BM_MaxF(benchmark::State& state) {
    Grid s = random_prediction(kDims, 3);
    Mask g = random_mask(kDims, 4);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::max_f(s, g));
}
BENCHMARK(BM_MaxF)->Unit(benchmark::kMicrosecond);

void BM_Edt(benchmark::State& state) {
    Mask g = random_mask(kDims, 5);
    const bool wrap = state.range(0) != 0;
    for (auto _ : state) {
        metrics::detail::EdtResult r = metrics::detail::edt(g, wrap);
        benchmark::DoNotOptimize(r);
    }
    state.SetItemsProcessed(state.iterations() * kDims.w * kDims.h);
}
BENCHMARK(BM_Edt)->Arg(0)->Arg(1)->ArgNames({"wrap"})->Unit(benchmark::kMillisecond);

void BM_WeightedF(benchmark::State& state) {
    Grid s = random_prediction(kDims, 6);
    Mask g = random_mask(kDims, 7);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::weighted_f(s, g));
}
BENCHMARK(BM_WeightedF)->Unit(benchmark::kMillisecond);

void BM_SMeasure(benchmark::State& state) {
    Grid s = random_prediction(kDims, 8);
    Mask g = random_mask(kDims, 9);
    for (auto _ : state) benchmark::DoNotOptimize(metrics::s_measure(s, g));
}
BENCHMARK(BM_SMeasure)->Unit(benchmark::kMicrosecond);

void BM_EvaluatePair(benchmark::State& state) {
    Grid s = random_prediction(kDims, 10);
    Mask g = random_mask(kDims, 11);
    for (auto _ : state) {
        metrics::PairResult r = metrics::evaluate_pair(s, g);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_EvaluatePair)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
