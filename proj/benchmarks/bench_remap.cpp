#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "sphereview/remap.hpp"

namespace {

using namespace sphereview;

constexpr double kRad = std::numbers::pi / 180.0;
const GridDims kErp{512, 256};

Grid smooth_image(int w, int h, int channels) {
    Grid img(GridDims{w, h}, channels);
    for (int c = 0; c < channels; ++c)
        for (int i = 0; i < h; ++i)
            for (int j = 0; j < w; ++j)
                img.at(c, i, j) = static_cast<float>(
                    127.5 + 90.0 * std::sin(2.0 * std::numbers::pi * j / w + 0.3 * c) *
                                std::cos(std::numbers::pi * i / h));
    return img;
}

void BM_BuildRemapField(benchmark::State& state) {
    MobiusTransform f = MobiusTransform::rotation({0.0, 0.0, 1.0}, 30.0 * kRad);
    for (auto _ : state) {
        RemapField field = build_remap_field(f, kErp);
        benchmark::DoNotOptimize(field);
    }
    state.SetItemsProcessed(state.iterations() * kErp.w * kErp.h);
}
BENCHMARK(BM_BuildRemapField)->Unit(benchmark::kMillisecond);

void BM_WarpImageBilinear(benchmark::State& state) {
    const int channels = static_cast<int>(state.range(0));
    Grid img = smooth_image(kErp.w, kErp.h, channels);
    RemapField field =
        build_remap_field(MobiusTransform::rotation({0.0, 1.0, 0.0}, 30.0 * kRad), kErp);
    for (auto _ : state) {
        Grid out = warp_image(img, field, Interp::Bilinear);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * kErp.w * kErp.h * channels);
}
BENCHMARK(BM_WarpImageBilinear)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_WarpImageNearest(benchmark::State& state) {
    Grid img = smooth_image(kErp.w, kErp.h, 3);
    RemapField field =
        build_remap_field(MobiusTransform::rotation({0.0, 1.0, 0.0}, 30.0 * kRad), kErp);
    for (auto _ : state) {
        Grid out = warp_image(img, field, Interp::Nearest);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * kErp.w * kErp.h * 3);
}
BENCHMARK(BM_WarpImageNearest)->Unit(benchmark::kMillisecond);

// The fusion hot path: many-channel feature grids at backbone resolution.
void BM_TransformFeatures(benchmark::State& state) {
    const int channels = static_cast<int>(state.range(0));
    Grid fg = smooth_image(64, 32, channels);
    MobiusTransform f = MobiusTransform::zoom_about({0.0, 0.0, -1.0}, 1.2);
    for (auto _ : state) {
        Grid out = transform_features(fg, f);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * 64 * 32 * channels);
}
BENCHMARK(BM_TransformFeatures)->Arg(32)->Arg(256)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
