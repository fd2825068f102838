#include <benchmark/benchmark.h>

#include <cmath>

#include "vcadslicer/contour.hpp"

using namespace vcad;

namespace {

ScalarField2 blob_field() {
    return [](double x, double y) {
        double r = std::sqrt(x * x + y * y);
        return r - (20.0 + 4.0 * std::sin(5.0 * std::atan2(y, x)));
    };
}

} // namespace

static void BM_sample_grid(benchmark::State& state) {
    double res = 1.0 / double(state.range(0));
    ScalarField2 field = blob_field();
    BBox2 box{{-26, -26}, {26, 26}};
    for (auto _ : state) {
        ScalarGrid grid = sample_grid(field, box, res);
        benchmark::DoNotOptimize(grid.values.data());
    }
}
BENCHMARK(BM_sample_grid)->Arg(2)->Arg(5)->Arg(10);

static void BM_marching_squares(benchmark::State& state) {
    double res = 1.0 / double(state.range(0));
    ScalarField2 field = blob_field();
    BBox2 box{{-26, -26}, {26, 26}};
    ScalarGrid grid = sample_grid(field, box, res);
    for (auto _ : state) {
        auto segs = marching_squares(grid, 0.0, field);
        benchmark::DoNotOptimize(segs.data());
    }
}
BENCHMARK(BM_marching_squares)->Arg(2)->Arg(5)->Arg(10);

static void BM_stitch(benchmark::State& state) {
    double res = 1.0 / double(state.range(0));
    ScalarField2 field = blob_field();
    BBox2 box{{-26, -26}, {26, 26}};
    ScalarGrid grid = sample_grid(field, box, res);
    auto segs = marching_squares(grid, 0.0, field);
    for (auto _ : state) {
        Contour c = stitch_segments(segs);
        benchmark::DoNotOptimize(c.polygons.data());
    }
}
BENCHMARK(BM_stitch)->Arg(2)->Arg(5)->Arg(10);
