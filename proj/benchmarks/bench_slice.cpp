#include <benchmark/benchmark.h>

#include "vcadslicer/job.hpp"
#include "vcadslicer/strategy.hpp"

using namespace vcad;

namespace {

const char* kBenchPlate =
    "fgrade([\"(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2\","
    "\"1-(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2\"],"
    "[\"blue\", \"yellow\"]) { rectprism(60, 40, 2); }";

} // namespace

static void BM_layer_geometry(benchmark::State& state) {
    Design design = parse_design(kBenchPlate);
    SliceInputs in;
    in.design = &design;
    in.settings.perimeters = 1;
    in.palette = build_palette(int(state.range(1)), design_materials(design));
    in.profile = default_profile(SyntaxClass::mix);
    in.strategy = int(state.range(0));
    in.bbox = design_bbox(design);
    for (auto _ : state) {
        LayerGeometry geo = compute_layer_geometry(in, 3);
        benchmark::DoNotOptimize(geo.faces.size());
    }
}
BENCHMARK(BM_layer_geometry)
    ->Args({1, 4})
    ->Args({1, 16})
    ->Args({2, 12})
    ->Args({2, 48})
    ->Unit(benchmark::kMillisecond);

static void BM_full_slice(benchmark::State& state) {
    for (auto _ : state) {
        SliceJob job;
        job.design_text = kBenchPlate;
        job.strategy = int(state.range(0));
        job.colors = int(state.range(1));
        job.settings.perimeters = 1;
        job.settings.min_segment = 1.0;
        SliceResult r = run_slice(job);
        benchmark::DoNotOptimize(r.gcode.size());
    }
}
BENCHMARK(BM_full_slice)->Args({1, 8})->Args({2, 8})->Unit(benchmark::kMillisecond);
