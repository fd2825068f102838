#include <benchmark/benchmark.h>

#include <cmath>

#include "vcadslicer/arrangement.hpp"

using namespace vcad;

namespace {

Contour disk_with_spokes(int ring_points, int spokes) {
    Contour geometry;
    Ring ring;
    for (int i = 0; i < ring_points; ++i) {
        double a = 2 * M_PI * i / ring_points;
        ring.push_back({30 * std::cos(a), 30 * std::sin(a)});
    }
    geometry.polygons.push_back(ring);
    for (int s = 0; s < spokes; ++s) {
        double a = M_PI * s / spokes;
        Vec2 dir{std::cos(a), std::sin(a)};
        geometry.polylines.push_back({dir * -32.0, dir * 32.0});
    }
    return geometry;
}

} // namespace

static void BM_build_arrangement(benchmark::State& state) {
    Contour fixture = disk_with_spokes(int(state.range(0)), int(state.range(1)));
    Contour geometry;
    geometry.polygons = fixture.polygons;
    Contour materials;
    materials.polylines = fixture.polylines;
    for (auto _ : state) {
        Arrangement arr = build_arrangement(geometry, materials);
        benchmark::DoNotOptimize(arr.faces.size());
    }
}
BENCHMARK(BM_build_arrangement)->Args({128, 4})->Args({512, 8})->Args({2048, 16});

static void BM_extract_and_classify(benchmark::State& state) {
    Contour fixture = disk_with_spokes(int(state.range(0)), int(state.range(1)));
    Contour geometry;
    geometry.polygons = fixture.polygons;
    Contour materials;
    materials.polylines = fixture.polylines;
    Arrangement arr = build_arrangement(geometry, materials);
    Palette palette = build_palette(8, {"a", "b"});
    auto grad = [](const Vec2& p) { return std::clamp((p.x + 30) / 60.0, 0.0, 1.0); };
    for (auto _ : state) {
        auto faces = extract_bounded_faces(arr, [](const Vec2& p) { return p.norm() < 30; });
        auto colored = classify_faces(arr, faces, grad, palette, 0.04);
        benchmark::DoNotOptimize(colored.size());
    }
}
BENCHMARK(BM_extract_and_classify)->Args({512, 8})->Args({2048, 16});
