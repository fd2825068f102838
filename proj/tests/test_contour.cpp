#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vcadslicer/contour.hpp"

using namespace vcad;

namespace {

ScalarField2 circle_sdf(double r) {
    return [r](double x, double y) { return std::sqrt(x * x + y * y) - r; };
}

ScalarGrid grid_from(std::initializer_list<double> vals, int nx, int ny) {
    ScalarGrid g;
    g.origin = {0, 0};
    g.cell = 1.0;
    g.nx = nx;
    g.ny = ny;
    g.values.assign(vals);
    return g;
}

} // namespace

TEST_CASE("sample_grid covers the bbox inclusively") {
    BBox2 box{{0, 0}, {10, 10}};
    ScalarGrid g = sample_grid([](double, double) { return 1.0; }, box, 1.0);
    CHECK(g.nx == 11);
    CHECK(g.ny == 11);
    for (double v : g.values)
        CHECK(v == 1.0);

    ScalarGrid gx = sample_grid([](double x, double) { return x; }, box, 1.0);
    for (int j = 0; j < gx.nx; ++j)
        CHECK(gx.at(j, 3) == doctest::Approx(double(j)));
}

TEST_CASE("sample_grid rejects bad resolutions") {
    BBox2 box{{0, 0}, {10, 10}};
    CHECK_THROWS_AS(sample_grid([](double, double) { return 0.0; }, box, 0.0), Error);
    CHECK_THROWS_AS(sample_grid([](double, double) { return 0.0; }, box, -1.0), Error);
    CHECK_THROWS_AS(sample_grid([](double, double) { return 0.0; }, box, 11.0), Error);
}

TEST_CASE("circle SDF minimum near the centre") {
    BBox2 box{{-6, -6}, {6, 6}};
    ScalarGrid g = sample_grid(circle_sdf(5.0), box, 0.1);
    double min_v = *std::min_element(g.values.begin(), g.values.end());
    CHECK(min_v == doctest::Approx(-5.0).epsilon(0.01));
}

TEST_CASE("marching squares: no crossing, no output") {
    ScalarGrid g = grid_from({1, 1, 1, 1}, 2, 2);
    CHECK(marching_squares(g, 0.0).empty());
}

TEST_CASE("marching squares: single corner cut at symmetric midpoints") {
    // values: (0,0)=-1, others +1 -> one segment crossing the corner cell
    ScalarGrid g = grid_from({-1, 1, 1, 1}, 2, 2);
    auto segs = marching_squares(g, 0.0);
    REQUIRE(segs.size() == 1);
    // interpolated at t = 0.5 on both incident edges
    Vec2 lo = segs[0].a, hi = segs[0].b;
    if (lex_less(hi, lo))
        std::swap(lo, hi);
    CHECK(lo.x == doctest::Approx(0.0));
    CHECK(lo.y == doctest::Approx(0.5));
    CHECK(hi.x == doctest::Approx(0.5));
    CHECK(hi.y == doctest::Approx(0.0));
}

TEST_CASE("marching squares endpoints interpolate the field to the iso value") {
    BBox2 box{{-6.03, -6.01}, {6.02, 6.04}};
    ScalarGrid g = sample_grid(circle_sdf(5.0), box, 0.37);
    auto segs = marching_squares(g, 0.0);
    REQUIRE(!segs.empty());
    auto check_point = [&](const Vec2& p) {
        // locate the grid edge the point sits on and linearly interpolate
        double fx = (p.x - g.origin.x) / g.cell;
        double fy = (p.y - g.origin.y) / g.cell;
        bool on_vertical = std::abs(fx - std::round(fx)) < 1e-9;
        bool on_horizontal = std::abs(fy - std::round(fy)) < 1e-9;
        REQUIRE((on_vertical || on_horizontal));
        if (on_vertical && !on_horizontal) {
            int ix = int(std::round(fx));
            int iy = int(std::floor(fy));
            double va = g.at(ix, iy), vb = g.at(ix, iy + 1);
            double t = fy - iy;
            CHECK(va + t * (vb - va) == doctest::Approx(0.0).epsilon(1e-9));
        } else if (on_horizontal && !on_vertical) {
            int iy = int(std::round(fy));
            int ix = int(std::floor(fx));
            double va = g.at(ix, iy), vb = g.at(ix + 1, iy);
            double t = fx - ix;
            CHECK(va + t * (vb - va) == doctest::Approx(0.0).epsilon(1e-9));
        }
    };
    for (size_t i = 0; i < segs.size(); i += 7) {
        check_point(segs[i].a);
        check_point(segs[i].b);
    }
}

TEST_CASE("circle contour: closed, perimeter within 1% of 2 pi r") {
    BBox2 box{{-6, -6}, {6, 6}};
    ScalarGrid g = sample_grid(circle_sdf(5.0), box, 0.1);
    auto segs = marching_squares(g, 0.0, circle_sdf(5.0));
    Contour c = stitch_segments(segs);
    CHECK(c.polygons.size() == 1);
    CHECK(c.polylines.empty());
    double perimeter = ring_perimeter(c.polygons[0]);
    CHECK(perimeter == doctest::Approx(2 * M_PI * 5.0).epsilon(0.01));
    // marching squares contours of an SDF are CCW around the inside
    CHECK(ring_signed_area(c.polygons[0]) > 0);
}

TEST_CASE("saddle cells split consistently with the centre sample") {
    // checkerboard: corners inside at opposite diagonal
    ScalarGrid g = grid_from({-1, 1, 1, -1}, 2, 2);
    auto field_neg = [](double, double) { return -0.1; };
    auto field_pos = [](double, double) { return 0.1; };
    auto joined = marching_squares(g, 0.0, field_neg);
    auto split = marching_squares(g, 0.0, field_pos);
    CHECK(joined.size() == 2);
    CHECK(split.size() == 2);
    // crossing points sit at edge midpoints; the pairing differs: with the
    // centre inside, the left-edge point (0, 0.5) pairs with the top point
    // (0.5, 1); with it outside, it pairs with the bottom point (0.5, 0)
    auto partner_of_left = [](const std::vector<Segment2>& segs) {
        for (const Segment2& s : segs) {
            if (s.a.x == 0.0)
                return s.b;
            if (s.b.x == 0.0)
                return s.a;
        }
        return Vec2{-1, -1};
    };
    CHECK(partner_of_left(joined).y == doctest::Approx(1.0));
    CHECK(partner_of_left(split).y == doctest::Approx(0.0));
}

TEST_CASE("stitching a shuffled unit square") {
    std::vector<Segment2> segs = {
        {{0, 0}, {1, 0}},
        {{1, 0}, {1, 1}},
        {{1, 1}, {0, 1}},
        {{0, 1}, {0, 0}},
    };
    std::mt19937 rng(7);
    for (int trial = 0; trial < 8; ++trial) {
        std::shuffle(segs.begin(), segs.end(), rng);
        Contour c = stitch_segments(segs);
        REQUIRE(c.polygons.size() == 1);
        CHECK(c.polygons[0].size() == 4);
        CHECK(c.polylines.empty());
        CHECK(std::abs(ring_signed_area(c.polygons[0])) == doctest::Approx(1.0));
        // canonical start: lexicographically smallest vertex
        CHECK(c.polygons[0][0] == Vec2{0, 0});
    }
}

TEST_CASE("disjoint chains come back as open polylines") {
    std::vector<Segment2> segs = {
        {{0, 0}, {1, 0}},
        {{2, 0}, {3, 0}},
    };
    Contour c = stitch_segments(segs);
    CHECK(c.polygons.empty());
    CHECK(c.polylines.size() == 2);
}

TEST_CASE("degenerate segments are dropped with a warning") {
    std::vector<Segment2> segs = {
        {{0, 0}, {1e-9, 0}},
        {{0, 0}, {1, 0}},
    };
    WarningLog log;
    Contour c = stitch_segments(segs, 1e-6, &log);
    CHECK(c.polylines.size() == 1);
    CHECK(!log.empty());
}

TEST_CASE("stitching is permutation invariant") {
    BBox2 box{{-6, -6}, {6, 6}};
    ScalarGrid g = sample_grid(circle_sdf(5.0), box, 0.25);
    auto segs = marching_squares(g, 0.0);
    Contour ref = stitch_segments(segs);
    REQUIRE(ref.polygons.size() == 1);
    std::mt19937 rng(42);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(segs.begin(), segs.end(), rng);
        Contour got = stitch_segments(segs);
        REQUIRE(got.polygons.size() == 1);
        REQUIRE(got.polygons[0].size() == ref.polygons[0].size());
        for (size_t i = 0; i < ref.polygons[0].size(); ++i) {
            CHECK(got.polygons[0][i].x == ref.polygons[0][i].x);
            CHECK(got.polygons[0][i].y == ref.polygons[0][i].y);
        }
    }
}

TEST_CASE("SDF fields sampled 2 cells beyond the zero set close up") {
    // ellipse-ish blob
    ScalarField2 blob = [](double x, double y) {
        return std::sqrt(x * x / 4 + y * y) - 2.0;
    };
    for (double res : {0.4, 0.2, 0.11}) {
        BBox2 box{{-4 - 2 * res, -2 - 2 * res}, {4 + 2 * res, 2 + 2 * res}};
        ScalarGrid g = sample_grid(blob, box, res);
        Contour c = stitch_segments(marching_squares(g, 0.0, blob));
        CHECK(c.polylines.empty());
        CHECK(c.polygons.size() == 1);
    }
}

TEST_CASE("doubling resolution does not worsen Hausdorff distance to a fine reference") {
    ScalarField2 field = circle_sdf(5.0);
    auto contour_at = [&](double res) {
        BBox2 box{{-6, -6}, {6, 6}};
        ScalarGrid g = sample_grid(field, box, res);
        Contour c = stitch_segments(marching_squares(g, 0.0, field));
        REQUIRE(c.polygons.size() == 1);
        return c.polygons[0];
    };
    Ring reference = contour_at(0.05); // 4x fine
    double coarse = hausdorff_distance(contour_at(0.4), reference);
    double fine = hausdorff_distance(contour_at(0.2), reference);
    CHECK(fine <= coarse + 1e-9);
}
