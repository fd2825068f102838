#pragma once

#include <functional>
#include <vector>

#include "vcadslicer/errors.hpp"
#include "vcadslicer/geom.hpp"

namespace vcad {

// Default stitching tolerance for desktop-scale printing, in mm.
inline constexpr double kStitchTol = 1e-6;

struct ScalarGrid {
    Vec2 origin;
    double cell = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> values; // row-major, index = iy * nx + ix

    double at(int ix, int iy) const { return values[size_t(iy) * nx + ix]; }
    Vec2 point(int ix, int iy) const { return {origin.x + ix * cell, origin.y + iy * cell}; }
};

struct Segment2 {
    Vec2 a, b;
};

struct Contour {
    std::vector<Ring> polygons;      // closed, >=3 vertices, nonzero area
    std::vector<Polyline> polylines; // open, >=2 vertices
};

using ScalarField2 = std::function<double(double x, double y)>;

// Samples field(x, y) on a grid covering bbox inclusively. The caller is
// expected to inflate bbox ~2 cells beyond the geometry so that material
// iso-lines terminate outside the part.
ScalarGrid sample_grid(const ScalarField2& field, const BBox2& bbox, double resolution);

// Cell-by-cell lookup-table contouring with linear interpolation. Saddle
// cells are disambiguated by sampling `field` at the cell centre when
// provided, otherwise by the corner average (the bilinear centre value).
// Inside (value < iso) lies to the left of each emitted segment.
std::vector<Segment2> marching_squares(const ScalarGrid& grid, double iso,
                                       const ScalarField2& field = nullptr);

// Fuzzy-merges endpoints within tol, walks connected components, and emits
// cycles as closed polygons and chains as open polylines. Segments shorter
// than tol are dropped with a warning.
Contour stitch_segments(const std::vector<Segment2>& segments, double tol = kStitchTol,
                        WarningLog* warnings = nullptr);

double hausdorff_distance(const Ring& a, const Ring& b);

} // namespace vcad
