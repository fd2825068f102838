#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vcadslicer/contour.hpp"
#include "vcadslicer/geom.hpp"
#include "vcadslicer/palette.hpp"

namespace vcad {

// Planar subdivision of the input curves. Half-edges store the face on
// their left; bounded faces have a CCW outer cycle and CW hole cycles.
struct HalfEdge {
    int origin = -1;
    int twin = -1;
    int next = -1;
    int face = -1;
};

struct ArrFace {
    bool bounded = false;
    std::vector<int> outer;               // half-edge ids, empty for the unbounded face
    std::vector<std::vector<int>> holes;  // half-edge id cycles
};

struct Arrangement {
    std::vector<Vec2> verts;
    std::vector<HalfEdge> halves;
    std::vector<ArrFace> faces;
    int unbounded_face = -1;

    int target(int h) const { return halves[halves[h].twin].origin; }
    Ring cycle_ring(const std::vector<int>& cycle) const;
    int num_edges() const { return int(halves.size()) / 2; }

    // Structural checks: twins, next-orbit closure, and the Euler relation
    // V - E + F = 1 + C over the pruned subdivision.
    void validate() const;
};

Arrangement build_arrangement_from_segments(const std::vector<Segment2>& segments,
                                            double snap_tol = 1e-6);

// Overlays geometry polygons and material iso-curves. Closed material
// contours participate the same way open polylines do.
Arrangement build_arrangement(const Contour& geometry, const Contour& materials,
                              double snap_tol = 1e-6);

struct FaceGeometry {
    int face_id = -1;
    PolyWithHoles poly;
    Vec2 rep;     // deterministic interior point
    double area = 0.0;
};

// Bounded faces with interior representative points. Faces whose
// representative point fails inside_geometry (SDF > 0) are discarded;
// pass nullptr to keep everything.
std::vector<FaceGeometry> extract_bounded_faces(
    const Arrangement& arr, const std::function<bool(const Vec2&)>& inside_geometry = nullptr);

struct ColoredFace {
    int face_id = -1;
    PolyWithHoles poly;
    Vec2 rep;
    double area = 0.0;
    int color = 0;
    int band = -1;             // >= 0 when the face lies in a zipper overlap band
    bool merged_sliver = false;
};

// Bins each face's gradient value (sampled at the representative point)
// into a palette interval; faces below sliver_area are merged into the
// neighbour sharing the longest boundary. With a zipper, faces whose value
// falls inside an overlap band are tagged with the band index instead.
std::vector<ColoredFace> classify_faces(const Arrangement& arr,
                                        const std::vector<FaceGeometry>& faces,
                                        const std::function<double(const Vec2&)>& gradient,
                                        const Palette& palette, double sliver_area,
                                        const ZipperSpec* zipper = nullptr,
                                        WarningLog* warnings = nullptr);

// Boundary of the union of kept faces, walked with the kept region on the
// left; used by polygon insetting and face merging.
std::vector<PolyWithHoles> face_union_boundary(const Arrangement& arr,
                                               const std::vector<char>& keep_face);

// Largest-triangle centroid of an ear-clipped triangulation (holes bridged
// into the outer ring); falls back to a scanline midpoint if clipping
// stalls on degenerate input.
Vec2 representative_point(const PolyWithHoles& poly);

std::string faces_to_svg(const std::vector<ColoredFace>& faces,
                         const std::vector<std::array<double, 3>>& color_rgb);

} // namespace vcad
