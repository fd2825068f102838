#pragma once

#include <vector>

#include "vcadslicer/arrangement.hpp"
#include "vcadslicer/geom.hpp"

namespace vcad {

enum class PathRole { perimeter, infill, skin, purge };

struct ToolPath {
    Polyline points;
    PathRole role = PathRole::perimeter;
    bool closed = false;

    double length() const {
        double len = polyline_length(points);
        if (closed && points.size() > 1)
            len += (points.front() - points.back()).norm();
        return len;
    }
};

struct PrintSettings {
    double layer_height = 0.2; // h, mm
    double bead_width = 0.4;   // w, mm
    int perimeters = 3;
    double infill_density = 1.0;  // (0, 1]
    double infill_angle = 0.0;    // degrees
    double min_segment = 5.0;     // mm; shorter clipped pieces warn
    double resolution = 0.1;      // XY field sampling, default w/4
    bool concentric = true;       // strategy-2 fill style

    void check() const {
        if (layer_height <= 0 || bead_width < layer_height)
            throw Error(errc::invalid_bead,
                        "bead width must be >= layer height > 0 (capsule model)");
        if (infill_density <= 0 || infill_density > 1)
            throw Error(errc::config, "infill density must be in (0, 1]");
        if (resolution <= 0)
            throw Error(errc::resolution, "resolution must be positive");
    }
};

// Inward offset by d (union semantics for self-intersecting raw offsets,
// miter joins with limit 2 falling back to bevel). Result may split into
// several polygons or vanish.
std::vector<PolyWithHoles> inset_region(const std::vector<PolyWithHoles>& region, double d);

// k-th perimeter at inward offset (k + 0.5) w; loops around holes included.
std::vector<ToolPath> generate_perimeters(const PolyWithHoles& outline, int count, double w);

// Parallel hatch at the given angle clipped to the region, serpentine-
// connected where the connector stays inside.
std::vector<ToolPath> rectilinear_infill(const PolyWithHoles& region, double spacing,
                                         double angle_deg);

// Concentric loops: boundary of inset 0.5 w, then successive insets by w.
std::vector<ToolPath> concentric_fill(const PolyWithHoles& region, double w,
                                      WarningLog* warnings = nullptr);

struct LabeledPath {
    ToolPath path;
    int color = 0;
    int band = -1;     // zipper band id when the piece lies in an overlap face
    int gen_index = 0; // generation order across the layer
};

// Splits paths at face-boundary crossings and labels each piece with the
// color of the face containing its arc-length midpoint.
std::vector<LabeledPath> clip_paths_to_faces(const std::vector<ToolPath>& paths,
                                             const std::vector<ColoredFace>& faces,
                                             double min_segment = 5.0,
                                             WarningLog* warnings = nullptr);

} // namespace vcad
