#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "vcadslicer/arrangement.hpp"
#include "vcadslicer/design.hpp"
#include "vcadslicer/machine.hpp"
#include "vcadslicer/palette.hpp"
#include "vcadslicer/toolpath.hpp"

namespace vcad {

struct StateEvent {
    CommandState state;
    int color = 0;
};

struct TravelMove {
    Vec2 from, to;
};

struct ExtrudeMove {
    Polyline points; // open; closed loops are unrolled at assembly
    PathRole role = PathRole::perimeter;
    int color = 0;

    double length() const { return polyline_length(points); }
};

using PlanItem = std::variant<StateEvent, TravelMove, ExtrudeMove>;

struct LayerPlan {
    int index = 0;
    double z = 0.0;       // field sampling height (mid-layer)
    double print_z = 0.0; // physical top of layer
    std::vector<PlanItem> items;

    double extrusion_length() const;
};

struct PurgeTowerSpec {
    std::vector<Vec2> locations; // design coordinates, one per palette color
    double side = 0.0;           // mm
    double spacing = 0.4;        // fill spacing
    double purge_length = 0.0;   // V_melt / capsule area, mm of path per purge
};

// Inputs shared by every layer; immutable during slicing.
struct SliceInputs {
    const Design* design = nullptr;
    PrintSettings settings;
    Palette palette;
    ZipperSpec zipper; // beta = 0 disables zippering
    MachineProfile profile;
    int strategy = 1;
    BBox3 bbox;     // design bounds
    int components = 2;
};

// Cross-layer machine state carried through sequential plan assembly.
struct SliceState {
    std::optional<CommandState> state;
    Vec2 position{0, 0};
    bool has_position = false;
};

// Per-layer geometry products; pure function of (inputs, layer), safe to
// compute for many layers in parallel.
struct LayerGeometry {
    int index = 0;
    double z = 0.0;
    double print_z = 0.0;
    std::vector<ColoredFace> faces;
    double cross_section_area = 0.0;
    // strategy 1: clipped+zippered labeled paths in generation order
    std::vector<LabeledPath> labeled;
    // strategy 2: per-face fills, face order
    std::vector<std::pair<int, std::vector<ToolPath>>> fills;
    WarningLog warnings;
};

int layer_count(const BBox3& bbox, double layer_height);
double layer_z(const BBox3& bbox, double layer_height, int index);

LayerGeometry compute_layer_geometry(const SliceInputs& in, int layer_index);

// Orders color groups by traversal_order, emits state-change events, and
// threads travel moves; purge towers are inserted afterwards (strategy 1).
LayerPlan assemble_layer_plan(const LayerGeometry& geo, const SliceInputs& in, SliceState& state);

// Algorithm: preserve traditional toolpaths, sectioned by color, ordered,
// with purge towers on state changes.
LayerPlan slice_layer_strategy1(const SliceInputs& in, SliceState& state, int layer_index,
                                const PurgeTowerSpec& towers);

// Algorithm: continuous printing against the gradient; faces inset by half
// a bead and densely filled, no purge towers.
LayerPlan slice_layer_strategy2(const SliceInputs& in, SliceState& state, int layer_index);

// Alternates band pieces between the two adjacent colors in generation
// order (even index -> lower color).
std::vector<LabeledPath> apply_zippering(std::vector<LabeledPath> paths,
                                         const ZipperSpec& zipper, const Palette& palette);

PurgeTowerSpec plan_purge_towers(const SliceInputs& in);

// Adds a tower print right after each state event whose fraction delta
// from the incoming machine state exceeds the profile's purge threshold
// (default 0: purge on any change).
LayerPlan insert_purge_towers(const LayerPlan& plan, const PurgeTowerSpec& towers,
                              const SliceInputs& in,
                              std::optional<double> incoming_fraction = std::nullopt);

// Relocates every CommandState event L mm of extruded path earlier,
// splitting the move it lands inside; events pushed before the print start
// clamp to the start with a warning.
std::vector<LayerPlan> apply_lookahead(std::vector<LayerPlan> plans, double distance_mm,
                                       WarningLog* warnings = nullptr);

} // namespace vcad
