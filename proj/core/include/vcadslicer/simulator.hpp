#pragma once

#include <vector>

#include "vcadslicer/design.hpp"
#include "vcadslicer/gcode.hpp"
#include "vcadslicer/strategy.hpp"

namespace vcad {

// Chamber transfer models: plug_flow delays composition by exactly V_melt
// of displaced volume (FIFO); perfect_mix relaxes exponentially,
// c += (1 - exp(-dV/V_melt)) (c_in - c) per move.
enum class ChamberKind { plug_flow, perfect_mix };

struct ChamberModel {
    ChamberKind kind = ChamberKind::plug_flow;
    double v_melt = 0.0;
};

struct SimMove {
    enum Kind { travel, extrude, event } kind = travel;
    Vec2 from, to;
    double volume = 0.0; // mm^3 through the nozzle (extrude)
    double value = 0.0;  // commanded gradient fraction (event)
    double feed = 0.0;   // mm/min, for time-domain models
    int source_move = -1; // index of the originating extrusion move
};

struct RealizedSegment {
    Vec2 from, to;
    double volume = 0.0;
    double commanded = 0.0;
    double realized = 0.0;
    int source_move = -1;
};

std::vector<SimMove> moves_from_plans(const std::vector<LayerPlan>& plans,
                                      const PrintSettings& settings);
std::vector<SimMove> moves_from_gcode(const GcodeProgram& program,
                                      const MachineProfile& profile);

std::vector<RealizedSegment> simulate(const std::vector<SimMove>& moves,
                                      const ChamberModel& model);

// First-order thermal lag preview for temperature-class machines; tau in
// seconds, move duration from length/feed.
std::vector<RealizedSegment> simulate_thermal(const std::vector<SimMove>& moves, double tau_s);

// Signed x offset between the first realized crossing of fraction 0.5 and
// the designed boundary. Throws NoTransition when the composition never
// crosses.
double realized_boundary_error(const std::vector<RealizedSegment>& segments, double designed_x);
// Designed boundary located on the design's gradient field at height z.
double realized_boundary_error(const std::vector<RealizedSegment>& segments,
                               const Design& design, double z);

// Serpentine half-and-half calibration part: passes of length pass_length
// along y stepping one bead in x, commanded composition flips at x = 0.
struct CalibrationObject {
    double length_x = 40.0;   // mm across the gradient
    double pass_length = 60.0; // L_y
    double bead = 0.4;        // w
    double layer_height = 0.2;
};

std::vector<LayerPlan> build_calibration_plans(const CalibrationObject& calib,
                                               double lookahead_mm,
                                               WarningLog* warnings = nullptr);

// Iterative refinement: slice, simulate, measure the error e_x, update
// L by ceil(e_x / w) * L_y until |e_x| < w.
double calibrate_lookahead(const MachineProfile& profile, const CalibrationObject& calib,
                           int max_iters, WarningLog* warnings = nullptr);

} // namespace vcad
