#pragma once

#include <string>
#include <vector>

#include "vcadslicer/machine.hpp"
#include "vcadslicer/strategy.hpp"

namespace vcad {

// Capsule cross-section of a deposited track: a (w - h) x h rectangle with
// two half-circle caps of radius h/2. A = h (w - h) + pi h^2 / 4.
double capsule_area(double h, double w);

// Extrusion path length that displaces v_melt through the nozzle:
// L = V_melt / A.
double lookahead_distance(double v_melt, double h, double w);

// Foaming-filament flow compensation (percent) as a function of nozzle
// temperature; cubic for PLA, quadratic for TPU. Valid on 180..240 degC.
double flow_percent(double temperature_c, FlowPoly material);

struct GcodeOptions {
    bool comments = true; // ; layer markers
};

// Marlin-dialect emission: absolute E with per-layer G92 E0, fixed-point
// coordinates (3 decimals) and E (5 decimals). CommandState events render
// as M165 A/B, T<n>, or M104 + M221 (flow from flow_percent).
std::string emit_gcode(const std::vector<LayerPlan>& plans, const MachineProfile& profile,
                       const PrintSettings& settings, const GcodeOptions& options = {});

// Internal reader for round-trip checks and simulation of foreign G-code.
struct GcodeMove {
    bool extruding = false;
    Vec2 from, to;   // bed coordinates
    double z = 0.0;
    double e_delta = 0.0; // filament mm
    double feed = 0.0;    // mm/min
};

struct GcodeEventRec {
    size_t before_move = 0; // index into moves
    CommandState state;
};

struct GcodeProgram {
    std::vector<GcodeMove> moves;
    std::vector<GcodeEventRec> events;
    double total_e = 0.0; // sum of positive extrusion deltas
    int layer_changes = 0;
};

GcodeProgram parse_gcode(const std::string& text, const MachineProfile& profile);

// Per-layer preview. Commanded mode colors segments by the active state;
// simulated mode takes realized fractions supplied per extrusion move.
enum class SvgMode { commanded, simulated };

std::string emit_layer_svg(const LayerPlan& plan, const MachineProfile& profile,
                           const std::vector<std::string>& materials, SvgMode mode,
                           const std::vector<double>* realized_fractions = nullptr);

} // namespace vcad
