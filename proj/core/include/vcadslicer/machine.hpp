#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "vcadslicer/geom.hpp"
#include "vcadslicer/palette.hpp"

namespace vcad {

enum class FlowPoly { none, pla, tpu };

// Printer description: command syntax class, melt-chamber volume, bed and
// temperature limits, plus start/end G-code templates.
struct MachineProfile {
    SyntaxClass syntax = SyntaxClass::mix;
    double v_melt = 0.0;             // mm^3 of dead volume
    double lookahead = -1.0;         // mm; negative means "auto" (V_melt / A)
    double filament_diameter = 1.75; // mm
    double bed_x = 300.0, bed_y = 300.0;
    double temp_low = 190.0, temp_high = 225.0; // degC mapping for m = 0..1
    double temp_min = 170.0, temp_max = 260.0;  // machine limits
    FlowPoly flow_poly = FlowPoly::none;
    int tool_count = 5;
    double print_feed = 2400.0;  // mm/min
    double travel_feed = 6000.0; // mm/min
    double z_feed = 600.0;       // mm/min
    std::string start_gcode;
    std::string end_gcode;
    std::vector<Vec2> purge_locations; // bed coordinates; auto-layout when empty
    double purge_spacing = 0.4;        // tower fill spacing, mm
    // minimum fraction delta that triggers a purge tower; 0 purges on any
    // state change
    double purge_threshold = 0.0;
    double filament_density = 0.00124; // g/mm^3
    double thermal_tau = 8.0;          // s, first-order lag for previews
    std::map<std::string, std::array<double, 3>> material_rgb;

    bool lookahead_auto() const { return lookahead < 0.0; }
};

// Plain-text profile: `key = value` lines, '#' comments, and heredoc
// templates (`start_gcode = <<<` ... `>>>`).
MachineProfile parse_profile(const std::string& text, const std::string& origin = "<profile>");
MachineProfile load_profile(const std::string& path);

MachineProfile default_profile(SyntaxClass syntax = SyntaxClass::mix);

// ${key} substitution over the template using profile-derived values.
std::string expand_template(const std::string& tpl, const MachineProfile& profile);

// Display color for a material name; blends are computed per fraction.
std::array<double, 3> material_color(const MachineProfile& profile, const std::string& name);

} // namespace vcad
