#include "vcadslicer/gcode.hpp"

#include <cmath>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace vcad {

double capsule_area(double h, double w) {
    if (h <= 0 || w < h)
        throw Error(errc::invalid_bead,
                    "capsule model needs w >= h > 0 (h=" + std::to_string(h) +
                        ", w=" + std::to_string(w) + ")");
    return h * (w - h) + M_PI * h * h / 4.0;
}

double lookahead_distance(double v_melt, double h, double w) {
    if (v_melt < 0)
        throw Error(errc::out_of_range, "melt volume must be >= 0");
    return v_melt / capsule_area(h, w);
}

double flow_percent(double temperature_c, FlowPoly material) {
    if (temperature_c < 180.0 || temperature_c > 240.0)
        throw Error(errc::out_of_range,
                    "flow compensation is calibrated for 180..240 degC, got " +
                        std::to_string(temperature_c));
    double t = temperature_c;
    switch (material) {
    case FlowPoly::pla:
        return 100.0 * (8.35479e-6 * t * t * t - 5.37075e-3 * t * t + 1.13374 * t - 77.814);
    case FlowPoly::tpu:
        return 100.0 * (3.09637e-4 * t * t - 1.38401e-1 * t + 15.9560);
    case FlowPoly::none:
        return 100.0;
    }
    return 100.0;
}

namespace {

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string fmt_e(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.5f", v);
    return buf;
}

std::string fmt_mix(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// temperatures print without trailing .0 (M104 S225, M104 S207.5)
std::string fmt_temp(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    std::string s = buf;
    if (s.size() > 2 && s.substr(s.size() - 2) == ".0")
        s.resize(s.size() - 2);
    return s;
}

std::string fmt_flow(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

std::string render_state(const CommandState& s, const MachineProfile& profile) {
    switch (s.kind) {
    case SyntaxClass::mix: {
        double a = s.mix_a, b = s.mix_b;
        double sum = a + b;
        if (sum > 0) {
            a /= sum;
            b /= sum;
        }
        return "M165 A" + fmt_mix(a) + " B" + fmt_mix(b) + "\n";
    }
    case SyntaxClass::multitool:
        return "T" + std::to_string(s.tool) + "\n";
    case SyntaxClass::temperature: {
        std::string out = "M104 S" + fmt_temp(s.temperature) + "\n";
        if (profile.flow_poly != FlowPoly::none)
            out += "M221 T0 S" + fmt_flow(flow_percent(s.temperature, profile.flow_poly)) + "\n";
        return out;
    }
    }
    return "";
}

} // namespace

std::string emit_gcode(const std::vector<LayerPlan>& plans, const MachineProfile& profile,
                       const PrintSettings& settings, const GcodeOptions& options) {
    double area = capsule_area(settings.layer_height, settings.bead_width);
    double fil_r = profile.filament_diameter / 2.0;
    double fil_area = M_PI * fil_r * fil_r;
    double e_per_mm = area / fil_area;
    Vec2 bed_center{profile.bed_x / 2.0, profile.bed_y / 2.0};

    std::string out;
    out.reserve(1 << 20);
    out += "; vcadslicer gcode\n";
    out += "M82\n";
    out += expand_template(profile.start_gcode, profile);
    if (!out.empty() && out.back() != '\n')
        out += '\n';

    bool state_seen = false;
    double feed_active = -1.0;
    Vec2 position{0, 0};
    bool have_position = false;
    auto move_line = [&](const char* cmd, const Vec2& p, double feed, const double* e) {
        Vec2 bp = p + bed_center;
        if (bp.x < -1e-6 || bp.y < -1e-6 || bp.x > profile.bed_x + 1e-6 ||
            bp.y > profile.bed_y + 1e-6)
            throw Error(errc::bed_bounds,
                        "move to (" + fmt_coord(bp.x) + ", " + fmt_coord(bp.y) +
                            ") leaves the " + fmt_coord(profile.bed_x) + " x " +
                            fmt_coord(profile.bed_y) + " bed");
        std::string line = cmd;
        line += " X" + fmt_coord(bp.x) + " Y" + fmt_coord(bp.y);
        if (e)
            line += " E" + fmt_e(*e);
        if (feed != feed_active) {
            line += " F" + fmt_coord(feed);
            feed_active = feed;
        }
        out += line;
        out += '\n';
    };

    for (const LayerPlan& plan : plans) {
        if (options.comments)
            out += "; layer " + std::to_string(plan.index) + " z " + fmt_coord(plan.print_z) +
                   "\n";
        out += "G1 Z" + fmt_coord(plan.print_z) + " F" + fmt_coord(profile.z_feed) + "\n";
        feed_active = profile.z_feed;
        out += "G92 E0\n";
        double e = 0.0;
        for (const PlanItem& item : plan.items) {
            if (const auto* ev = std::get_if<StateEvent>(&item)) {
                out += render_state(ev->state, profile);
                state_seen = true;
            } else if (const auto* tr = std::get_if<TravelMove>(&item)) {
                move_line("G0", tr->to, profile.travel_feed, nullptr);
                position = tr->to;
                have_position = true;
            } else if (const auto* ex = std::get_if<ExtrudeMove>(&item)) {
                if (!state_seen)
                    throw Error(errc::state_missing,
                                "extrusion before any command state on layer " +
                                    std::to_string(plan.index));
                if (ex->points.empty())
                    continue;
                // reposition when the plan lacks an explicit travel here
                if (!have_position || (position - ex->points.front()).norm() > 1e-6) {
                    move_line("G0", ex->points.front(), profile.travel_feed, nullptr);
                    have_position = true;
                }
                for (size_t i = 1; i < ex->points.size(); ++i) {
                    double len = (ex->points[i] - ex->points[i - 1]).norm();
                    if (len <= 0)
                        continue;
                    e += len * e_per_mm;
                    move_line("G1", ex->points[i], profile.print_feed, &e);
                }
                position = ex->points.back();
            }
        }
    }
    out += expand_template(profile.end_gcode, profile);
    if (!out.empty() && out.back() != '\n')
        out += '\n';
    return out;
}

GcodeProgram parse_gcode(const std::string& text, const MachineProfile& profile) {
    GcodeProgram prog;
    std::istringstream in(text);
    std::string line;
    double x = 0, y = 0, z = 0, e = 0, feed = 0;
    bool have_xy = false;
    double last_z = -1;
    while (std::getline(in, line)) {
        size_t comment = line.find(';');
        if (comment != std::string::npos)
            line = line.substr(0, comment);
        std::istringstream ls(line);
        std::string word;
        if (!(ls >> word))
            continue;

        if (word == "G0" || word == "G1") {
            double nx = x, ny = y, nz = z, ne = e, nf = feed;
            bool has_e = false, has_xy_word = false;
            std::string tok;
            while (ls >> tok) {
                if (tok.size() < 2)
                    continue;
                double v = std::atof(tok.c_str() + 1);
                switch (tok[0]) {
                case 'X': nx = v; has_xy_word = true; break;
                case 'Y': ny = v; has_xy_word = true; break;
                case 'Z': nz = v; break;
                case 'E': ne = v; has_e = true; break;
                case 'F': nf = v; break;
                default: break;
                }
            }
            if (nz != z && !has_xy_word)
                ++prog.layer_changes;
            if (has_xy_word) {
                GcodeMove mv;
                mv.from = {x, y};
                mv.to = {nx, ny};
                mv.z = nz;
                mv.feed = nf;
                mv.e_delta = has_e ? ne - e : 0.0;
                mv.extruding = has_e && mv.e_delta > 0 && have_xy;
                if (mv.e_delta > 0)
                    prog.total_e += mv.e_delta;
                prog.moves.push_back(mv);
                have_xy = true;
            }
            x = nx;
            y = ny;
            z = nz;
            e = ne;
            feed = nf;
            (void)last_z;
        } else if (word == "G92") {
            std::string tok;
            while (ls >> tok)
                if (tok.size() >= 2 && tok[0] == 'E')
                    e = std::atof(tok.c_str() + 1);
        } else if (word == "M165") {
            CommandState s;
            s.kind = SyntaxClass::mix;
            std::string tok;
            while (ls >> tok) {
                if (tok.size() < 2)
                    continue;
                double v = std::atof(tok.c_str() + 1);
                if (tok[0] == 'A')
                    s.mix_a = v;
                else if (tok[0] == 'B')
                    s.mix_b = v;
            }
            double sum = s.mix_a + s.mix_b;
            s.fraction = sum > 0 ? s.mix_b / sum : 0.0;
            prog.events.push_back({prog.moves.size(), s});
        } else if (word.size() >= 2 && word[0] == 'T' &&
                   std::isdigit((unsigned char)word[1])) {
            CommandState s;
            s.kind = SyntaxClass::multitool;
            s.tool = std::atoi(word.c_str() + 1);
            s.fraction = profile.tool_count > 1 ? double(s.tool) / (profile.tool_count - 1) : 0.0;
            prog.events.push_back({prog.moves.size(), s});
        } else if (word == "M104" || word == "M109") {
            std::string tok;
            while (ls >> tok) {
                if (tok.size() >= 2 && tok[0] == 'S') {
                    CommandState s;
                    s.kind = SyntaxClass::temperature;
                    s.temperature = std::atof(tok.c_str() + 1);
                    double span = profile.temp_high - profile.temp_low;
                    s.fraction = span != 0 ? (s.temperature - profile.temp_low) / span : 0.0;
                    prog.events.push_back({prog.moves.size(), s});
                }
            }
        }
        // M82/M221 and friends do not affect reconstruction
    }
    return prog;
}

namespace {

std::array<double, 3> blend_color(const MachineProfile& profile,
                                  const std::vector<std::string>& materials, double fraction) {
    std::array<double, 3> a = material_color(profile, materials.empty() ? "default"
                                                                        : materials[0]);
    std::array<double, 3> b =
        material_color(profile, materials.size() > 1 ? materials[1] : materials[0]);
    double m = std::clamp(fraction, 0.0, 1.0);
    return {a[0] * (1 - m) + b[0] * m, a[1] * (1 - m) + b[1] * m, a[2] * (1 - m) + b[2] * m};
}

} // namespace

std::string emit_layer_svg(const LayerPlan& plan, const MachineProfile& profile,
                           const std::vector<std::string>& materials, SvgMode mode,
                           const std::vector<double>* realized_fractions) {
    char buf[256];
    std::string svg;
    double w = profile.bed_x, h = profile.bed_y;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.1f %.1f\">\n", w,
                  h);
    svg += buf;
    // y-flip so +y points up
    std::snprintf(buf, sizeof(buf), "<g transform=\"translate(0,%.1f) scale(1,-1)\">\n", h);
    svg += buf;
    svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(int(w)) + "\" height=\"" +
           std::to_string(int(h)) + "\" fill=\"none\" stroke=\"#888\" stroke-width=\"0.5\"/>\n";

    Vec2 center{w / 2, h / 2};
    double active_fraction = 0.0;
    size_t extrude_idx = 0;
    for (const PlanItem& item : plan.items) {
        if (const auto* ev = std::get_if<StateEvent>(&item)) {
            active_fraction = ev->state.fraction;
        } else if (const auto* tr = std::get_if<TravelMove>(&item)) {
            Vec2 a = tr->from + center, b = tr->to + center;
            std::snprintf(buf, sizeof(buf),
                          "<line x1=\"%.3f\" y1=\"%.3f\" x2=\"%.3f\" y2=\"%.3f\" "
                          "stroke=\"#999\" stroke-width=\"0.15\" stroke-dasharray=\"1,1\"/>\n",
                          a.x, a.y, b.x, b.y);
            svg += buf;
        } else if (const auto* ex = std::get_if<ExtrudeMove>(&item)) {
            double fraction = active_fraction;
            if (mode == SvgMode::simulated && realized_fractions &&
                extrude_idx < realized_fractions->size())
                fraction = (*realized_fractions)[extrude_idx];
            ++extrude_idx;
            std::array<double, 3> rgb = blend_color(profile, materials, fraction);
            std::snprintf(buf, sizeof(buf), "<polyline fill=\"none\" stroke=\"rgb(%d,%d,%d)\" "
                                            "stroke-width=\"0.4\" points=\"",
                          int(rgb[0] * 255), int(rgb[1] * 255), int(rgb[2] * 255));
            svg += buf;
            for (const Vec2& p : ex->points) {
                Vec2 bp = p + center;
                std::snprintf(buf, sizeof(buf), "%.3f,%.3f ", bp.x, bp.y);
                svg += buf;
            }
            svg += "\"/>\n";
        }
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

} // namespace vcad
