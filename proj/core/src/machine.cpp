#include "vcadslicer/machine.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "vcadslicer/errors.hpp"

namespace vcad {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_number(const std::string& v, const std::string& key, const std::string& origin) {
    try {
        size_t idx = 0;
        double d = std::stod(v, &idx);
        while (idx < v.size() && std::isspace((unsigned char)v[idx]))
            ++idx;
        if (idx != v.size())
            throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw Error(errc::config, origin + ": value for '" + key + "' is not a number: " + v);
    }
}

std::array<double, 3> parse_hex_color(const std::string& v, const std::string& origin) {
    std::string s = trim(v);
    if (!s.empty() && s[0] == '#')
        s = s.substr(1);
    if (s.size() != 6)
        throw Error(errc::config, origin + ": expected #rrggbb color, got '" + v + "'");
    auto hex = [&](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw Error(errc::config, origin + ": bad hex digit in color '" + v + "'");
    };
    return {(hex(s[0]) * 16 + hex(s[1])) / 255.0, (hex(s[2]) * 16 + hex(s[3])) / 255.0,
            (hex(s[4]) * 16 + hex(s[5])) / 255.0};
}

} // namespace

MachineProfile default_profile(SyntaxClass syntax) {
    MachineProfile p;
    p.syntax = syntax;
    switch (syntax) {
    case SyntaxClass::mix:
        p.v_melt = 68.56; // mixing hotend chamber
        break;
    case SyntaxClass::multitool:
        p.v_melt = 0.0;
        p.tool_count = 5;
        break;
    case SyntaxClass::temperature:
        p.v_melt = 0.0;
        p.flow_poly = FlowPoly::pla;
        break;
    }
    p.start_gcode = "G21\nG90\nM82\nM104 S${temp_low}\nG28\nM109 S${temp_low}\nG92 E0\n";
    p.end_gcode = "M104 S0\nG91\nG1 Z5 F600\nG90\nM84\n";
    return p;
}

MachineProfile parse_profile(const std::string& text, const std::string& origin) {
    MachineProfile p = default_profile(SyntaxClass::mix);
    p.start_gcode.clear();
    p.end_gcode.clear();
    bool start_set = false, end_set = false;

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#')
            continue;
        size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw Error(errc::config,
                        origin + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));

        if (value == "<<<") {
            std::string block;
            bool closed = false;
            while (std::getline(in, line)) {
                ++lineno;
                if (trim(line) == ">>>") {
                    closed = true;
                    break;
                }
                block += line;
                block += '\n';
            }
            if (!closed)
                throw Error(errc::config, origin + ": unterminated <<< block for " + key);
            value = block;
        }

        if (key == "syntax") {
            if (value == "mix")
                p.syntax = SyntaxClass::mix;
            else if (value == "multitool")
                p.syntax = SyntaxClass::multitool;
            else if (value == "temperature")
                p.syntax = SyntaxClass::temperature;
            else
                throw Error(errc::config, origin + ": unknown syntax class '" + value + "'");
        } else if (key == "v_melt") {
            p.v_melt = to_number(value, key, origin);
            if (p.v_melt < 0)
                throw Error(errc::config, origin + ": v_melt must be >= 0");
        } else if (key == "lookahead") {
            p.lookahead = (value == "auto") ? -1.0 : to_number(value, key, origin);
        } else if (key == "filament_diameter") {
            p.filament_diameter = to_number(value, key, origin);
            if (p.filament_diameter <= 0)
                throw Error(errc::config, origin + ": filament_diameter must be > 0");
        } else if (key == "bed_x") {
            p.bed_x = to_number(value, key, origin);
        } else if (key == "bed_y") {
            p.bed_y = to_number(value, key, origin);
        } else if (key == "temp_low") {
            p.temp_low = to_number(value, key, origin);
        } else if (key == "temp_high") {
            p.temp_high = to_number(value, key, origin);
        } else if (key == "temp_min") {
            p.temp_min = to_number(value, key, origin);
        } else if (key == "temp_max") {
            p.temp_max = to_number(value, key, origin);
        } else if (key == "flow_poly") {
            if (value == "none")
                p.flow_poly = FlowPoly::none;
            else if (value == "pla" || value == "PLA")
                p.flow_poly = FlowPoly::pla;
            else if (value == "tpu" || value == "TPU")
                p.flow_poly = FlowPoly::tpu;
            else
                throw Error(errc::config, origin + ": unknown flow_poly '" + value + "'");
        } else if (key == "tool_count") {
            p.tool_count = int(to_number(value, key, origin));
            if (p.tool_count < 1)
                throw Error(errc::config, origin + ": tool_count must be >= 1");
        } else if (key == "print_feed") {
            p.print_feed = to_number(value, key, origin);
        } else if (key == "travel_feed") {
            p.travel_feed = to_number(value, key, origin);
        } else if (key == "z_feed") {
            p.z_feed = to_number(value, key, origin);
        } else if (key == "purge_spacing") {
            p.purge_spacing = to_number(value, key, origin);
        } else if (key == "purge_threshold") {
            p.purge_threshold = to_number(value, key, origin);
            if (p.purge_threshold < 0)
                throw Error(errc::config, origin + ": purge_threshold must be >= 0");
        } else if (key == "filament_density") {
            p.filament_density = to_number(value, key, origin);
        } else if (key == "thermal_tau") {
            p.thermal_tau = to_number(value, key, origin);
        } else if (key == "purge_location") {
            std::istringstream pair(value);
            double x, y;
            char comma;
            if (!(pair >> x >> comma >> y) || comma != ',')
                throw Error(errc::config, origin + ": purge_location expects 'x,y'");
            p.purge_locations.push_back({x, y});
        } else if (key == "start_gcode") {
            p.start_gcode = value;
            start_set = true;
        } else if (key == "end_gcode") {
            p.end_gcode = value;
            end_set = true;
        } else if (key.rfind("color.", 0) == 0) {
            p.material_rgb[key.substr(6)] = parse_hex_color(value, origin);
        } else {
            throw Error(errc::config, origin + ": unknown profile key '" + key + "'");
        }
    }
    MachineProfile defaults = default_profile(p.syntax);
    if (!start_set)
        p.start_gcode = defaults.start_gcode;
    if (!end_set)
        p.end_gcode = defaults.end_gcode;
    if (p.temp_high < p.temp_low)
        throw Error(errc::config, origin + ": temp_high below temp_low");
    return p;
}

MachineProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(errc::config, "cannot open profile: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_profile(content, path);
}

std::string expand_template(const std::string& tpl, const MachineProfile& profile) {
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    std::map<std::string, std::string> vars = {
        {"temp_low", fmt(profile.temp_low)},   {"temp_high", fmt(profile.temp_high)},
        {"bed_x", fmt(profile.bed_x)},         {"bed_y", fmt(profile.bed_y)},
        {"tool_count", fmt(profile.tool_count)},
    };
    std::string out;
    size_t pos = 0;
    while (pos < tpl.size()) {
        size_t dollar = tpl.find("${", pos);
        if (dollar == std::string::npos) {
            out += tpl.substr(pos);
            break;
        }
        out += tpl.substr(pos, dollar - pos);
        size_t close = tpl.find('}', dollar);
        if (close == std::string::npos) {
            out += tpl.substr(dollar);
            break;
        }
        std::string key = tpl.substr(dollar + 2, close - dollar - 2);
        auto it = vars.find(key);
        if (it == vars.end())
            throw Error(errc::config, "unknown template variable ${" + key + "}");
        out += it->second;
        pos = close + 1;
    }
    return out;
}

std::array<double, 3> material_color(const MachineProfile& profile, const std::string& name) {
    auto it = profile.material_rgb.find(name);
    if (it != profile.material_rgb.end())
        return it->second;
    static const std::map<std::string, std::array<double, 3>> builtin = {
        {"blue", {0.15, 0.32, 0.85}},   {"yellow", {0.93, 0.80, 0.12}},
        {"red", {0.85, 0.20, 0.18}},    {"green", {0.20, 0.65, 0.30}},
        {"white", {0.95, 0.95, 0.95}},  {"black", {0.08, 0.08, 0.08}},
        {"orange", {0.95, 0.55, 0.10}}, {"default", {0.55, 0.55, 0.58}},
    };
    auto bit = builtin.find(name);
    if (bit != builtin.end())
        return bit->second;
    return {0.55, 0.55, 0.58};
}

} // namespace vcad
