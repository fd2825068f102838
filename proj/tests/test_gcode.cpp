#include <doctest.h>

#include <cmath>

#include "vcadslicer/gcode.hpp"

using namespace vcad;

TEST_CASE("capsule area matches the closed form") {
    // A = h (w - h) + pi h^2 / 4
    CHECK(capsule_area(0.2, 0.4) ==
          doctest::Approx(0.04 + M_PI * 0.01).epsilon(1e-14));
    CHECK(capsule_area(0.2, 0.6) ==
          doctest::Approx(0.08 + M_PI * 0.01).epsilon(1e-14));
    // degenerate rectangle: pure capsule
    CHECK(capsule_area(0.2, 0.2) == doctest::Approx(M_PI * 0.04 / 4).epsilon(1e-14));
    CHECK_THROWS_AS(capsule_area(0.4, 0.2), Error); // w < h
    CHECK_THROWS_AS(capsule_area(0.0, 0.4), Error);
}

TEST_CASE("look-ahead distance inverts the capsule area") {
    double area = capsule_area(0.2, 0.4);
    CHECK(lookahead_distance(68.56, 0.2, 0.4) == doctest::Approx(68.56 / area).epsilon(1e-14));
    CHECK(lookahead_distance(68.56, 0.2, 0.4) == doctest::Approx(960.0).epsilon(1e-4));
    CHECK(lookahead_distance(32.14, 0.2, 0.4) == doctest::Approx(450.0).epsilon(1e-3));
    CHECK(lookahead_distance(0.0, 0.2, 0.4) == 0.0);
}

TEST_CASE("flow polynomials evaluate the calibration fits") {
    // independent evaluation: 100 (8.35479e-6 t^3 - 5.37075e-3 t^2 + 1.13374 t - 77.814)
    auto pla = [](double t) {
        return 100 * (8.35479e-6 * std::pow(t, 3) - 5.37075e-3 * t * t + 1.13374 * t - 77.814);
    };
    auto tpu = [](double t) {
        return 100 * (3.09637e-4 * t * t - 1.38401e-1 * t + 15.9560);
    };
    CHECK(flow_percent(190, FlowPoly::pla) ==
          doctest::Approx(pla(190)).epsilon(1e-12));
    CHECK(flow_percent(190, FlowPoly::pla) == doctest::Approx(101.802961).epsilon(1e-9));
    CHECK(flow_percent(225, FlowPoly::pla) ==
          doctest::Approx(pla(225)).epsilon(1e-12));
    CHECK(flow_percent(225, FlowPoly::pla) == doctest::Approx(54.95610938).epsilon(1e-9));
    CHECK(flow_percent(225, FlowPoly::tpu) ==
          doctest::Approx(tpu(225)).epsilon(1e-12));
    CHECK(flow_percent(225, FlowPoly::tpu) == doctest::Approx(49.1148125).epsilon(1e-9));
    CHECK(flow_percent(200, FlowPoly::none) == 100.0);
    CHECK_THROWS_AS(flow_percent(170, FlowPoly::pla), Error);
    CHECK_THROWS_AS(flow_percent(250, FlowPoly::pla), Error);
}

TEST_CASE("PLA flow decreases monotonically over the printing range") {
    double prev = flow_percent(190, FlowPoly::pla);
    for (double t = 191; t <= 225; t += 1.0) {
        double cur = flow_percent(t, FlowPoly::pla);
        CHECK(cur < prev);
        prev = cur;
    }
}

namespace {

LayerPlan simple_plan(double z, int color, const Polyline& pts, const CommandState& state) {
    LayerPlan plan;
    plan.index = 0;
    plan.z = z;
    plan.print_z = z + 0.1;
    plan.items.push_back(StateEvent{state, color});
    plan.items.push_back(TravelMove{{0, 0}, pts.front()});
    ExtrudeMove move;
    move.points = pts;
    move.color = color;
    plan.items.push_back(move);
    return plan;
}

CommandState mix_state(double b) {
    CommandState s;
    s.kind = SyntaxClass::mix;
    s.mix_a = 1 - b;
    s.mix_b = b;
    s.fraction = b;
    return s;
}

} // namespace

TEST_CASE("mix states render as M165 with 3 decimals") {
    MachineProfile profile = default_profile(SyntaxClass::mix);
    PrintSettings settings;
    auto plans = std::vector<LayerPlan>{
        simple_plan(0.1, 0, {{0, 0}, {10, 0}}, mix_state(0.75))};
    std::string gcode = emit_gcode(plans, profile, settings);
    CHECK(gcode.find("M165 A0.250 B0.750\n") != std::string::npos);
    CHECK(gcode.find("M82\n") != std::string::npos);
    CHECK(gcode.find("G92 E0\n") != std::string::npos);
}

TEST_CASE("extrusion follows the capsule/filament area ratio") {
    MachineProfile profile = default_profile(SyntaxClass::mix);
    PrintSettings settings; // h=0.2 w=0.4 d=1.75
    auto plans = std::vector<LayerPlan>{
        simple_plan(0.1, 0, {{0, 0}, {10, 0}}, mix_state(0.5))};
    std::string gcode = emit_gcode(plans, profile, settings);
    // delta E for a 10 mm move
    double expect = 10 * capsule_area(0.2, 0.4) / (M_PI * 0.875 * 0.875);
    CHECK(expect == doctest::Approx(0.29691).epsilon(1e-4));
    char needle[32];
    std::snprintf(needle, sizeof(needle), " E%.5f", expect);
    CHECK(gcode.find(needle) != std::string::npos);
}

TEST_CASE("temperature states render as M104 plus M221 flow") {
    MachineProfile profile = default_profile(SyntaxClass::temperature);
    profile.flow_poly = FlowPoly::pla;
    PrintSettings settings;
    CommandState s;
    s.kind = SyntaxClass::temperature;
    s.temperature = 225.0;
    s.fraction = 1.0;
    auto plans = std::vector<LayerPlan>{simple_plan(0.1, 0, {{0, 0}, {5, 0}}, s)};
    std::string gcode = emit_gcode(plans, profile, settings);
    CHECK(gcode.find("M104 S225\n") != std::string::npos);
    CHECK(gcode.find("M221 T0 S55.0\n") != std::string::npos); // 54.956 -> 55.0
    // non-integer temperatures keep one decimal
    s.temperature = 207.5;
    plans = {simple_plan(0.1, 0, {{0, 0}, {5, 0}}, s)};
    gcode = emit_gcode(plans, profile, settings);
    CHECK(gcode.find("M104 S207.5\n") != std::string::npos);
}

TEST_CASE("multitool states render as T<n>") {
    MachineProfile profile = default_profile(SyntaxClass::multitool);
    PrintSettings settings;
    CommandState s;
    s.kind = SyntaxClass::multitool;
    s.tool = 4;
    s.fraction = 1.0;
    auto plans = std::vector<LayerPlan>{simple_plan(0.1, 0, {{0, 0}, {5, 0}}, s)};
    std::string gcode = emit_gcode(plans, profile, settings);
    CHECK(gcode.find("\nT4\n") != std::string::npos);
}

TEST_CASE("extrusion without a prior state raises StateMissing") {
    MachineProfile profile = default_profile(SyntaxClass::mix);
    PrintSettings settings;
    LayerPlan plan;
    plan.index = 0;
    plan.print_z = 0.2;
    ExtrudeMove move;
    move.points = {{0, 0}, {5, 0}};
    plan.items.push_back(move);
    CHECK_THROWS_AS(emit_gcode({plan}, profile, settings), Error);
}

TEST_CASE("moves outside the bed raise BedBounds") {
    MachineProfile profile = default_profile(SyntaxClass::mix);
    profile.bed_x = 100;
    profile.bed_y = 100;
    PrintSettings settings;
    auto plans = std::vector<LayerPlan>{
        simple_plan(0.1, 0, {{0, 0}, {80, 0}}, mix_state(0.5))}; // 80+50 > 100
    CHECK_THROWS_AS(emit_gcode(plans, profile, settings), Error);
}

TEST_CASE("emitted gcode reparses to the same lengths and states") {
    MachineProfile profile = default_profile(SyntaxClass::mix);
    PrintSettings settings;
    std::vector<LayerPlan> plans;
    LayerPlan plan;
    plan.index = 0;
    plan.print_z = 0.2;
    plan.items.push_back(StateEvent{mix_state(0.125), 0});
    ExtrudeMove a;
    a.points = {{0, 0}, {30, 0}, {30, 20}};
    a.color = 0;
    plan.items.push_back(a);
    plan.items.push_back(StateEvent{mix_state(0.375), 1});
    plan.items.push_back(TravelMove{{30, 20}, {0, 20}});
    ExtrudeMove b;
    b.points = {{0, 20}, {-40, 20}};
    b.color = 1;
    plan.items.push_back(b);
    plans.push_back(plan);

    std::string gcode = emit_gcode(plans, profile, settings);
    GcodeProgram prog = parse_gcode(gcode, profile);

    // mix-state sequence reconstructs exactly (templates add temperature
    // events around it)
    std::vector<double> mixes;
    for (const GcodeEventRec& ev : prog.events)
        if (ev.state.kind == SyntaxClass::mix)
            mixes.push_back(ev.state.mix_b);
    REQUIRE(mixes.size() == 2);
    CHECK(mixes[0] == doctest::Approx(0.125)); // printed at 3 decimals
    CHECK(mixes[1] == doctest::Approx(0.375));

    // extruded path length reconstructs within coordinate quantization
    double path_len = 0;
    for (const GcodeMove& m : prog.moves)
        if (m.extruding)
            path_len += (m.to - m.from).norm();
    CHECK(path_len == doctest::Approx(90.0).epsilon(1e-4));

    // total E telescopes per layer: conservation within 1e-6 relative
    double expect_e = 90.0 * capsule_area(0.2, 0.4) / (M_PI * 0.875 * 0.875);
    CHECK(prog.total_e == doctest::Approx(expect_e).epsilon(1e-5));
}

TEST_CASE("layer svg contains strokes and dashes") {
    MachineProfile profile = default_profile(SyntaxClass::mix);
    auto plan = simple_plan(0.1, 0, {{0, 0}, {10, 0}}, mix_state(0.75));
    std::string svg = emit_layer_svg(plan, profile, {"blue", "yellow"}, SvgMode::commanded);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<polyline") != std::string::npos);
    CHECK(svg.find("stroke-dasharray") != std::string::npos);

    LayerPlan empty;
    std::string blank = emit_layer_svg(empty, profile, {"blue", "yellow"}, SvgMode::commanded);
    CHECK(blank.find("<rect") != std::string::npos); // bed outline is always present
}
