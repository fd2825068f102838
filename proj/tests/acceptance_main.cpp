// Acceptance suite: one criterion per entry, each printing PASS/FAIL with
// the measured values. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "support/fixtures.hpp"
#include "vcadslicer/job.hpp"

using namespace vcad;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

#define EXPECT(cond, ...)                                                                    \
    do {                                                                                     \
        if (!(cond)) {                                                                       \
            char buf_[256];                                                                  \
            std::snprintf(buf_, sizeof(buf_), __VA_ARGS__);                                  \
            detail += std::string(detail.empty() ? "" : "; ") + buf_;                        \
            ok = false;                                                                      \
        }                                                                                    \
    } while (0)

const char* kPlate6040 =
    "fgrade([\"(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2\","
    "\"1-(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2\"],"
    "[\"blue\", \"yellow\"]) { rectprism(60, 40, 0.4); }";

SliceInputs plate_inputs(const Design& design, int strategy, int colors, double beta = 0.0) {
    SliceInputs in;
    in.design = &design;
    in.settings.perimeters = 1;
    in.settings.min_segment = 1.0;
    in.palette = build_palette(colors, design_materials(design));
    if (beta > 0)
        in.zipper = zipper_bands(in.palette, beta);
    in.profile = default_profile(SyntaxClass::mix);
    in.strategy = strategy;
    in.bbox = design_bbox(design);
    return in;
}

std::vector<LayerPlan> slice_all(SliceInputs& in) {
    std::vector<LayerPlan> plans;
    SliceState state;
    PurgeTowerSpec towers = in.strategy == 1 ? plan_purge_towers(in) : PurgeTowerSpec{};
    int layers = layer_count(in.bbox, in.settings.layer_height);
    for (int k = 0; k < layers; ++k)
        plans.push_back(in.strategy == 1 ? slice_layer_strategy1(in, state, k, towers)
                                         : slice_layer_strategy2(in, state, k));
    return plans;
}

// ---- criterion bodies ------------------------------------------------

bool c1_arrangement(std::string& detail) {
    bool ok = true;
    auto t0 = Clock::now();
    Design design =
        parse_design("difference() { rectprism(10, 10, 1); rectprism(2, 2, 1); }");

    Contour geometry;
    geometry.polygons.push_back({{-5, -5}, {5, -5}, {5, 5}, {-5, 5}});
    Ring hole = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
    std::reverse(hole.begin(), hole.end());
    geometry.polygons.push_back(hole);
    Contour materials;
    materials.polylines.push_back({{-0.5, -6}, {-0.5, 6}});
    materials.polylines.push_back({{0.5, -6}, {0.5, 6}});

    Arrangement arr = build_arrangement(geometry, materials);
    auto faces = extract_bounded_faces(arr, [&](const Vec2& p) {
        return eval_sdf(design, {p.x, p.y, 0.5}) <= 0.0;
    });
    double elapsed = seconds_since(t0);
    EXPECT(faces.size() == 4, "bounded faces = %zu, want 4", faces.size());
    EXPECT(elapsed < 1.0, "took %.3f s, budget 1 s", elapsed);
    return ok;
}

bool c2_palette(std::string& detail) {
    bool ok = true;
    Palette p = build_palette(4, {"a", "b"});
    EXPECT(p.boundaries == std::vector<double>({0.25, 0.5, 0.75}),
           "boundaries not {0.25, 0.5, 0.75}");
    EXPECT(p.midpoints == std::vector<double>({0.125, 0.375, 0.625, 0.875}),
           "midpoints not {0.125, 0.375, 0.625, 0.875}");
    return ok;
}

bool c3_capsule(std::string& detail) {
    bool ok = true;
    double pi = std::acos(-1.0); // independent of the implementation path
    double direct = 0.2 * (0.4 - 0.2) + pi * 0.2 * 0.2 / 4.0;
    double got = capsule_area(0.2, 0.4);
    EXPECT(std::abs(got - direct) < 1e-12, "capsule area |%.17g - %.17g| >= 1e-12", got,
           direct);
    for (double v : {68.56, 32.14, 5.0, 0.0}) {
        double want = v / direct;
        double l = lookahead_distance(v, 0.2, 0.4);
        EXPECT(std::abs(l - want) <= 1e-12 * std::max(1.0, want),
               "lookahead(%g) = %.12f, want %.12f", v, l, want);
    }
    return ok;
}

bool c4_flow(std::string& detail) {
    bool ok = true;
    auto direct = [](double t) {
        return 100.0 *
               (8.35479e-6 * t * t * t - 5.37075e-3 * t * t + 1.13374 * t - 77.814);
    };
    for (double t : {190.0, 225.0}) {
        double got = flow_percent(t, FlowPoly::pla);
        double want = direct(t);
        EXPECT(std::abs(got - want) <= 1e-9 * std::abs(want),
               "flow(%g) = %.12f vs direct %.12f", t, got, want);
    }
    double prev = flow_percent(190, FlowPoly::pla);
    for (double t = 190.5; t <= 225.0; t += 0.5) {
        double cur = flow_percent(t, FlowPoly::pla);
        if (cur >= prev) {
            EXPECT(false, "flow not decreasing at t=%g", t);
            break;
        }
        prev = cur;
    }
    return ok;
}

bool c5_dead_volume(std::string& detail) {
    bool ok = true;
    auto t0 = Clock::now();
    PrintSettings settings;
    CalibrationObject calib; // Lx=40, Ly=60, w=0.4, h=0.2
    double area = capsule_area(0.2, 0.4);
    double v_melt = 960.0 * area; // L exactly 960 mm
    ChamberModel model{ChamberKind::plug_flow, v_melt};

    auto plans = build_calibration_plans(calib, 0.0);
    auto segs = simulate(moves_from_plans(plans, settings), model);
    double err = realized_boundary_error(segs, 0.0);
    double recovered = std::ceil(err / calib.bead) * calib.pass_length;
    EXPECT(err > 0, "uncompensated error %.3f not positive", err);
    EXPECT(std::abs(recovered - 960.0) <= calib.pass_length,
           "recovered L = %.1f, want 960 +- %.0f", recovered, calib.pass_length);

    auto comp = build_calibration_plans(calib, 960.0);
    auto csegs = simulate(moves_from_plans(comp, settings), model);
    double cerr = realized_boundary_error(csegs, 0.0);
    EXPECT(std::abs(cerr) < 0.4, "compensated error %.3f mm, budget 0.4", cerr);
    double elapsed = seconds_since(t0);
    EXPECT(elapsed < 10.0, "took %.2f s, budget 10 s", elapsed);
    return ok;
}

bool c6_calibration(std::string& detail) {
    bool ok = true;
    auto t0 = Clock::now();
    MachineProfile profile = default_profile(SyntaxClass::mix);
    profile.v_melt = 68.56;
    CalibrationObject calib;
    double lookahead = calibrate_lookahead(profile, calib, 5);
    double analytic = lookahead_distance(profile.v_melt, calib.layer_height, calib.bead);
    EXPECT(std::abs(lookahead - analytic) <= calib.pass_length,
           "calibrated %.1f vs analytic %.1f beyond L_y=%.0f", lookahead, analytic,
           calib.pass_length);
    double elapsed = seconds_since(t0);
    EXPECT(elapsed < 30.0, "took %.2f s, budget 30 s", elapsed);
    return ok;
}

bool c7_zippering(std::string& detail) {
    bool ok = true;
    Design design = parse_design(kPlate6040);

    // beta = 0 must be byte-identical to the plain strategy-1 slice
    SliceInputs plain = plate_inputs(design, 1, 4);
    SliceInputs zero = plate_inputs(design, 1, 4);
    zero.zipper = zipper_bands(zero.palette, 0.0);
    auto plans_a = slice_all(plain);
    auto plans_b = slice_all(zero);
    std::string ga = emit_gcode(plans_a, plain.profile, plain.settings);
    std::string gb = emit_gcode(plans_b, zero.profile, zero.settings);
    EXPECT(ga == gb, "beta=0 gcode differs from non-zippered output");

    // beta > 0: alternation on every band path
    SliceInputs zipped = plate_inputs(design, 1, 4, 0.1);
    LayerGeometry geo = compute_layer_geometry(zipped, 0);
    std::map<int, std::vector<int>> band_colors;
    for (const LabeledPath& lp : geo.labeled)
        if (lp.band >= 0)
            band_colors[lp.band].push_back(lp.color);
    EXPECT(!band_colors.empty(), "no band paths found at beta=0.1");
    int violations = 0, total = 0;
    for (auto& [band, colors] : band_colors)
        for (size_t i = 0; i < colors.size(); ++i) {
            ++total;
            int want = (i % 2 == 0) ? band : band + 1;
            if (colors[i] != want)
                ++violations;
        }
    EXPECT(violations == 0, "%d of %d band paths break alternation", violations, total);
    return ok;
}

bool c8_strategy_invariants(std::string& detail) {
    bool ok = true;
    Design design = parse_design(kPlate6040);

    // strategy 1: monotone order, reversed on odd layers
    SliceInputs s1 = plate_inputs(design, 1, 8);
    s1.profile.v_melt = 0;
    auto plans = slice_all(s1);
    for (const LayerPlan& plan : plans) {
        std::vector<int> seq;
        for (const PlanItem& item : plan.items)
            if (const auto* ex = std::get_if<ExtrudeMove>(&item))
                if (ex->role != PathRole::purge &&
                    (seq.empty() || seq.back() != ex->color))
                    seq.push_back(ex->color);
        for (size_t i = 1; i < seq.size(); ++i) {
            bool forward = plan.index % 2 == 0;
            if (forward ? seq[i] <= seq[i - 1] : seq[i] >= seq[i - 1]) {
                EXPECT(false, "layer %d color order not %s", plan.index,
                       forward ? "ascending" : "descending");
                break;
            }
        }
    }

    // strategy 2: zero purge towers, face coverage within 0.5%
    SliceInputs s2 = plate_inputs(design, 2, 8);
    LayerGeometry geo = compute_layer_geometry(s2, 0);
    double covered = 0;
    for (const ColoredFace& f : geo.faces)
        covered += f.area;
    double expect = 60.0 * 40.0;
    EXPECT(std::abs(covered - expect) / expect < 0.005,
           "face coverage %.2f of %.2f (%.3f%% off)", covered, expect,
           100 * std::abs(covered - expect) / expect);
    SliceState state;
    LayerPlan plan = slice_layer_strategy2(s2, state, 0);
    int purge = 0;
    for (const PlanItem& item : plan.items)
        if (const auto* ex = std::get_if<ExtrudeMove>(&item))
            if (ex->role == PathRole::purge)
                ++purge;
    EXPECT(purge == 0, "strategy 2 emitted %d purge paths", purge);
    return ok;
}

bool c9_conservation(std::string& detail) {
    bool ok = true;
    SliceJob job;
    job.design_text = kPlate6040;
    job.strategy = 1;
    job.colors = 4;
    job.settings.perimeters = 1;
    job.settings.min_segment = 1.0;
    SliceResult r = run_slice(job);
    GcodeProgram prog = parse_gcode(r.gcode, default_profile(SyntaxClass::mix));
    double total_mm = 0;
    for (const LayerPlan& plan : r.plans)
        total_mm += plan.extrusion_length();
    double area = capsule_area(job.settings.layer_height, job.settings.bead_width);
    double fil_area = std::acos(-1.0) * 0.875 * 0.875;
    double want = total_mm * area / fil_area;
    EXPECT(std::abs(prog.total_e - want) <= 1e-6 * want,
           "sum dE %.6f vs %.6f (rel %.2e)", prog.total_e, want,
           std::abs(prog.total_e - want) / want);
    return ok;
}

bool c10_quantization(std::string& detail) {
    bool ok = true;
    Design design = parse_design(kPlate6040);
    double res = 0.1;
    double prev_max = 1e9;
    for (int n : {4, 8, 16, 48}) {
        SliceInputs in = plate_inputs(design, 2, n);
        in.settings.resolution = res;
        std::vector<LayerPlan> plans = slice_all(in);
        double worst = 0;
        bool bound_ok = true;
        for (const LayerPlan& plan : plans) {
            for (const PlanItem& item : plan.items) {
                const auto* ex = std::get_if<ExtrudeMove>(&item);
                if (!ex || ex->role == PathRole::purge)
                    continue;
                // arc-length midpoint of the move
                double total = ex->length();
                double acc = 0, target = total / 2;
                Vec2 mid = ex->points.front();
                for (size_t i = 1; i < ex->points.size(); ++i) {
                    double seg = (ex->points[i] - ex->points[i - 1]).norm();
                    if (acc + seg >= target && seg > 0) {
                        mid = ex->points[i - 1] +
                              (ex->points[i] - ex->points[i - 1]) * ((target - acc) / seg);
                        break;
                    }
                    acc += seg;
                }
                double g = eval_gradient(design, {mid.x, mid.y, plan.z});
                double commanded = in.palette.midpoint(ex->color);
                double err = std::abs(commanded - g);
                // local field variation over two grid cells
                double delta = 0;
                for (Vec2 dir : {Vec2{2 * res, 0}, Vec2{-2 * res, 0}, Vec2{0, 2 * res},
                                 Vec2{0, -2 * res}}) {
                    double gv =
                        eval_gradient(design, {mid.x + dir.x, mid.y + dir.y, plan.z});
                    delta = std::max(delta, std::abs(gv - g));
                }
                worst = std::max(worst, err);
                if (err > in.palette.alpha / 2 + delta + 1e-9)
                    bound_ok = false;
            }
        }
        EXPECT(bound_ok, "n=%d: a path exceeds alpha/2 + sampling error", n);
        EXPECT(worst <= prev_max + 1e-12, "max error grew from %.4f to %.4f at n=%d",
               prev_max, worst, n);
        prev_max = worst;
    }
    return ok;
}

bool c11_performance(std::string& detail) {
    bool ok = true;
    {
        SliceJob job;
        job.design_text = palette_plate_design();
        job.strategy = 1;
        job.colors = 16;
        auto t0 = Clock::now();
        SliceResult r = run_slice(job);
        double secs = seconds_since(t0);
        EXPECT(secs <= 99.0, "strategy 1 n=16 took %.1f s, ceiling 99 s", secs);
        EXPECT(!r.gcode.empty(), "no gcode");
        std::fprintf(stderr, "  [perf] palette 135x175x2, strategy 1, n=16: %.1f s\n", secs);
    }
    {
        SliceJob job;
        job.design_text = palette_plate_design();
        job.strategy = 2;
        job.colors = 48;
        auto t0 = Clock::now();
        SliceResult r = run_slice(job);
        double secs = seconds_since(t0);
        EXPECT(secs <= 424.0, "strategy 2 n=48 took %.1f s, ceiling 424 s", secs);
        EXPECT(!r.gcode.empty(), "no gcode");
        std::fprintf(stderr, "  [perf] palette 135x175x2, strategy 2, n=48: %.1f s\n", secs);
    }
    return ok;
}

bool c12_determinism(std::string& detail) {
    bool ok = true;
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "vcad_acceptance_hull";
    fs::create_directories(dir);
    write_stl_binary((dir / "hull.stl").string(), fixtures::hull_loft(60, 31, 6, 10, 48));
    {
        std::ofstream out(dir / "hull.vcad");
        out << "fgrade([\"0.5 + 0.5*sin(2*pi*x/25)*cos(2*pi*y/25)*sin(2*pi*z/25)\",\n"
               "        \"0.5 - 0.5*sin(2*pi*x/25)*cos(2*pi*y/25)*sin(2*pi*z/25)\"],\n"
               "       [\"yellow\", \"blue\"]) {\n"
               "    mesh(\"hull.stl\");\n"
               "}\n";
    }
    SliceJob job;
    job.design_path = (dir / "hull.vcad").string();
    job.strategy = 1;
    job.colors = 2;
    job.settings.perimeters = 2;
    job.settings.min_segment = 1.0;
    SliceResult a = run_slice(job);
    SliceResult b = run_slice(job);
    EXPECT(!a.gcode.empty(), "no gcode");
    EXPECT(a.gcode == b.gcode, "two runs differ (%zu vs %zu bytes)", a.gcode.size(),
           b.gcode.size());
    fs::remove_all(dir);
    return ok;
}

} // namespace

int main() {
    std::vector<Criterion> criteria = {
        {1, "arrangement fidelity: hole + two crossing polylines -> 4 faces", c1_arrangement},
        {2, "palette math: n=4 boundaries and midpoints", c2_palette},
        {3, "capsule area and look-ahead distance", c3_capsule},
        {4, "foaming flow polynomial vs direct evaluation", c4_flow},
        {5, "dead-volume compensation on the calibration part", c5_dead_volume},
        {6, "look-ahead calibration loop convergence", c6_calibration},
        {7, "zippering: beta=0 no-op and alternation property", c7_zippering},
        {8, "strategy invariants: ordering, coverage, no towers", c8_strategy_invariants},
        {9, "extrusion conservation through gcode", c9_conservation},
        {10, "palette quantization error bound", c10_quantization},
        {11, "slicing time ceilings (reference desktop budgets)", c11_performance},
        {12, "end-to-end determinism on the mesh fixture", c12_determinism},
    };

    int failed = 0;
    for (const Criterion& c : criteria) {
        std::string detail;
        bool ok = false;
        auto t0 = Clock::now();
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double secs = seconds_since(t0);
        std::printf("[%s] criterion %2d (%.1fs): %s%s%s\n", ok ? "PASS" : "FAIL", c.id, secs,
                    c.name, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok)
            ++failed;
    }
    std::printf("%d/%zu acceptance criteria passed\n", int(criteria.size()) - failed,
                criteria.size());
    return failed;
}
