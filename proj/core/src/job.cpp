#include "vcadslicer/job.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

namespace vcad {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(errc::io, "cannot open " + path);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(errc::io, "cannot write " + path);
    out << content;
}

} // namespace

std::string palette_plate_design() {
    return "fgrade([\"(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2\",\n"
           "        \"1-(1+sin(0.02*x+0.03*y)*cos(0.03*x-0.02*y))/2\"],\n"
           "       [\"blue\", \"yellow\"]) {\n"
           "    rectprism(135, 175, 2);\n"
           "}\n";
}

SliceResult run_slice(const SliceJob& job) {
    auto t_total = Clock::now();
    SliceResult result;

    // design
    Design design;
    std::string design_dir = job.design_dir;
    if (!job.design_path.empty()) {
        design = parse_design(read_file(job.design_path));
        design_dir = std::filesystem::path(job.design_path).parent_path().string();
    } else {
        design = parse_design(job.design_text);
    }
    load_meshes(design, design_dir);

    // machine + palette
    MachineProfile profile =
        job.profile_path.empty() ? default_profile(SyntaxClass::mix)
                                 : load_profile(job.profile_path);
    if (!job.lookahead_override.empty()) {
        if (job.lookahead_override == "auto")
            profile.lookahead = -1.0;
        else
            profile.lookahead = std::stod(job.lookahead_override);
    }
    job.settings.check();
    if (job.strategy != 1 && job.strategy != 2)
        throw Error(errc::config, "strategy must be 1 or 2");

    std::vector<std::string> materials = design_materials(design);
    Palette palette = build_palette(job.colors, materials);
    double beta = job.zipper_beta_pct / 100.0;
    ZipperSpec zipper =
        (job.strategy == 1 && beta > 0) ? zipper_bands(palette, beta) : ZipperSpec{};

    SliceInputs inputs;
    inputs.design = &design;
    inputs.settings = job.settings;
    inputs.palette = palette;
    inputs.zipper = zipper;
    inputs.profile = profile;
    inputs.strategy = job.strategy;
    inputs.bbox = design_bbox(design);
    inputs.components = materials.size() >= 3 ? 3 : 2;

    int layers = layer_count(inputs.bbox, job.settings.layer_height);

    // layer geometry fans out to workers; assembly joins in layer order
    auto t_geo = Clock::now();
    unsigned int threads = job.threads > 0 ? unsigned(job.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
    std::vector<LayerGeometry> geometry(static_cast<size_t>(layers));
    if (threads <= 1 || layers <= 1) {
        for (int k = 0; k < layers; ++k)
            geometry[size_t(k)] = compute_layer_geometry(inputs, k);
    } else {
        std::atomic<int> next{0};
        std::vector<std::future<void>> workers;
        unsigned int nworkers = std::min<unsigned>(threads, unsigned(layers));
        for (unsigned int t = 0; t < nworkers; ++t)
            workers.push_back(std::async(std::launch::async, [&] {
                for (;;) {
                    int k = next.fetch_add(1);
                    if (k >= layers)
                        return;
                    geometry[size_t(k)] = compute_layer_geometry(inputs, k);
                }
            }));
        for (auto& w : workers)
            w.get();
    }
    result.times.geometry_ms = ms_since(t_geo);

    // sequential plan assembly with cross-layer machine state
    auto t_asm = Clock::now();
    PurgeTowerSpec towers = job.strategy == 1 ? plan_purge_towers(inputs) : PurgeTowerSpec{};
    SliceState state;
    std::vector<LayerPlan> plans;
    plans.reserve(size_t(layers));
    for (int k = 0; k < layers; ++k) {
        LayerGeometry& geo = geometry[size_t(k)];
        result.warnings.merge(geo.warnings);
        result.face_count += int(geo.faces.size());
        std::optional<double> incoming;
        if (state.state)
            incoming = state.state->fraction;
        LayerPlan plan = assemble_layer_plan(geo, inputs, state);
        if (job.strategy == 1)
            plan = insert_purge_towers(plan, towers, inputs, incoming);
        plans.push_back(std::move(plan));
    }
    if (job.strategy == 1 && towers.purge_length > 0) {
        // travel endpoints drift once towers are inserted; rebuild them all
        SliceState pos;
        for (LayerPlan& plan : plans) {
            std::vector<PlanItem> items;
            items.reserve(plan.items.size());
            for (PlanItem& item : plan.items) {
                if (std::holds_alternative<TravelMove>(item))
                    continue;
                if (auto* e = std::get_if<ExtrudeMove>(&item)) {
                    if (!pos.has_position || (pos.position - e->points.front()).norm() > 1e-9)
                        items.push_back(TravelMove{pos.position, e->points.front()});
                    pos.position = e->points.back();
                    pos.has_position = true;
                }
                items.push_back(std::move(item));
            }
            plan.items = std::move(items);
        }
    }

    // strategy 2 compensates dead volume by look-ahead instead of towers
    if (job.strategy == 2) {
        double lookahead = profile.lookahead_auto()
                               ? (profile.v_melt > 0
                                      ? lookahead_distance(profile.v_melt,
                                                           job.settings.layer_height,
                                                           job.settings.bead_width)
                                      : 0.0)
                               : profile.lookahead;
        if (lookahead > 0)
            plans = apply_lookahead(std::move(plans), lookahead, &result.warnings);
    }
    result.times.assembly_ms = ms_since(t_asm);

    // emission
    auto t_emit = Clock::now();
    result.gcode = emit_gcode(plans, profile, job.settings);
    result.times.emission_ms = ms_since(t_emit);

    // per-color stats
    result.per_color_path_mm.assign(size_t(palette.n), 0.0);
    int purge_events = 0;
    double purge_mm = 0.0;
    double total_mm = 0.0;
    for (const LayerPlan& plan : plans)
        for (const PlanItem& item : plan.items) {
            if (const auto* ex = std::get_if<ExtrudeMove>(&item)) {
                double len = ex->length();
                total_mm += len;
                if (ex->color >= 0 && ex->color < palette.n)
                    result.per_color_path_mm[size_t(ex->color)] += len;
                if (ex->role == PathRole::purge)
                    purge_mm += len;
            } else if (std::holds_alternative<StateEvent>(item)) {
                if (job.strategy == 1 && towers.purge_length > 0)
                    ++purge_events;
            }
        }
    result.purge_path_mm = purge_mm;
    result.purge_events = purge_events;

    if (!job.out_gcode.empty())
        write_file(job.out_gcode, result.gcode);
    if (!job.svg_dir.empty()) {
        std::filesystem::create_directories(job.svg_dir);
        for (const LayerPlan& plan : plans) {
            char name[64];
            std::snprintf(name, sizeof(name), "layer_%04d.svg", plan.index);
            write_file((std::filesystem::path(job.svg_dir) / name).string(),
                       emit_layer_svg(plan, profile, materials, SvgMode::commanded));
        }
        // face-classification debug fills
        std::vector<std::array<double, 3>> color_rgb;
        for (int c = 0; c < palette.n; ++c) {
            double m = palette.midpoint(c);
            auto a = material_color(profile, materials.empty() ? "default" : materials[0]);
            auto b = material_color(profile,
                                    materials.size() > 1 ? materials[1] : materials[0]);
            color_rgb.push_back({a[0] * (1 - m) + b[0] * m, a[1] * (1 - m) + b[1] * m,
                                 a[2] * (1 - m) + b[2] * m});
        }
        for (const LayerGeometry& geo : geometry) {
            char name[64];
            std::snprintf(name, sizeof(name), "faces_%04d.svg", geo.index);
            write_file((std::filesystem::path(job.svg_dir) / name).string(),
                       faces_to_svg(geo.faces, color_rgb));
        }
    }

    result.times.total_ms = ms_since(t_total);

    double area = capsule_area(job.settings.layer_height, job.settings.bead_width);
    nlohmann::json report;
    report["design"] = job.design_path.empty() ? "<inline>" : job.design_path;
    report["strategy"] = job.strategy;
    report["colors"] = job.colors;
    report["zipper_beta_pct"] = job.zipper_beta_pct;
    report["layers"] = layers;
    report["faces"] = result.face_count;
    report["total_path_mm"] = total_mm;
    report["per_color_path_mm"] = result.per_color_path_mm;
    report["purge"]["events"] = purge_events;
    report["purge"]["towers"] = int(towers.locations.size());
    report["purge"]["tower_side_mm"] = towers.side;
    report["purge"]["purge_length_mm"] = towers.purge_length;
    report["purge"]["path_mm"] = purge_mm;
    report["purge"]["volume_mm3"] = purge_mm * area;
    report["purge"]["mass_g"] = purge_mm * area * profile.filament_density;
    report["timings_ms"]["geometry"] = result.times.geometry_ms;
    report["timings_ms"]["assembly"] = result.times.assembly_ms;
    report["timings_ms"]["emission"] = result.times.emission_ms;
    report["timings_ms"]["total"] = result.times.total_ms;
    report["gcode_bytes"] = result.gcode.size();
    report["warnings"] = result.warnings.messages();
    result.report_json = report.dump(2);
    if (!job.report_path.empty())
        write_file(job.report_path, result.report_json);

    result.plans = std::move(plans);
    result.inputs = std::move(inputs);
    result.inputs.design = nullptr; // the local Design dies with this call
    return result;
}

SimulateResult run_simulate(const SimulateJob& job) {
    SimulateResult result;
    MachineProfile profile = job.profile_path.empty() ? default_profile(SyntaxClass::mix)
                                                      : load_profile(job.profile_path);
    std::string text = job.gcode_path.empty() ? job.gcode_text : read_file(job.gcode_path);
    GcodeProgram program = parse_gcode(text, profile);
    std::vector<SimMove> moves = moves_from_gcode(program, profile);

    if (job.model == "thermal") {
        result.segments = simulate_thermal(moves, profile.thermal_tau);
    } else {
        ChamberModel model;
        model.v_melt = profile.v_melt;
        model.kind = job.model == "mix" ? ChamberKind::perfect_mix : ChamberKind::plug_flow;
        result.segments = simulate(moves, model);
    }

    if (!job.design_path.empty() && !result.segments.empty()) {
        Design design = parse_design(read_file(job.design_path));
        load_meshes(design, std::filesystem::path(job.design_path).parent_path().string());
        BBox3 box = design_bbox(design);
        double z = box.min.z + 0.5 * (box.max.z - box.min.z);
        // parsed gcode lives in bed coordinates; the design does not
        Vec2 bed_center{profile.bed_x / 2, profile.bed_y / 2};
        std::vector<RealizedSegment> design_frame = result.segments;
        for (RealizedSegment& s : design_frame) {
            s.from = s.from - bed_center;
            s.to = s.to - bed_center;
        }
        try {
            result.boundary_error_mm = realized_boundary_error(design_frame, design, z);
            result.has_boundary_error = true;
        } catch (const Error& e) {
            if (e.kind() != errc::no_transition)
                throw;
            result.warnings.add(std::string("boundary error unavailable: ") + e.what());
        }
    }

    nlohmann::json report;
    report["segments"] = nlohmann::json::array();
    double vol = 0.0;
    for (const RealizedSegment& s : result.segments) {
        vol += s.volume;
        report["segments"].push_back({{"x0", s.from.x},
                                      {"y0", s.from.y},
                                      {"x1", s.to.x},
                                      {"y1", s.to.y},
                                      {"volume_mm3", s.volume},
                                      {"commanded", s.commanded},
                                      {"realized", s.realized}});
    }
    report["total_volume_mm3"] = vol;
    report["model"] = job.model;
    if (result.has_boundary_error)
        report["boundary_error_mm"] = result.boundary_error_mm;
    report["warnings"] = result.warnings.messages();
    result.report_json = report.dump(2);
    if (!job.report_path.empty())
        write_file(job.report_path, result.report_json);

    if (!job.svg_dir.empty() && !program.moves.empty()) {
        // realized fraction per source move (volume-weighted)
        std::vector<double> weight(program.moves.size(), 0.0);
        std::vector<double> accum(program.moves.size(), 0.0);
        for (const RealizedSegment& s : result.segments) {
            if (s.source_move < 0 || size_t(s.source_move) >= weight.size())
                continue;
            weight[size_t(s.source_move)] += s.volume;
            accum[size_t(s.source_move)] += s.volume * s.realized;
        }
        // one plan per z level reconstructed from moves
        std::filesystem::create_directories(job.svg_dir);
        LayerPlan plan;
        std::vector<double> realized;
        double cur_z = program.moves.front().z;
        int layer_idx = 0;
        Vec2 bed_center{profile.bed_x / 2, profile.bed_y / 2};
        auto flush = [&]() {
            if (plan.items.empty())
                return;
            char name[64];
            std::snprintf(name, sizeof(name), "layer_%04d.svg", layer_idx);
            write_file((std::filesystem::path(job.svg_dir) / name).string(),
                       emit_layer_svg(plan, profile, {"a", "b"}, SvgMode::simulated,
                                      &realized));
            plan.items.clear();
            realized.clear();
            ++layer_idx;
        };
        for (size_t i = 0; i < program.moves.size(); ++i) {
            const GcodeMove& mv = program.moves[i];
            if (mv.z != cur_z) {
                flush();
                cur_z = mv.z;
            }
            if (mv.extruding) {
                ExtrudeMove ex;
                ex.points = {mv.from - bed_center, mv.to - bed_center};
                plan.items.push_back(ex);
                realized.push_back(weight[i] > 0 ? accum[i] / weight[i] : 0.0);
            } else {
                plan.items.push_back(TravelMove{mv.from - bed_center, mv.to - bed_center});
            }
        }
        flush();
    }
    return result;
}

std::vector<BenchCase> default_bench_suite() {
    return {
        {"palette_s1_n4", 1, 4, 0.0},    {"palette_s1_n8", 1, 8, 0.0},
        {"palette_s1_n12", 1, 12, 0.0},  {"palette_s1_n16", 1, 16, 0.0},
        {"palette_s1_n16_zip", 1, 16, 1.5},
        {"palette_s2_n12", 2, 12, 0.0},  {"palette_s2_n24", 2, 24, 0.0},
        {"palette_s2_n36", 2, 36, 0.0},  {"palette_s2_n48", 2, 48, 0.0},
    };
}

BenchResult run_bench(const std::vector<BenchCase>& cases, int threads) {
    BenchResult result;
    result.csv = "object,size_mm,layers,strategy,colors,zippering,time_s\n";
    for (const BenchCase& c : cases) {
        SliceJob job;
        job.design_text = palette_plate_design();
        job.strategy = c.strategy;
        job.colors = c.colors;
        job.zipper_beta_pct = c.zipper_beta_pct;
        job.threads = threads;
        auto t0 = Clock::now();
        SliceResult r = run_slice(job);
        double secs = ms_since(t0) / 1000.0;
        char line[256];
        std::snprintf(line, sizeof(line), "%s,135x175x2,%d,%d,%d,%s,%.2f\n", c.name.c_str(), 10,
                      c.strategy, c.colors, c.zipper_beta_pct > 0 ? "yes" : "no", secs);
        result.csv += line;
    }
    return result;
}

} // namespace vcad
