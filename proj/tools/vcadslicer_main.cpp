#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "vcadslicer/job.hpp"

namespace {

// exit codes: 0 ok, 2 config, 3 geometry, 4 emission
int exit_code_for(const vcad::Error& e) {
    switch (e.kind()) {
    case vcad::errc::config:
    case vcad::errc::invalid_count:
    case vcad::errc::unsupported:
    case vcad::errc::band_overlap:
    case vcad::errc::out_of_range:
    case vcad::errc::io:
    case vcad::errc::parse:
        return 2;
    case vcad::errc::bed_bounds:
    case vcad::errc::bed_overflow:
    case vcad::errc::state_missing:
    case vcad::errc::invalid_bead:
        return 4;
    default:
        return 3;
    }
}

void print_warnings(const vcad::WarningLog& log) {
    for (const std::string& w : log.messages())
        std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vcadslicer: gradient-informed slicer for implicit multi-material designs"};
    app.require_subcommand(1);

    // slice / preview share a job
    vcad::SliceJob job;
    std::string beta_str;

    auto add_slice_flags = [&](CLI::App* cmd, bool need_output) {
        cmd->add_option("design", job.design_path, "input .vcad design")->required();
        cmd->add_option("-p,--profile", job.profile_path, "machine profile file");
        cmd->add_option("-s,--strategy", job.strategy, "toolpath strategy (1 or 2)")
            ->check(CLI::Range(1, 2));
        cmd->add_option("-n,--colors", job.colors, "palette color count")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--zipper-beta", job.zipper_beta_pct,
                        "zipper overlap as percent of the gradient range");
        cmd->add_option("--layer-height", job.settings.layer_height, "layer height, mm");
        cmd->add_option("--bead-width", job.settings.bead_width, "extrusion bead width, mm");
        cmd->add_option("--resolution", job.settings.resolution, "XY field sampling, mm");
        cmd->add_option("--perimeters", job.settings.perimeters, "perimeter count (strategy 1)");
        cmd->add_option("--infill-density", job.settings.infill_density,
                        "infill density in (0,1]");
        cmd->add_option("--infill-angle", job.settings.infill_angle, "hatch angle, degrees");
        cmd->add_option("--lookahead", job.lookahead_override,
                        "look-ahead distance in mm, or 'auto'");
        cmd->add_option("--fill", job.settings.concentric,
                        "strategy-2 fill: 1 concentric (default), 0 rectilinear");
        cmd->add_option("--threads", job.threads, "worker threads (0 = auto)");
        cmd->add_option("--svg", job.svg_dir, "directory for per-layer SVG previews");
        cmd->add_option("--report", job.report_path, "write a JSON summary report");
        if (need_output)
            cmd->add_option("-o,--output", job.out_gcode, "output .gcode path")->required();
    };

    CLI::App* slice = app.add_subcommand("slice", "compile a design to G-code");
    add_slice_flags(slice, true);

    CLI::App* preview = app.add_subcommand("preview", "slice and write SVG previews only");
    add_slice_flags(preview, false);

    vcad::SimulateJob sim;
    CLI::App* simulate = app.add_subcommand("simulate",
                                            "predict realized composition from G-code");
    simulate->add_option("gcode", sim.gcode_path, "input .gcode")->required();
    simulate->add_option("-p,--profile", sim.profile_path, "machine profile file");
    simulate->add_option("--design", sim.design_path,
                         "design file enabling the boundary-error metric");
    simulate->add_option("--model", sim.model, "chamber model: plug | mix | thermal");
    simulate->add_option("--svg", sim.svg_dir, "directory for realized-color SVGs");
    simulate->add_option("--report", sim.report_path, "write the JSON report");

    std::string bench_out = "bench.csv";
    std::string bench_filter;
    int bench_threads = 0;
    CLI::App* bench = app.add_subcommand("bench", "run the slicing time table");
    bench->add_option("-o,--output", bench_out, "CSV output path");
    bench->add_option("--filter", bench_filter, "run only cases whose name contains this");
    bench->add_option("--threads", bench_threads, "worker threads (0 = auto)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (slice->parsed() || preview->parsed()) {
            if (preview->parsed() && job.svg_dir.empty())
                job.svg_dir = "preview";
            vcad::SliceResult result = vcad::run_slice(job);
            print_warnings(result.warnings);
            std::fprintf(stderr,
                         "sliced %d faces, %.1f mm of path, %zu bytes of gcode in %.2f s\n",
                         result.face_count,
                         [&] {
                             double mm = 0;
                             for (double v : result.per_color_path_mm)
                                 mm += v;
                             return mm;
                         }(),
                         result.gcode.size(), result.times.total_ms / 1000.0);
            return 0;
        }
        if (simulate->parsed()) {
            vcad::SimulateResult result = vcad::run_simulate(sim);
            print_warnings(result.warnings);
            if (result.has_boundary_error)
                std::fprintf(stderr, "boundary error: %+.3f mm\n", result.boundary_error_mm);
            if (sim.report_path.empty())
                std::cout << result.report_json << "\n";
            return 0;
        }
        if (bench->parsed()) {
            std::vector<vcad::BenchCase> cases;
            for (const vcad::BenchCase& c : vcad::default_bench_suite())
                if (bench_filter.empty() || c.name.find(bench_filter) != std::string::npos)
                    cases.push_back(c);
            vcad::BenchResult result = vcad::run_bench(cases, bench_threads);
            std::ofstream out(bench_out);
            out << result.csv;
            std::cout << result.csv;
            return 0;
        }
    } catch (const vcad::Error& e) {
        std::cerr << vcad::errc_name(e.kind()) << ": " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
