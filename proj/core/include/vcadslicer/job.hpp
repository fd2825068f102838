#pragma once

#include <string>
#include <vector>

#include "vcadslicer/simulator.hpp"
#include "vcadslicer/strategy.hpp"

namespace vcad {

struct SliceJob {
    std::string design_path;
    std::string design_text;  // used when design_path is empty (tests)
    std::string design_dir;   // mesh lookup base for design_text
    std::string profile_path; // empty -> default mix profile
    int strategy = 1;
    int colors = 4;
    double zipper_beta_pct = 0.0; // percent of the gradient range
    PrintSettings settings;
    std::string lookahead_override; // "", "auto", or a number in mm
    std::string out_gcode;          // empty -> not written (still returned)
    std::string svg_dir;            // empty -> no previews
    std::string report_path;        // empty -> no report file
    int threads = 0;                // 0 -> hardware concurrency
};

struct StageTimes {
    double geometry_ms = 0.0;
    double assembly_ms = 0.0;
    double emission_ms = 0.0;
    double total_ms = 0.0;
};

struct SliceResult {
    std::string gcode;
    std::vector<LayerPlan> plans;
    SliceInputs inputs; // palette/profile actually used
    WarningLog warnings;
    StageTimes times;
    std::string report_json;
    int face_count = 0;
    double purge_path_mm = 0.0;
    int purge_events = 0;
    std::vector<double> per_color_path_mm;
};

SliceResult run_slice(const SliceJob& job);

struct SimulateJob {
    std::string gcode_path;
    std::string gcode_text;   // used when gcode_path is empty
    std::string profile_path; // empty -> default mix profile
    std::string design_path;  // optional, enables boundary-error metric
    std::string model = "plug";      // plug | mix | thermal
    std::string svg_dir;
    std::string report_path;
};

struct SimulateResult {
    std::vector<RealizedSegment> segments;
    bool has_boundary_error = false;
    double boundary_error_mm = 0.0;
    std::string report_json;
    WarningLog warnings;
};

SimulateResult run_simulate(const SimulateJob& job);

struct BenchCase {
    std::string name;
    int strategy = 1;
    int colors = 4;
    double zipper_beta_pct = 0.0;
};

struct BenchResult {
    std::string csv;
};

// Table-style timing harness over the built-in palette plate fixture
// (135 x 175 x 2 mm, 10 layers).
BenchResult run_bench(const std::vector<BenchCase>& cases, int threads = 0);
std::vector<BenchCase> default_bench_suite();

// Built-in fixture sources shared by bench and tests.
std::string palette_plate_design();

} // namespace vcad
