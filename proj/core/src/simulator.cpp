#include "vcadslicer/simulator.hpp"

#include <cmath>
#include <deque>

namespace vcad {

std::vector<SimMove> moves_from_plans(const std::vector<LayerPlan>& plans,
                                      const PrintSettings& settings) {
    double area = capsule_area(settings.layer_height, settings.bead_width);
    std::vector<SimMove> moves;
    int move_idx = 0;
    for (const LayerPlan& plan : plans) {
        for (const PlanItem& item : plan.items) {
            if (const auto* ev = std::get_if<StateEvent>(&item)) {
                SimMove m;
                m.kind = SimMove::event;
                m.value = ev->state.fraction;
                moves.push_back(m);
            } else if (const auto* tr = std::get_if<TravelMove>(&item)) {
                SimMove m;
                m.kind = SimMove::travel;
                m.from = tr->from;
                m.to = tr->to;
                moves.push_back(m);
            } else if (const auto* ex = std::get_if<ExtrudeMove>(&item)) {
                for (size_t i = 1; i < ex->points.size(); ++i) {
                    double len = (ex->points[i] - ex->points[i - 1]).norm();
                    if (len <= 0)
                        continue;
                    SimMove m;
                    m.kind = SimMove::extrude;
                    m.from = ex->points[i - 1];
                    m.to = ex->points[i];
                    m.volume = len * area;
                    m.source_move = move_idx;
                    moves.push_back(m);
                }
                ++move_idx;
            }
        }
    }
    return moves;
}

std::vector<SimMove> moves_from_gcode(const GcodeProgram& program,
                                      const MachineProfile& profile) {
    double fil_r = profile.filament_diameter / 2.0;
    double fil_area = M_PI * fil_r * fil_r;
    // only the machine's own command class drives composition: a mixing
    // print's M104 lines are temperature housekeeping, not state changes
    auto relevant = [&](const GcodeEventRec& ev) { return ev.state.kind == profile.syntax; };
    std::vector<SimMove> moves;
    size_t ev = 0;
    for (size_t i = 0; i < program.moves.size(); ++i) {
        while (ev < program.events.size() && program.events[ev].before_move == i) {
            if (relevant(program.events[ev])) {
                SimMove m;
                m.kind = SimMove::event;
                m.value = program.events[ev].state.fraction;
                moves.push_back(m);
            }
            ++ev;
        }
        const GcodeMove& g = program.moves[i];
        SimMove m;
        m.from = g.from;
        m.to = g.to;
        m.feed = g.feed;
        m.source_move = int(i);
        if (g.extruding) {
            m.kind = SimMove::extrude;
            m.volume = g.e_delta * fil_area;
        } else {
            m.kind = SimMove::travel;
        }
        moves.push_back(m);
    }
    while (ev < program.events.size()) {
        if (relevant(program.events[ev])) {
            SimMove m;
            m.kind = SimMove::event;
            m.value = program.events[ev].state.fraction;
            moves.push_back(m);
        }
        ++ev;
    }
    return moves;
}

namespace {

double first_commanded(const std::vector<SimMove>& moves) {
    for (const SimMove& m : moves)
        if (m.kind == SimMove::event)
            return m.value;
    return 0.0;
}

std::vector<RealizedSegment> simulate_plug(const std::vector<SimMove>& moves, double v_melt) {
    std::vector<RealizedSegment> out;
    std::deque<std::pair<double, double>> chamber; // (value, volume)
    double commanded = first_commanded(moves);
    if (v_melt > 0)
        chamber.push_back({commanded, v_melt});

    long seq = -1;           // index of the current input edge
    long last_out_seq = -2;  // edge that produced out.back()
    for (const SimMove& m : moves) {
        if (m.kind == SimMove::event) {
            commanded = m.value;
            continue;
        }
        if (m.kind != SimMove::extrude || m.volume <= 0)
            continue;
        ++seq;
        chamber.push_back({commanded, m.volume});
        // pop m.volume from the chamber front; each chunk deposits a
        // sub-segment with that chunk's composition
        double remaining = m.volume;
        double done = 0.0;
        while (remaining > 1e-15 && !chamber.empty()) {
            auto& [val, vol] = chamber.front();
            double take = std::min(vol, remaining);
            double t0 = done / m.volume;
            double t1 = (done + take) / m.volume;
            RealizedSegment seg;
            seg.from = m.from + (m.to - m.from) * t0;
            seg.to = m.from + (m.to - m.from) * t1;
            seg.volume = take;
            seg.commanded = commanded;
            seg.realized = val;
            seg.source_move = m.source_move;
            // merge equal-composition chunks, but only within one input
            // edge so segment positions keep the move-level resolution
            if (!out.empty() && last_out_seq == seq && out.back().realized == seg.realized &&
                out.back().commanded == seg.commanded) {
                out.back().to = seg.to;
                out.back().volume += seg.volume;
            } else {
                out.push_back(seg);
                last_out_seq = seq;
            }
            vol -= take;
            remaining -= take;
            done += take;
            if (vol <= 1e-15)
                chamber.pop_front();
        }
    }
    return out;
}

std::vector<RealizedSegment> simulate_mix(const std::vector<SimMove>& moves, double v_melt) {
    std::vector<RealizedSegment> out;
    double commanded = first_commanded(moves);
    double c = commanded;
    for (const SimMove& m : moves) {
        if (m.kind == SimMove::event) {
            commanded = m.value;
            continue;
        }
        if (m.kind != SimMove::extrude || m.volume <= 0)
            continue;
        if (v_melt > 0)
            c = c + (1.0 - std::exp(-m.volume / v_melt)) * (commanded - c);
        else
            c = commanded;
        RealizedSegment seg;
        seg.from = m.from;
        seg.to = m.to;
        seg.volume = m.volume;
        seg.commanded = commanded;
        seg.realized = c;
        seg.source_move = m.source_move;
        out.push_back(seg);
    }
    return out;
}

} // namespace

std::vector<RealizedSegment> simulate(const std::vector<SimMove>& moves,
                                      const ChamberModel& model) {
    if (model.v_melt < 0)
        throw Error(errc::out_of_range, "melt volume must be >= 0");
    if (model.kind == ChamberKind::plug_flow)
        return simulate_plug(moves, model.v_melt);
    return simulate_mix(moves, model.v_melt);
}

std::vector<RealizedSegment> simulate_thermal(const std::vector<SimMove>& moves, double tau_s) {
    std::vector<RealizedSegment> out;
    double commanded = first_commanded(moves);
    double c = commanded;
    for (const SimMove& m : moves) {
        if (m.kind == SimMove::event) {
            commanded = m.value;
            continue;
        }
        if (m.kind != SimMove::extrude || m.volume <= 0)
            continue;
        double len = (m.to - m.from).norm();
        double dt = m.feed > 0 ? len / m.feed * 60.0 : 0.0;
        if (tau_s > 0 && dt > 0)
            c = c + (1.0 - std::exp(-dt / tau_s)) * (commanded - c);
        else
            c = commanded;
        RealizedSegment seg;
        seg.from = m.from;
        seg.to = m.to;
        seg.volume = m.volume;
        seg.commanded = commanded;
        seg.realized = c;
        seg.source_move = m.source_move;
        out.push_back(seg);
    }
    return out;
}

double realized_boundary_error(const std::vector<RealizedSegment>& segments, double designed_x) {
    if (segments.empty())
        throw Error(errc::no_transition, "no extrusion to analyze");
    bool prev_high = segments.front().realized >= 0.5;
    for (const RealizedSegment& seg : segments) {
        bool high = seg.realized >= 0.5;
        if (high != prev_high) {
            Vec2 mid = (seg.from + seg.to) * 0.5;
            return mid.x - designed_x;
        }
        prev_high = high;
    }
    throw Error(errc::no_transition, "realized composition never crosses 0.5");
}

double realized_boundary_error(const std::vector<RealizedSegment>& segments,
                               const Design& design, double z) {
    BBox3 box = design_bbox(design);
    double y_mid = 0.5 * (box.min.y + box.max.y);
    auto g = [&](double x) { return eval_gradient(design, {x, y_mid, z}) - 0.5; };
    // scan for a sign change, then bisect
    const int steps = 2048;
    double x0 = box.min.x, x1 = box.max.x;
    double prev_x = x0, prev_v = g(x0);
    double lo = x0, hi = x1;
    bool found = false;
    for (int i = 1; i <= steps; ++i) {
        double x = x0 + (x1 - x0) * i / steps;
        double v = g(x);
        if ((prev_v < 0) != (v < 0)) {
            lo = prev_x;
            hi = x;
            found = true;
            break;
        }
        prev_x = x;
        prev_v = v;
    }
    if (!found)
        throw Error(errc::no_transition, "design gradient never crosses 0.5 along x");
    for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        if ((g(lo) < 0) != (g(mid) < 0))
            hi = mid;
        else
            lo = mid;
    }
    return realized_boundary_error(segments, 0.5 * (lo + hi));
}

std::vector<LayerPlan> build_calibration_plans(const CalibrationObject& calib,
                                               double lookahead_mm, WarningLog* warnings) {
    LayerPlan plan;
    plan.index = 0;
    plan.z = calib.layer_height * 0.5;
    plan.print_z = calib.layer_height;

    double w = calib.bead;
    int passes = int(std::floor(calib.length_x / w + 1e-9));
    double x_start = -calib.length_x / 2;
    double y0 = 0.0, y1 = calib.pass_length;

    CommandState low;
    low.kind = SyntaxClass::mix;
    low.mix_a = 1.0;
    low.mix_b = 0.0;
    low.fraction = 0.0;
    CommandState high;
    high.kind = SyntaxClass::mix;
    high.mix_a = 0.0;
    high.mix_b = 1.0;
    high.fraction = 1.0;

    ExtrudeMove before, after;
    before.role = after.role = PathRole::infill;
    before.color = 0;
    after.color = 1;
    bool up = true;
    bool flipped = false;
    Polyline* current = &before.points;
    for (int i = 0; i < passes; ++i) {
        double x = x_start + (i + 0.5) * w;
        if (!flipped && x >= 0.0) {
            flipped = true;
            if (!current->empty())
                after.points.push_back(current->back());
            current = &after.points;
        }
        double ya = up ? y0 : y1;
        double yb = up ? y1 : y0;
        if (current->empty())
            current->push_back({x, ya});
        else
            current->push_back({x, current->back().y});
        current->push_back({x, yb});
        up = !up;
    }

    plan.items.push_back(StateEvent{low, 0});
    if (before.points.size() >= 2) {
        plan.items.push_back(TravelMove{{0, 0}, before.points.front()});
        plan.items.push_back(before);
    }
    plan.items.push_back(StateEvent{high, 1});
    if (after.points.size() >= 2)
        plan.items.push_back(after);

    std::vector<LayerPlan> plans{plan};
    if (lookahead_mm > 0)
        plans = apply_lookahead(std::move(plans), lookahead_mm, warnings);
    return plans;
}

double calibrate_lookahead(const MachineProfile& profile, const CalibrationObject& calib,
                           int max_iters, WarningLog* warnings) {
    PrintSettings settings;
    settings.layer_height = calib.layer_height;
    settings.bead_width = calib.bead;
    ChamberModel model{ChamberKind::plug_flow, profile.v_melt};

    double lookahead = 0.0;
    for (int iter = 0; iter < max_iters; ++iter) {
        auto plans = build_calibration_plans(calib, lookahead, warnings);
        auto segs = simulate(moves_from_plans(plans, settings), model);
        double err = realized_boundary_error(segs, 0.0);
        if (std::abs(err) < calib.bead)
            return lookahead;
        double s_count = std::ceil(std::abs(err) / calib.bead - 1e-9);
        lookahead += (err > 0 ? 1.0 : -1.0) * s_count * calib.pass_length;
        if (lookahead < 0)
            lookahead = 0;
    }
    throw Error(errc::non_convergence,
                "look-ahead calibration did not converge in " + std::to_string(max_iters) +
                    " iterations");
}

} // namespace vcad
