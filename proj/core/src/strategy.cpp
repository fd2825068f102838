#include "vcadslicer/strategy.hpp"

#include <cmath>
#include <map>

#include "vcadslicer/gcode.hpp"

namespace vcad {

double LayerPlan::extrusion_length() const {
    double len = 0.0;
    for (const PlanItem& item : items)
        if (const auto* e = std::get_if<ExtrudeMove>(&item))
            len += e->length();
    return len;
}

int layer_count(const BBox3& bbox, double layer_height) {
    double height = bbox.max.z - bbox.min.z;
    int n = int(std::floor(height / layer_height + 1e-9));
    return std::max(n, 1);
}

double layer_z(const BBox3& bbox, double layer_height, int index) {
    return bbox.min.z + (index + 0.5) * layer_height;
}

namespace {

// Contour-derived paths carry a vertex every sample cell; trim them to the
// machine-relevant tolerance before they reach the plan.
Polyline open_points(const ToolPath& path, double tol) {
    Polyline pts = path.points;
    if (path.closed && pts.size() > 1)
        pts.push_back(pts.front());
    return simplify_polyline(pts, tol);
}

std::vector<ToolPath> face_fill(const ColoredFace& face, const SliceInputs& in,
                                WarningLog* warnings) {
    double w = in.settings.bead_width;
    std::vector<PolyWithHoles> shrunk = inset_region({face.poly}, 0.5 * w);
    if (shrunk.empty()) {
        warn(warnings, "FaceTooThin: face at (" + std::to_string(face.rep.x) + ", " +
                           std::to_string(face.rep.y) + ") vanishes under a half-bead inset");
        return {};
    }
    std::vector<ToolPath> fill;
    if (in.settings.concentric) {
        auto loops = concentric_fill(face.poly, w, warnings);
        fill.insert(fill.end(), loops.begin(), loops.end());
    } else {
        for (const PolyWithHoles& poly : shrunk) {
            ToolPath tp;
            tp.role = PathRole::perimeter;
            tp.closed = true;
            tp.points = poly.outer;
            fill.push_back(tp);
            for (const Ring& h : poly.holes) {
                ToolPath hp;
                hp.role = PathRole::perimeter;
                hp.closed = true;
                hp.points = h;
                fill.push_back(hp);
            }
        }
        std::vector<PolyWithHoles> hatch_region = inset_region({face.poly}, w);
        for (const PolyWithHoles& poly : hatch_region) {
            auto hatch = rectilinear_infill(poly, w, in.settings.infill_angle);
            fill.insert(fill.end(), hatch.begin(), hatch.end());
        }
    }
    return fill;
}

} // namespace

LayerGeometry compute_layer_geometry(const SliceInputs& in, int layer_index) {
    LayerGeometry geo;
    geo.index = layer_index;
    geo.z = layer_z(in.bbox, in.settings.layer_height, layer_index);
    geo.print_z = in.bbox.min.z + (layer_index + 1) * in.settings.layer_height;

    const Design& design = *in.design;
    double res = in.settings.resolution;
    double z = geo.z;
    WarningLog* w = &geo.warnings;

    // geometry cross-section
    Contour geometry;
    auto mesh_geo = design_mesh_geometry(design);
    if (mesh_geo) {
        geometry = slice_mesh(*mesh_geo->mesh, z - mesh_geo->offset.z, kStitchTol, w);
        if (mesh_geo->offset.x != 0 || mesh_geo->offset.y != 0) {
            Vec2 shift{mesh_geo->offset.x, mesh_geo->offset.y};
            for (Ring& r : geometry.polygons)
                for (Vec2& p : r)
                    p += shift;
            for (Polyline& l : geometry.polylines)
                for (Vec2& p : l)
                    p += shift;
        }
    } else {
        BBox2 box = in.bbox.xy().inflated(2 * res);
        ScalarField2 sdf = [&design, z](double x, double y) {
            return eval_sdf(design, {x, y, z});
        };
        ScalarGrid grid = sample_grid(sdf, box, res);
        geometry = stitch_segments(marching_squares(grid, 0.0, sdf), kStitchTol, w);
    }
    if (geometry.polygons.empty())
        return geo; // empty layer

    std::vector<PolyWithHoles> polys = assemble_polys(geometry.polygons);
    for (const PolyWithHoles& p : polys)
        geo.cross_section_area += poly_area(p);

    // material iso-curves at palette boundaries (or zipper band edges)
    std::vector<double> isos;
    if (in.zipper.enabled()) {
        for (const ZipperSpec::Band& b : in.zipper.bands) {
            isos.push_back(b.lo);
            isos.push_back(b.hi);
        }
    } else {
        isos = in.palette.boundaries;
    }

    Contour materials;
    if (!isos.empty()) {
        BBox2 box = in.bbox.xy().inflated(2 * res);
        ScalarField2 grad = [&design, z](double x, double y) {
            return eval_gradient(design, {x, y, z}, nullptr);
        };
        ScalarGrid grid = sample_grid(grad, box, res);
        for (double iso : isos) {
            Contour c = stitch_segments(marching_squares(grid, iso, grad), kStitchTol, w);
            for (Ring& r : c.polygons)
                materials.polygons.push_back(std::move(r));
            for (Polyline& l : c.polylines)
                materials.polylines.push_back(std::move(l));
        }
    }

    Arrangement arr = build_arrangement(geometry, materials, kStitchTol);

    std::function<bool(const Vec2&)> inside;
    if (mesh_geo) {
        inside = [polys](const Vec2& p) {
            for (const PolyWithHoles& poly : polys)
                if (point_in_poly(p, poly))
                    return true;
            return false;
        };
    } else {
        inside = [&design, z](const Vec2& p) { return eval_sdf(design, {p.x, p.y, z}) <= 0.0; };
    }

    std::vector<FaceGeometry> bounded = extract_bounded_faces(arr, inside);
    auto grad_at = [&design, z, w](const Vec2& p) {
        return eval_gradient(design, {p.x, p.y, z}, w);
    };
    double sliver = 0.25 * in.settings.bead_width * in.settings.bead_width;
    geo.faces = classify_faces(arr, bounded, grad_at, in.palette, sliver,
                               in.zipper.enabled() ? &in.zipper : nullptr, w);

    if (in.strategy == 1) {
        std::vector<ToolPath> paths;
        double bead = in.settings.bead_width;
        for (const PolyWithHoles& poly : polys) {
            auto per = generate_perimeters(poly, in.settings.perimeters, bead);
            paths.insert(paths.end(), per.begin(), per.end());
        }
        if (in.settings.infill_density > 0) {
            std::vector<PolyWithHoles> infill_region =
                inset_region(polys, in.settings.perimeters * bead);
            double spacing = bead / in.settings.infill_density;
            for (const PolyWithHoles& poly : infill_region) {
                auto hatch = rectilinear_infill(poly, spacing, in.settings.infill_angle);
                paths.insert(paths.end(), hatch.begin(), hatch.end());
            }
        }
        geo.labeled = clip_paths_to_faces(paths, geo.faces, in.settings.min_segment, w);
        if (in.zipper.enabled())
            geo.labeled = apply_zippering(std::move(geo.labeled), in.zipper, in.palette);
    } else {
        for (const ColoredFace& face : geo.faces) {
            std::vector<ToolPath> fill = face_fill(face, in, w);
            if (!fill.empty())
                geo.fills.push_back({face.color, std::move(fill)});
        }
    }
    return geo;
}

std::vector<LabeledPath> apply_zippering(std::vector<LabeledPath> paths,
                                         const ZipperSpec& zipper, const Palette& palette) {
    if (!zipper.enabled())
        return paths;
    std::map<int, int> band_counter;
    for (LabeledPath& lp : paths) {
        if (lp.band < 0)
            continue;
        int k = band_counter[lp.band]++;
        // band b straddles boundary b+1/N between colors b and b+1
        lp.color = (k % 2 == 0) ? lp.band : lp.band + 1;
        if (lp.color >= palette.n)
            lp.color = palette.n - 1;
    }
    return paths;
}

LayerPlan assemble_layer_plan(const LayerGeometry& geo, const SliceInputs& in,
                              SliceState& state) {
    LayerPlan plan;
    plan.index = geo.index;
    plan.z = geo.z;
    plan.print_z = geo.print_z;

    // bucket paths per color, preserving generation order
    double tol = in.settings.resolution / 8.0;
    std::vector<std::vector<std::pair<Polyline, PathRole>>> groups(size_t(in.palette.n));
    if (in.strategy == 1) {
        for (const LabeledPath& lp : geo.labeled)
            groups[size_t(lp.color)].push_back({open_points(lp.path, tol), lp.path.role});
    } else {
        for (const auto& [color, fills] : geo.fills)
            for (const ToolPath& tp : fills)
                groups[size_t(color)].push_back({open_points(tp, tol), tp.role});
    }

    std::vector<int> order = traversal_order(in.palette, geo.index, in.components);
    for (int color : order) {
        auto& group = groups[size_t(color)];
        if (group.empty())
            continue;
        CommandState cmd = map_color(in.palette, color, in.profile);
        if (!state.state || *state.state != cmd) {
            plan.items.push_back(StateEvent{cmd, color});
            state.state = cmd;
        }
        for (auto& [pts, role] : group) {
            if (pts.size() < 2)
                continue;
            if (!state.has_position || (state.position - pts.front()).norm() > 1e-9)
                plan.items.push_back(TravelMove{state.position, pts.front()});
            state.position = pts.back();
            state.has_position = true;
            ExtrudeMove move;
            move.points = std::move(pts);
            move.role = role;
            move.color = color;
            plan.items.push_back(std::move(move));
        }
    }
    return plan;
}

PurgeTowerSpec plan_purge_towers(const SliceInputs& in) {
    PurgeTowerSpec spec;
    spec.spacing = in.profile.purge_spacing > 0 ? in.profile.purge_spacing
                                                : in.settings.bead_width;
    if (in.profile.v_melt <= 0)
        return spec;
    double area = capsule_area(in.settings.layer_height, in.settings.bead_width);
    spec.purge_length = in.profile.v_melt / area;
    double raw_side = std::sqrt(spec.purge_length * spec.spacing);
    spec.side = std::ceil(raw_side * 10.0 - 1e-9) / 10.0;

    if (!in.profile.purge_locations.empty()) {
        // profile gives bed coordinates; plans run in design coordinates
        Vec2 bed_center{in.profile.bed_x / 2, in.profile.bed_y / 2};
        for (const Vec2& loc : in.profile.purge_locations)
            spec.locations.push_back(loc - bed_center);
        if (int(spec.locations.size()) < in.palette.n)
            throw Error(errc::bed_overflow,
                        "profile lists " + std::to_string(spec.locations.size()) +
                            " purge locations for " + std::to_string(in.palette.n) + " colors");
        spec.locations.resize(size_t(in.palette.n));
        return spec;
    }

    // auto layout: rows in front of the part, wrapping across the bed
    const double gap = 2.0;
    const double margin = 2.0;
    BBox2 part = in.bbox.xy();
    Vec2 bed_min{-in.profile.bed_x / 2, -in.profile.bed_y / 2};
    Vec2 bed_max{in.profile.bed_x / 2, in.profile.bed_y / 2};
    double x0 = bed_min.x + margin;
    double x_limit = bed_max.x - margin - spec.side;
    double x = x0;
    double y = std::min(part.min.y, bed_max.y) - gap - spec.side;
    for (int c = 0; c < in.palette.n; ++c) {
        if (x > x_limit + 1e-9) {
            x = x0;
            y -= spec.side + gap;
        }
        if (y < bed_min.y + margin || x > x_limit + 1e-9)
            throw Error(errc::bed_overflow,
                        "purge towers do not fit on the bed (" +
                            std::to_string(in.palette.n) + " towers, side " +
                            std::to_string(spec.side) + " mm)");
        spec.locations.push_back({x, y});
        x += spec.side + gap;
    }
    return spec;
}

namespace {

std::vector<ExtrudeMove> tower_paths(const PurgeTowerSpec& towers, int color, double bead) {
    std::vector<ExtrudeMove> out;
    Vec2 o = towers.locations[size_t(color)];
    double s = towers.side;
    double w = bead;

    auto push_square = [&](double inset) {
        double a = o.x + inset, b = o.x + s - inset;
        double c = o.y + inset, d = o.y + s - inset;
        if (b - a < w || d - c < w)
            return false;
        ExtrudeMove m;
        m.role = PathRole::purge;
        m.color = color;
        m.points = {{a, c}, {b, c}, {b, d}, {a, d}, {a, c}};
        out.push_back(std::move(m));
        return true;
    };
    push_square(0.5 * w);

    // serpentine fill inside the perimeter
    double a = o.x + w, b = o.x + s - w;
    double c = o.y + w, d = o.y + s - w;
    if (b - a > 0 && d - c > 0) {
        ExtrudeMove m;
        m.role = PathRole::purge;
        m.color = color;
        int lines = int(std::floor((d - c) / towers.spacing + 1e-9));
        for (int i = 0; i < lines; ++i) {
            double y = c + (i + 0.5) * towers.spacing;
            if (i % 2 == 0) {
                m.points.push_back({a, y});
                m.points.push_back({b, y});
            } else {
                m.points.push_back({b, y});
                m.points.push_back({a, y});
            }
        }
        if (m.points.size() >= 2)
            out.push_back(std::move(m));
    }

    // top up with repeated perimeter loops if the tower print is shorter
    // than the purge length
    double total = 0;
    for (const ExtrudeMove& m : out)
        total += m.length();
    double loop_inset = 0.5 * w;
    while (total < towers.purge_length && push_square(loop_inset))
        total += out.back().length();
    return out;
}

// rewrites travel endpoints after insertions changed the path sequence
void rethread_travels(LayerPlan& plan, SliceState& state) {
    std::vector<PlanItem> items;
    items.reserve(plan.items.size());
    for (PlanItem& item : plan.items) {
        if (std::holds_alternative<TravelMove>(item))
            continue; // regenerate below
        if (auto* e = std::get_if<ExtrudeMove>(&item)) {
            if (!state.has_position || (state.position - e->points.front()).norm() > 1e-9)
                items.push_back(TravelMove{state.position, e->points.front()});
            state.position = e->points.back();
            state.has_position = true;
        }
        items.push_back(std::move(item));
    }
    plan.items = std::move(items);
}

} // namespace

LayerPlan insert_purge_towers(const LayerPlan& plan, const PurgeTowerSpec& towers,
                              const SliceInputs& in,
                              std::optional<double> incoming_fraction) {
    if (towers.purge_length <= 0 || towers.locations.empty())
        return plan;
    double threshold = in.profile.purge_threshold;
    std::optional<double> current = incoming_fraction;
    LayerPlan out;
    out.index = plan.index;
    out.z = plan.z;
    out.print_z = plan.print_z;
    for (const PlanItem& item : plan.items) {
        out.items.push_back(item);
        if (const auto* ev = std::get_if<StateEvent>(&item)) {
            bool purge = !current || std::abs(ev->state.fraction - *current) > threshold;
            current = ev->state.fraction;
            if (purge)
                for (ExtrudeMove& m : tower_paths(towers, ev->color, in.settings.bead_width))
                    out.items.push_back(std::move(m));
        }
    }
    return out;
}

LayerPlan slice_layer_strategy1(const SliceInputs& in, SliceState& state, int layer_index,
                                const PurgeTowerSpec& towers) {
    LayerGeometry geo = compute_layer_geometry(in, layer_index);
    SliceState at_layer_start = state;
    LayerPlan plan = assemble_layer_plan(geo, in, state);
    std::optional<double> incoming;
    if (at_layer_start.state)
        incoming = at_layer_start.state->fraction;
    plan = insert_purge_towers(plan, towers, in, incoming);
    // travels were generated against the pre-tower sequence; rebuild them
    SliceState rethread = at_layer_start;
    rethread_travels(plan, rethread);
    state.position = rethread.position;
    state.has_position = rethread.has_position;
    return plan;
}

LayerPlan slice_layer_strategy2(const SliceInputs& in, SliceState& state, int layer_index) {
    LayerGeometry geo = compute_layer_geometry(in, layer_index);
    return assemble_layer_plan(geo, in, state);
}

namespace {

struct PendingEvent {
    double target; // cumulative extrusion position
    StateEvent event;
    size_t order;
};

} // namespace

std::vector<LayerPlan> apply_lookahead(std::vector<LayerPlan> plans, double distance_mm,
                                       WarningLog* warnings) {
    if (distance_mm < 0)
        throw Error(errc::out_of_range, "look-ahead distance must be >= 0");
    if (distance_mm == 0)
        return plans;

    // collect events with their cumulative extrusion positions
    std::vector<PendingEvent> events;
    double s = 0.0;
    for (const LayerPlan& plan : plans)
        for (const PlanItem& item : plan.items) {
            if (const auto* e = std::get_if<ExtrudeMove>(&item))
                s += e->length();
            else if (const auto* ev = std::get_if<StateEvent>(&item)) {
                double target = s - distance_mm;
                if (target < 0) {
                    warn(warnings, "look-ahead clamps a state change to the print start");
                    target = 0;
                }
                events.push_back({target, *ev, events.size()});
            }
        }
    std::stable_sort(events.begin(), events.end(), [](const PendingEvent& a,
                                                      const PendingEvent& b) {
        return a.target < b.target;
    });

    std::vector<LayerPlan> out;
    out.reserve(plans.size());
    size_t next_ev = 0;
    s = 0.0;
    for (LayerPlan& plan : plans) {
        LayerPlan np;
        np.index = plan.index;
        np.z = plan.z;
        np.print_z = plan.print_z;
        for (PlanItem& item : plan.items) {
            if (std::holds_alternative<StateEvent>(item))
                continue; // re-inserted at relocated positions
            if (auto* e = std::get_if<ExtrudeMove>(&item)) {
                // flush events due before this move
                while (next_ev < events.size() && events[next_ev].target <= s + 1e-12) {
                    np.items.push_back(events[next_ev].event);
                    ++next_ev;
                }
                double len = e->length();
                ExtrudeMove rest = std::move(*e);
                double rest_start = s;
                while (next_ev < events.size() && events[next_ev].target < rest_start +
                                                                               rest.length() -
                                                                               1e-12) {
                    double cut = events[next_ev].target - rest_start;
                    // split rest at arc length cut
                    Polyline head;
                    head.push_back(rest.points.front());
                    double acc = 0.0;
                    size_t i = 1;
                    for (; i < rest.points.size(); ++i) {
                        double seg = (rest.points[i] - rest.points[i - 1]).norm();
                        if (acc + seg >= cut - 1e-15)
                            break;
                        acc += seg;
                        head.push_back(rest.points[i]);
                    }
                    Vec2 a = rest.points[i - 1];
                    Vec2 b = rest.points[i];
                    double seg = (b - a).norm();
                    double t = seg > 0 ? (cut - acc) / seg : 0.0;
                    t = std::clamp(t, 0.0, 1.0);
                    Vec2 split = a + (b - a) * t;
                    head.push_back(split);

                    Polyline tail;
                    tail.push_back(split);
                    for (size_t k = i; k < rest.points.size(); ++k)
                        tail.push_back(rest.points[k]);

                    if (polyline_length(head) > 1e-12) {
                        ExtrudeMove hm;
                        hm.points = std::move(head);
                        hm.role = rest.role;
                        hm.color = rest.color;
                        np.items.push_back(std::move(hm));
                    }
                    np.items.push_back(events[next_ev].event);
                    ++next_ev;
                    rest_start += cut;
                    rest.points = std::move(tail);
                }
                np.items.push_back(std::move(rest));
                s += len;
            } else {
                // travels flush events due at the current position first
                while (next_ev < events.size() && events[next_ev].target <= s + 1e-12) {
                    np.items.push_back(events[next_ev].event);
                    ++next_ev;
                }
                np.items.push_back(std::move(item));
            }
        }
        out.push_back(std::move(np));
    }
    // any stragglers (e.g. events after the last extrusion)
    while (next_ev < events.size()) {
        out.back().items.push_back(events[next_ev].event);
        ++next_ev;
    }
    return out;
}

} // namespace vcad
