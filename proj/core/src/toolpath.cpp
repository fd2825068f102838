#include "vcadslicer/toolpath.hpp"

#include <cmath>

namespace vcad {

namespace {

constexpr double kMiterLimit = 2.0;

Ring orient_ring(const Ring& ring, bool ccw) {
    Ring r = ring;
    if ((ring_signed_area(r) > 0) != ccw)
        std::reverse(r.begin(), r.end());
    return r;
}

// Shifts every edge to its left by d and joins neighbours by miter (within
// the limit) or bevel. Interior must be on the left.
Ring offset_ring_raw(const Ring& ring, double d) {
    size_t n = ring.size();
    Ring out;
    out.reserve(n + 8);
    for (size_t i = 0; i < n; ++i) {
        const Vec2& prev = ring[(i + n - 1) % n];
        const Vec2& cur = ring[i];
        const Vec2& next = ring[(i + 1) % n];
        Vec2 d0 = (cur - prev).normalized();
        Vec2 d1 = (next - cur).normalized();
        Vec2 n0 = d0.perp();
        Vec2 n1 = d1.perp();
        double cross = d0.cross(d1);
        if (std::abs(cross) < 1e-12) {
            if (d0.dot(d1) >= 0) {
                out.push_back(cur + n0 * d); // straight-through
            } else {
                out.push_back(cur + n0 * d); // U-turn spike: bevel
                out.push_back(cur + n1 * d);
            }
            continue;
        }
        // intersection of the two shifted edge lines
        Vec2 a = cur + n0 * d;
        Vec2 b = cur + n1 * d;
        double t = (b - a).cross(d1) / cross;
        Vec2 miter = a + d0 * t;
        if ((miter - cur).norm() > kMiterLimit * std::abs(d)) {
            out.push_back(a);
            out.push_back(b);
        } else {
            out.push_back(miter);
        }
    }
    return simplify_collinear(out);
}

Ring canonical_start(Ring ring) {
    if (ring.size() < 2)
        return ring;
    size_t best = 0;
    for (size_t i = 1; i < ring.size(); ++i)
        if (lex_less(ring[i], ring[best]))
            best = i;
    std::rotate(ring.begin(), ring.begin() + best, ring.end());
    return ring;
}

} // namespace

std::vector<PolyWithHoles> inset_region(const std::vector<PolyWithHoles>& region, double d) {
    if (d <= 0)
        return region;

    std::vector<Ring> raw_rings;
    std::vector<Segment2> segments;
    for (const PolyWithHoles& poly : region) {
        if (poly.outer.size() < 3)
            continue;
        Ring outer = orient_ring(poly.outer, true);
        // shrinking below the inradius empties the outer ring quickly;
        // offsetting still handles it via the winding test
        Ring off = offset_ring_raw(outer, d);
        if (off.size() >= 3)
            raw_rings.push_back(off);
        for (const Ring& hole : poly.holes) {
            if (hole.size() < 3)
                continue;
            Ring h = orient_ring(hole, false);
            Ring offh = offset_ring_raw(h, d);
            if (offh.size() >= 3)
                raw_rings.push_back(offh);
        }
    }
    if (raw_rings.empty())
        return {};
    for (const Ring& r : raw_rings) {
        size_t n = r.size();
        for (size_t i = 0; i < n; ++i)
            segments.push_back({r[i], r[(i + 1) % n]});
    }

    Arrangement arr = build_arrangement_from_segments(segments);
    std::vector<FaceGeometry> faces = extract_bounded_faces(arr);
    if (faces.empty())
        return {};

    // union semantics (positive winding over the raw offset curves) plus a
    // true-depth check: eroding past a region's inradius leaves a phantom
    // point-reflected ring that still winds positively, but its interior is
    // shallower than d
    auto depth = [&region](const Vec2& p) {
        double best = std::numeric_limits<double>::max();
        for (const PolyWithHoles& poly : region)
            best = std::min(best, signed_distance_poly(p, poly));
        return best;
    };
    double slack = std::max(1e-9, 1e-6 * d);
    std::vector<char> keep(arr.faces.size(), 0);
    bool any = false;
    for (const FaceGeometry& fg : faces) {
        int wn = 0;
        for (const Ring& r : raw_rings)
            wn += winding_number(fg.rep, r);
        if (wn > 0 && depth(fg.rep) <= -d + slack) {
            keep[size_t(fg.face_id)] = 1;
            any = true;
        }
    }
    if (!any)
        return {};
    std::vector<PolyWithHoles> result = face_union_boundary(arr, keep);
    for (PolyWithHoles& poly : result) {
        poly.outer = canonical_start(orient_ring(poly.outer, true));
        for (Ring& h : poly.holes)
            h = canonical_start(orient_ring(h, false));
    }
    return result;
}

std::vector<ToolPath> generate_perimeters(const PolyWithHoles& outline, int count, double w) {
    std::vector<ToolPath> paths;
    if (outline.outer.size() < 3 || std::abs(ring_signed_area(outline.outer)) <= 0)
        return paths;
    std::vector<PolyWithHoles> base{outline};
    for (int k = 0; k < count; ++k) {
        std::vector<PolyWithHoles> loop = inset_region(base, (k + 0.5) * w);
        if (loop.empty())
            break;
        for (const PolyWithHoles& poly : loop) {
            ToolPath tp;
            tp.role = PathRole::perimeter;
            tp.closed = true;
            tp.points = poly.outer;
            paths.push_back(tp);
            for (const Ring& hole : poly.holes) {
                ToolPath hp;
                hp.role = PathRole::perimeter;
                hp.closed = true;
                hp.points = hole;
                paths.push_back(hp);
            }
        }
    }
    return paths;
}

std::vector<ToolPath> rectilinear_infill(const PolyWithHoles& region, double spacing,
                                         double angle_deg) {
    std::vector<ToolPath> paths;
    if (region.outer.size() < 3 || spacing <= 0)
        return paths;

    double rad = angle_deg * M_PI / 180.0;
    double c = std::cos(-rad), s = std::sin(-rad);
    auto fwd = [&](const Vec2& p) { return Vec2{p.x * c - p.y * s, p.x * s + p.y * c}; };
    double ci = std::cos(rad), si = std::sin(rad);
    auto back = [&](const Vec2& p) { return Vec2{p.x * ci - p.y * si, p.x * si + p.y * ci}; };

    std::vector<Ring> rings;
    rings.push_back({});
    for (const Vec2& p : region.outer)
        rings[0].push_back(fwd(p));
    for (const Ring& h : region.holes) {
        Ring r;
        for (const Vec2& p : h)
            r.push_back(fwd(p));
        rings.push_back(std::move(r));
    }

    BBox2 box = ring_bbox(rings[0]);
    struct Chord {
        double x0, x1, y;
        bool taken = false;
    };
    std::vector<std::vector<Chord>> lines;
    int nlines = int(std::floor((box.height()) / spacing + 1e-9));
    for (int i = 0; i < nlines; ++i) {
        double y = box.min.y + (i + 0.5) * spacing;
        if (y >= box.max.y)
            break;
        std::vector<double> xs;
        for (const Ring& ring : rings) {
            size_t n = ring.size();
            for (size_t a = 0, b = n - 1; a < n; b = a++) {
                const Vec2& p = ring[b];
                const Vec2& q = ring[a];
                if ((q.y > y) != (p.y > y))
                    xs.push_back(q.x + (y - q.y) / (p.y - q.y) * (p.x - q.x));
            }
        }
        std::sort(xs.begin(), xs.end());
        std::vector<Chord> row;
        for (size_t k = 0; k + 1 < xs.size(); k += 2)
            if (xs[k + 1] - xs[k] > 1e-9)
                row.push_back({xs[k], xs[k + 1], y});
        lines.push_back(std::move(row));
    }

    // connector validity: stays inside the (rotated) region
    auto inside = [&](const Vec2& p) {
        if (!point_in_ring(p, rings[0]))
            return false;
        for (size_t k = 1; k < rings.size(); ++k)
            if (point_in_ring(p, rings[k]))
                return false;
        return true;
    };
    auto connector_ok = [&](const Vec2& a, const Vec2& b) {
        if ((b - a).norm() > spacing * 3.0)
            return false;
        for (double t : {0.25, 0.5, 0.75})
            if (!inside(a + (b - a) * t))
                return false;
        return true;
    };

    // serpentine: chain nearest continuable chords line by line
    for (size_t i = 0; i < lines.size(); ++i) {
        for (size_t j = 0; j < lines[i].size(); ++j) {
            if (lines[i][j].taken)
                continue;
            Polyline pts;
            bool rightward = true;
            lines[i][j].taken = true;
            pts.push_back({lines[i][j].x0, lines[i][j].y});
            pts.push_back({lines[i][j].x1, lines[i][j].y});
            size_t row = i;
            while (row + 1 < lines.size()) {
                Vec2 end = pts.back();
                size_t next_row = row + 1;
                int best = -1;
                double best_dist = std::numeric_limits<double>::max();
                for (size_t k = 0; k < lines[next_row].size(); ++k) {
                    const Chord& cand = lines[next_row][k];
                    if (cand.taken)
                        continue;
                    double dist = std::min(std::abs(cand.x0 - end.x), std::abs(cand.x1 - end.x));
                    if (dist < best_dist) {
                        best_dist = dist;
                        best = int(k);
                    }
                }
                if (best < 0)
                    break;
                Chord& cand = lines[next_row][size_t(best)];
                // enter at the nearer endpoint, leave at the other
                double enter = rightward ? cand.x1 : cand.x0;
                double exit = rightward ? cand.x0 : cand.x1;
                if (!connector_ok(end, {enter, cand.y}))
                    break;
                cand.taken = true;
                pts.push_back({enter, cand.y});
                pts.push_back({exit, cand.y});
                rightward = !rightward;
                row = next_row;
            }
            ToolPath tp;
            tp.role = PathRole::infill;
            tp.closed = false;
            tp.points.reserve(pts.size());
            for (const Vec2& p : pts)
                tp.points.push_back(back(p));
            paths.push_back(std::move(tp));
        }
    }
    return paths;
}

std::vector<ToolPath> concentric_fill(const PolyWithHoles& region, double w,
                                      WarningLog* warnings) {
    std::vector<ToolPath> paths;
    std::vector<PolyWithHoles> base{region};
    double d = 0.5 * w;
    for (;;) {
        std::vector<PolyWithHoles> loop = inset_region(base, d);
        if (loop.empty())
            break;
        for (const PolyWithHoles& poly : loop) {
            ToolPath tp;
            tp.role = PathRole::infill;
            tp.closed = true;
            tp.points = poly.outer;
            paths.push_back(tp);
            for (const Ring& hole : poly.holes) {
                ToolPath hp;
                hp.role = PathRole::infill;
                hp.closed = true;
                hp.points = hole;
                paths.push_back(hp);
            }
        }
        d += w;
    }
    if (paths.empty())
        warn(warnings, "concentric fill: region thinner than one bead width, nothing to fill");
    return paths;
}

namespace {

struct FaceIndex {
    const std::vector<ColoredFace>* faces;
    std::vector<BBox2> bboxes;

    explicit FaceIndex(const std::vector<ColoredFace>& f) : faces(&f) {
        bboxes.reserve(f.size());
        for (const ColoredFace& cf : f)
            bboxes.push_back(ring_bbox(cf.poly.outer));
    }

    int find(const Vec2& p) const {
        for (size_t i = 0; i < faces->size(); ++i) {
            if (!bboxes[i].contains(p))
                continue;
            if (point_in_poly(p, (*faces)[i].poly))
                return int(i);
        }
        return -1;
    }
};

Vec2 point_at_arclength(const Polyline& pts, double target) {
    double acc = 0.0;
    for (size_t i = 1; i < pts.size(); ++i) {
        double len = (pts[i] - pts[i - 1]).norm();
        if (acc + len >= target && len > 0) {
            double t = (target - acc) / len;
            return pts[i - 1] + (pts[i] - pts[i - 1]) * t;
        }
        acc += len;
    }
    return pts.back();
}

} // namespace

std::vector<LabeledPath> clip_paths_to_faces(const std::vector<ToolPath>& paths,
                                             const std::vector<ColoredFace>& faces,
                                             double min_segment, WarningLog* warnings) {
    // spatial hash over all face boundary edges
    struct BEdge {
        Vec2 a, b;
    };
    std::vector<BEdge> bedges;
    for (const ColoredFace& cf : faces) {
        auto add_ring = [&](const Ring& r) {
            size_t n = r.size();
            for (size_t i = 0; i < n; ++i)
                bedges.push_back({r[i], r[(i + 1) % n]});
        };
        add_ring(cf.poly.outer);
        for (const Ring& h : cf.poly.holes)
            add_ring(h);
    }
    double avg = 0.0;
    for (const BEdge& e : bedges)
        avg += (e.b - e.a).norm();
    avg = bedges.empty() ? 1.0 : avg / double(bedges.size());
    SegmentGrid grid(std::max(avg * 2.0, 1e-3));
    for (size_t i = 0; i < bedges.size(); ++i)
        grid.insert(int(i), bedges[i].a, bedges[i].b);

    FaceIndex index(faces);

    std::vector<LabeledPath> out;
    int short_pieces = 0;
    int gen = 0;
    std::vector<int> cands;
    for (size_t pi = 0; pi < paths.size(); ++pi) {
        const ToolPath& path = paths[pi];
        // closed paths walk their closing edge too
        Polyline pts = path.points;
        if (path.closed && pts.size() > 1)
            pts.push_back(pts.front());
        if (pts.size() < 2)
            continue;

        // cut parameters in cumulative arc length
        std::vector<double> cuts;
        double acc = 0.0;
        for (size_t i = 1; i < pts.size(); ++i) {
            Vec2 a = pts[i - 1], b = pts[i];
            double len = (b - a).norm();
            if (len <= 0)
                continue;
            grid.query(a, b, cands);
            for (int e : cands) {
                SegIntersection hits[2];
                int n = intersect_segments(a, b, bedges[size_t(e)].a, bedges[size_t(e)].b, hits);
                for (int k = 0; k < n; ++k)
                    cuts.push_back(acc + hits[k].t * len);
            }
            acc += len;
        }
        double total = acc;
        cuts.push_back(0.0);
        cuts.push_back(total);
        std::sort(cuts.begin(), cuts.end());
        cuts.erase(std::unique(cuts.begin(), cuts.end(),
                               [](double a, double b) { return b - a < 1e-9; }),
                   cuts.end());

        for (size_t ci = 0; ci + 1 < cuts.size(); ++ci) {
            double s0 = cuts[ci], s1 = cuts[ci + 1];
            if (s1 - s0 < 1e-9)
                continue;
            // rebuild the piece polyline
            Polyline piece;
            piece.push_back(point_at_arclength(pts, s0));
            double walk = 0.0;
            for (size_t i = 1; i < pts.size(); ++i) {
                double len = (pts[i] - pts[i - 1]).norm();
                double next = walk + len;
                if (next > s0 + 1e-12 && next < s1 - 1e-12)
                    piece.push_back(pts[i]);
                walk = next;
                if (walk >= s1)
                    break;
            }
            piece.push_back(point_at_arclength(pts, s1));

            double mid = 0.5 * (s0 + s1);
            Vec2 mp = point_at_arclength(pts, mid);
            int face = index.find(mp);
            if (face < 0) {
                // nudge along the path; midpoints can sit on shared edges
                for (double delta : {1e-6, -1e-6, 1e-4, -1e-4}) {
                    double m2 = std::clamp(mid + delta * (s1 - s0), s0, s1);
                    face = index.find(point_at_arclength(pts, m2));
                    if (face >= 0)
                        break;
                }
            }
            if (face < 0)
                throw Error(errc::uncovered_segment,
                            "clip: path midpoint (" + std::to_string(mp.x) + ", " +
                                std::to_string(mp.y) + ") lies in no face");

            LabeledPath lp;
            lp.path.points = std::move(piece);
            lp.path.role = path.role;
            lp.path.closed = path.closed && cuts.size() == 2;
            if (lp.path.closed)
                lp.path.points.pop_back(); // drop the duplicated closing vertex
            lp.color = faces[size_t(face)].color;
            lp.band = faces[size_t(face)].band;
            lp.gen_index = gen++;
            if (s1 - s0 < min_segment)
                ++short_pieces;
            out.push_back(std::move(lp));
        }
    }
    if (short_pieces > 0)
        warn(warnings, "clip: " + std::to_string(short_pieces) + " clipped segment(s) below " +
                           std::to_string(min_segment) + " mm");
    return out;
}

} // namespace vcad
