#include "vcadslicer/arrangement.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

namespace vcad {

namespace {

struct RawSegment {
    Vec2 a, b;
};

void append_ring_segments(const Ring& ring, std::vector<RawSegment>& out) {
    size_t n = ring.size();
    if (n < 2)
        return;
    for (size_t i = 0; i < n; ++i)
        out.push_back({ring[i], ring[(i + 1) % n]});
}

void append_polyline_segments(const Polyline& line, std::vector<RawSegment>& out) {
    for (size_t i = 1; i < line.size(); ++i)
        out.push_back({line[i - 1], line[i]});
}

// Endpoint merge identical to the stitching pass.
class SnapIndex {
public:
    explicit SnapIndex(double tol) : m_tol(tol) {}

    int id_for(const Vec2& p, std::vector<Vec2>& verts) {
        int64_t cx = (int64_t)std::floor(p.x / m_tol);
        int64_t cy = (int64_t)std::floor(p.y / m_tol);
        for (int64_t dx = -1; dx <= 1; ++dx)
            for (int64_t dy = -1; dy <= 1; ++dy) {
                auto it = m_map.find(key(cx + dx, cy + dy));
                if (it == m_map.end())
                    continue;
                for (int id : it->second) {
                    Vec2 d = verts[id] - p;
                    if (std::abs(d.x) <= m_tol && std::abs(d.y) <= m_tol)
                        return id;
                }
            }
        int id = int(verts.size());
        verts.push_back(p);
        m_map[key(cx, cy)].push_back(id);
        return id;
    }

private:
    static uint64_t key(int64_t x, int64_t y) {
        return (uint64_t(uint32_t(x)) << 32) | uint64_t(uint32_t(y));
    }
    double m_tol;
    std::unordered_map<uint64_t, std::vector<int>> m_map;
};

} // namespace

Ring Arrangement::cycle_ring(const std::vector<int>& cycle) const {
    Ring ring;
    ring.reserve(cycle.size());
    for (int h : cycle)
        ring.push_back(verts[halves[h].origin]);
    return ring;
}

void Arrangement::validate() const {
    for (size_t h = 0; h < halves.size(); ++h) {
        int t = halves[h].twin;
        if (t < 0 || size_t(t) >= halves.size() || halves[t].twin != int(h))
            throw Error(errc::numerical_degeneracy, "arrangement: broken twin pairing");
        if (halves[h].next < 0)
            throw Error(errc::numerical_degeneracy, "arrangement: missing next pointer");
        if (halves[h].face < 0)
            throw Error(errc::numerical_degeneracy, "arrangement: face not assigned");
    }
    // next-orbits must close
    std::vector<char> seen(halves.size(), 0);
    for (size_t h0 = 0; h0 < halves.size(); ++h0) {
        if (seen[h0])
            continue;
        size_t h = h0;
        size_t guard = 0;
        do {
            seen[h] = 1;
            h = size_t(halves[h].next);
            if (++guard > halves.size())
                throw Error(errc::numerical_degeneracy, "arrangement: next-orbit does not close");
        } while (h != h0);
    }
    // Euler relation V - E + F = 1 + C
    int v = int(verts.size());
    int e = num_edges();
    int f = int(faces.size());
    // connected components over vertices
    std::vector<int> comp(verts.size(), -1);
    int ncomp = 0;
    std::vector<int> stack;
    for (size_t s = 0; s < verts.size(); ++s) {
        if (comp[s] >= 0)
            continue;
        comp[s] = ncomp;
        stack.push_back(int(s));
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (size_t h = 0; h < halves.size(); ++h) {
                if (halves[h].origin != u)
                    continue;
                int w = halves[halves[h].twin].origin;
                if (comp[w] < 0) {
                    comp[w] = ncomp;
                    stack.push_back(w);
                }
            }
        }
        ++ncomp;
    }
    if (v - e + f != 1 + ncomp)
        throw Error(errc::numerical_degeneracy,
                    "arrangement: Euler relation violated: V=" + std::to_string(v) +
                        " E=" + std::to_string(e) + " F=" + std::to_string(f) +
                        " C=" + std::to_string(ncomp));
}

Arrangement build_arrangement_from_segments(const std::vector<Segment2>& segments,
                                            double snap_tol) {
    if (snap_tol <= 0)
        snap_tol = 1e-6;

    std::vector<RawSegment> input;
    input.reserve(segments.size());
    double total_len = 0.0;
    for (const Segment2& s : segments) {
        double len = (s.b - s.a).norm();
        if (len < snap_tol)
            continue;
        input.push_back({s.a, s.b});
        total_len += len;
    }

    // 1. pairwise intersections -> split parameters per segment
    double avg_len = input.empty() ? 1.0 : total_len / double(input.size());
    SegmentGrid grid(std::max(avg_len * 2.0, snap_tol * 16.0));
    for (size_t i = 0; i < input.size(); ++i)
        grid.insert(int(i), input[i].a, input[i].b);

    std::vector<std::vector<double>> splits(input.size());
    std::vector<int> candidates;
    for (size_t i = 0; i < input.size(); ++i) {
        grid.query(input[i].a, input[i].b, candidates);
        for (int j : candidates) {
            if (size_t(j) <= i)
                continue;
            SegIntersection hits[2];
            int n = intersect_segments(input[i].a, input[i].b, input[size_t(j)].a,
                                       input[size_t(j)].b, hits);
            for (int k = 0; k < n; ++k) {
                splits[i].push_back(hits[k].t);
                splits[size_t(j)].push_back(hits[k].u);
            }
        }
    }

    // 2. split, snap endpoints, dedupe edges
    std::vector<Vec2> verts;
    SnapIndex snap(snap_tol);
    std::map<std::pair<int, int>, std::pair<int, int>> edge_set; // (lo,hi) -> directed pair
    for (size_t i = 0; i < input.size(); ++i) {
        const RawSegment& s = input[i];
        Vec2 d = s.b - s.a;
        double len = d.norm();
        std::vector<double>& ts = splits[i];
        ts.push_back(0.0);
        ts.push_back(1.0);
        std::sort(ts.begin(), ts.end());
        double min_dt = snap_tol / std::max(len, snap_tol);
        int prev_vert = -1;
        double prev_t = -1.0;
        for (double t : ts) {
            if (prev_t >= 0 && t - prev_t < min_dt)
                continue;
            Vec2 p = s.a + d * t;
            int v = snap.id_for(p, verts);
            if (prev_vert >= 0 && v != prev_vert) {
                auto key = std::minmax(prev_vert, v);
                edge_set.insert({{key.first, key.second}, {prev_vert, v}});
            }
            if (v != prev_vert) {
                prev_vert = v;
                prev_t = t;
            }
        }
    }

    // 3. prune antenna edges (iteratively remove degree-1 vertices)
    std::vector<std::pair<int, int>> edges;
    edges.reserve(edge_set.size());
    for (const auto& [key, dir] : edge_set)
        edges.push_back(dir);
    std::vector<int> degree(verts.size(), 0);
    for (const auto& [u, v] : edges) {
        ++degree[u];
        ++degree[v];
    }
    std::vector<char> edge_alive(edges.size(), 1);
    std::vector<std::vector<int>> vert_edges(verts.size());
    for (size_t e = 0; e < edges.size(); ++e) {
        vert_edges[edges[e].first].push_back(int(e));
        vert_edges[edges[e].second].push_back(int(e));
    }
    std::vector<int> queue;
    for (size_t v = 0; v < verts.size(); ++v)
        if (degree[v] == 1)
            queue.push_back(int(v));
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        if (degree[v] != 1)
            continue;
        for (int e : vert_edges[v]) {
            if (!edge_alive[e])
                continue;
            edge_alive[e] = 0;
            int other = edges[e].first == v ? edges[e].second : edges[e].first;
            --degree[v];
            --degree[other];
            if (degree[other] == 1)
                queue.push_back(other);
            break;
        }
    }

    // 4. build half-edges over surviving vertices/edges
    Arrangement arr;
    std::vector<int> vert_remap(verts.size(), -1);
    for (size_t e = 0; e < edges.size(); ++e) {
        if (!edge_alive[e])
            continue;
        for (int v : {edges[e].first, edges[e].second})
            if (vert_remap[v] < 0) {
                vert_remap[v] = int(arr.verts.size());
                arr.verts.push_back(verts[v]);
            }
    }
    struct OutHalf {
        int half;
        double angle;
    };
    std::vector<std::vector<OutHalf>> outgoing(arr.verts.size());
    for (size_t e = 0; e < edges.size(); ++e) {
        if (!edge_alive[e])
            continue;
        int u = vert_remap[edges[e].first];
        int v = vert_remap[edges[e].second];
        int h1 = int(arr.halves.size());
        int h2 = h1 + 1;
        arr.halves.push_back({u, h2, -1, -1});
        arr.halves.push_back({v, h1, -1, -1});
        Vec2 d = arr.verts[v] - arr.verts[u];
        outgoing[u].push_back({h1, std::atan2(d.y, d.x)});
        outgoing[v].push_back({h2, std::atan2(-d.y, -d.x)});
    }

    // 5. angular order; next(h) = CW-predecessor of twin(h) around target(h)
    std::vector<int> pos_in_ring(arr.halves.size(), -1);
    for (size_t v = 0; v < outgoing.size(); ++v) {
        auto& ring = outgoing[v];
        std::sort(ring.begin(), ring.end(), [](const OutHalf& a, const OutHalf& b) {
            return a.angle < b.angle;
        });
        for (size_t k = 0; k + 1 < ring.size(); ++k) {
            if (ring[k + 1].angle - ring[k].angle < 1e-12) {
                const Vec2& p = arr.verts[v];
                char buf[128];
                std::snprintf(buf, sizeof(buf),
                              "coincident edge directions at (%.9f, %.9f)", p.x, p.y);
                throw Error(errc::numerical_degeneracy, buf);
            }
        }
        for (size_t k = 0; k < ring.size(); ++k)
            pos_in_ring[ring[k].half] = int(k);
    }
    for (size_t h = 0; h < arr.halves.size(); ++h) {
        int twin = arr.halves[h].twin;
        int v = arr.halves[twin].origin; // target of h
        const auto& ring = outgoing[v];
        int k = pos_in_ring[twin];
        int prev = (k + int(ring.size()) - 1) % int(ring.size());
        arr.halves[h].next = ring[prev].half;
    }

    // 6. face orbits
    std::vector<int> orbit_of(arr.halves.size(), -1);
    std::vector<std::vector<int>> orbits;
    for (size_t h0 = 0; h0 < arr.halves.size(); ++h0) {
        if (orbit_of[h0] >= 0)
            continue;
        std::vector<int> cycle;
        int h = int(h0);
        do {
            orbit_of[h] = int(orbits.size());
            cycle.push_back(h);
            h = arr.halves[h].next;
        } while (h != int(h0));
        orbits.push_back(std::move(cycle));
    }

    struct OrbitInfo {
        double area;
        BBox2 bbox;
    };
    std::vector<OrbitInfo> info(orbits.size());
    for (size_t i = 0; i < orbits.size(); ++i) {
        Ring r = arr.cycle_ring(orbits[i]);
        info[i].area = ring_signed_area(r);
        info[i].bbox = ring_bbox(r);
    }

    // positive orbits become bounded faces; negative ones are hole cycles
    std::vector<int> face_of_orbit(orbits.size(), -1);
    std::vector<size_t> positive_order;
    for (size_t i = 0; i < orbits.size(); ++i)
        if (info[i].area > 0)
            positive_order.push_back(i);
    std::sort(positive_order.begin(), positive_order.end(),
              [&](size_t a, size_t b) { return info[a].area < info[b].area; });

    arr.faces.clear();
    arr.faces.push_back({}); // unbounded face at index 0
    arr.faces[0].bounded = false;
    arr.unbounded_face = 0;
    // Preserve discovery order for face ids (deterministic output ordering).
    for (size_t i = 0; i < orbits.size(); ++i) {
        if (info[i].area > 0) {
            face_of_orbit[i] = int(arr.faces.size());
            ArrFace f;
            f.bounded = true;
            f.outer = orbits[i];
            arr.faces.push_back(std::move(f));
        }
    }

    // assign negative cycles: probe a point on the face side (left of the
    // cycle direction) and find the smallest enclosing positive orbit
    std::vector<Ring> positive_rings(orbits.size());
    for (size_t i : positive_order)
        positive_rings[i] = arr.cycle_ring(orbits[i]);
    for (size_t i = 0; i < orbits.size(); ++i) {
        if (info[i].area > 0)
            continue;
        // longest half-edge of the cycle for a stable probe
        int best_h = orbits[i][0];
        double best_len = -1.0;
        for (int h : orbits[i]) {
            Vec2 a = arr.verts[arr.halves[h].origin];
            Vec2 b = arr.verts[arr.target(h)];
            double len = (b - a).norm();
            if (len > best_len) {
                best_len = len;
                best_h = h;
            }
        }
        Vec2 a = arr.verts[arr.halves[best_h].origin];
        Vec2 b = arr.verts[arr.target(best_h)];
        Vec2 mid = (a + b) * 0.5;
        Vec2 dir = (b - a).normalized();
        double eps = std::min(best_len * 0.25, std::max(snap_tol * 4.0, 1e-9));
        Vec2 probe = mid + dir.perp() * eps;

        int owner = 0; // unbounded by default
        for (size_t cand : positive_order) {
            if (!info[cand].bbox.contains(probe))
                continue;
            if (point_in_ring(probe, positive_rings[cand])) {
                owner = face_of_orbit[cand];
                break;
            }
        }
        arr.faces[size_t(owner)].holes.push_back(orbits[i]);
        face_of_orbit[i] = owner;
    }

    for (size_t i = 0; i < orbits.size(); ++i)
        for (int h : orbits[i])
            arr.halves[size_t(h)].face = face_of_orbit[i];

    return arr;
}

Arrangement build_arrangement(const Contour& geometry, const Contour& materials,
                              double snap_tol) {
    std::vector<RawSegment> raw;
    for (const Ring& r : geometry.polygons)
        append_ring_segments(r, raw);
    for (const Polyline& l : geometry.polylines)
        append_polyline_segments(l, raw);
    for (const Ring& r : materials.polygons)
        append_ring_segments(r, raw);
    for (const Polyline& l : materials.polylines)
        append_polyline_segments(l, raw);
    std::vector<Segment2> segs;
    segs.reserve(raw.size());
    for (const RawSegment& s : raw)
        segs.push_back({s.a, s.b});
    return build_arrangement_from_segments(segs, snap_tol);
}

namespace {

// Douglas-Peucker, used only to keep representative-point triangulation
// cheap on dense iso-contour rings.
void dp_simplify(const Ring& pts, size_t lo, size_t hi, double tol, std::vector<char>& keep) {
    if (hi <= lo + 1)
        return;
    double worst = -1.0;
    size_t worst_i = lo;
    for (size_t i = lo + 1; i < hi; ++i) {
        double d = distance_point_segment(pts[i], pts[lo], pts[hi]);
        if (d > worst) {
            worst = d;
            worst_i = i;
        }
    }
    if (worst > tol) {
        keep[worst_i] = 1;
        dp_simplify(pts, lo, worst_i, tol, keep);
        dp_simplify(pts, worst_i, hi, tol, keep);
    }
}

Ring simplify_ring_dp(const Ring& ring, double tol) {
    if (ring.size() <= 8 || tol <= 0)
        return ring;
    // split at the two extreme points to anchor the recursion
    size_t lo = 0, hi = 0;
    for (size_t i = 1; i < ring.size(); ++i) {
        if (lex_less(ring[i], ring[lo]))
            lo = i;
        if (lex_less(ring[hi], ring[i]))
            hi = i;
    }
    if (lo == hi)
        return ring;
    Ring rot;
    rot.reserve(ring.size());
    for (size_t i = 0; i < ring.size(); ++i)
        rot.push_back(ring[(lo + i) % ring.size()]);
    size_t pivot = (hi + ring.size() - lo) % ring.size();
    std::vector<char> keep(rot.size(), 0);
    keep[0] = keep[pivot] = 1;
    dp_simplify(rot, 0, pivot, tol, keep);
    // close the loop: segment pivot..0 via the end
    Ring tail(rot.begin() + pivot, rot.end());
    tail.push_back(rot[0]);
    if (tail.size() < 2)
        return ring;
    std::vector<char> keep_tail(tail.size(), 0);
    keep_tail.front() = keep_tail.back() = 1;
    dp_simplify(tail, 0, tail.size() - 1, tol, keep_tail);
    Ring out;
    for (size_t i = 0; i <= pivot; ++i)
        if (keep[i])
            out.push_back(rot[i]);
    for (size_t i = 1; i + 1 < tail.size(); ++i)
        if (keep_tail[i])
            out.push_back(tail[i]);
    return out.size() >= 3 ? out : ring;
}

Ring oriented(const Ring& ring, bool ccw) {
    Ring r = ring;
    double a = ring_signed_area(r);
    if ((a > 0) != ccw)
        std::reverse(r.begin(), r.end());
    return r;
}

// Bridges holes into the outer ring (max-x hole vertex to a visible outer
// vertex), producing one weakly simple CCW ring.
Ring bridge_holes(const PolyWithHoles& poly) {
    Ring outer = oriented(poly.outer, true);
    std::vector<Ring> holes;
    for (const Ring& h : poly.holes)
        holes.push_back(oriented(h, false)); // CW
    std::sort(holes.begin(), holes.end(), [](const Ring& a, const Ring& b) {
        double ax = -1e300, bx = -1e300;
        for (const Vec2& p : a)
            ax = std::max(ax, p.x);
        for (const Vec2& p : b)
            bx = std::max(bx, p.x);
        return ax > bx;
    });

    for (const Ring& hole : holes) {
        // hole vertex with maximum x
        size_t mi = 0;
        for (size_t i = 1; i < hole.size(); ++i)
            if (hole[i].x > hole[mi].x || (hole[i].x == hole[mi].x && hole[i].y < hole[mi].y))
                mi = i;
        Vec2 m = hole[mi];

        // closest intersection of the +x ray with outer edges
        double best_x = std::numeric_limits<double>::max();
        size_t best_edge = size_t(-1);
        Vec2 best_pt;
        size_t n = outer.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = outer[j];
            const Vec2& b = outer[i];
            if ((a.y > m.y) == (b.y > m.y))
                continue;
            double x = a.x + (m.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if (x >= m.x - 1e-12 && x < best_x) {
                best_x = x;
                best_edge = j;
                best_pt = {x, m.y};
            }
        }
        if (best_edge == size_t(-1)) {
            // hole outside outer (degenerate input); skip the bridge
            continue;
        }
        // visible vertex: endpoint of the hit edge with larger x, unless a
        // reflex vertex inside triangle (m, i, p) is a better candidate
        size_t e0 = best_edge;
        size_t e1 = (best_edge + 1) % n;
        size_t cand = outer[e0].x > outer[e1].x ? e0 : e1;
        Vec2 p = outer[cand];
        Ring tri = {m, best_pt, p};
        if (ring_signed_area(tri) < 0)
            std::swap(tri[1], tri[2]);
        double best_metric = std::numeric_limits<double>::max();
        for (size_t i = 0; i < n; ++i) {
            if (i == cand)
                continue;
            const Vec2& prev = outer[(i + n - 1) % n];
            const Vec2& cur = outer[i];
            const Vec2& next = outer[(i + 1) % n];
            bool reflex = (cur - prev).cross(next - cur) < 0;
            if (!reflex)
                continue;
            if (!point_in_ring(cur, tri))
                continue;
            // prefer the vertex minimizing angle with the ray, then distance
            double dx = cur.x - m.x, dy = std::abs(cur.y - m.y);
            if (dx <= 0)
                continue;
            double metric = dy / dx * 1e6 + dx;
            if (metric < best_metric) {
                best_metric = metric;
                cand = i;
            }
        }

        // splice: outer[0..cand], m..hole..m, back to cand
        Ring merged;
        merged.reserve(outer.size() + hole.size() + 2);
        for (size_t i = 0; i <= cand; ++i)
            merged.push_back(outer[i]);
        for (size_t i = 0; i <= hole.size(); ++i)
            merged.push_back(hole[(mi + i) % hole.size()]);
        for (size_t i = cand; i < outer.size(); ++i)
            merged.push_back(outer[i]);
        outer = std::move(merged);
    }
    return outer;
}

std::optional<Vec2> ear_clip_largest_centroid(Ring poly) {
    if (poly.size() < 3)
        return std::nullopt;
    double best_area = 0.0;
    Vec2 best_centroid;
    std::vector<size_t> idx(poly.size());
    std::iota(idx.begin(), idx.end(), 0);

    auto cross_at = [&](size_t a, size_t b, size_t c) {
        return (poly[b] - poly[a]).cross(poly[c] - poly[b]);
    };

    size_t guard = poly.size() * poly.size() + 16;
    while (idx.size() > 3 && guard-- > 0) {
        bool clipped = false;
        for (size_t k = 0; k < idx.size(); ++k) {
            size_t ia = idx[(k + idx.size() - 1) % idx.size()];
            size_t ib = idx[k];
            size_t ic = idx[(k + 1) % idx.size()];
            if (cross_at(ia, ib, ic) <= 0)
                continue; // reflex or degenerate corner
            Ring tri = {poly[ia], poly[ib], poly[ic]};
            bool blocked = false;
            for (size_t other : idx) {
                if (other == ia || other == ib || other == ic)
                    continue;
                // bridge splices duplicate coordinates; identical points
                // are corners, not blockers
                if (poly[other] == poly[ia] || poly[other] == poly[ib] ||
                    poly[other] == poly[ic])
                    continue;
                if (point_in_ring(poly[other], tri)) {
                    blocked = true;
                    break;
                }
            }
            if (blocked)
                continue;
            double area = std::abs(ring_signed_area(tri));
            if (area > best_area) {
                best_area = area;
                best_centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
            }
            idx.erase(idx.begin() + k);
            clipped = true;
            break;
        }
        if (!clipped)
            break; // stalled; fall back
    }
    if (idx.size() == 3) {
        Ring tri = {poly[idx[0]], poly[idx[1]], poly[idx[2]]};
        double area = std::abs(ring_signed_area(tri));
        if (area > best_area) {
            best_area = area;
            best_centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
        }
    }
    if (best_area <= 0)
        return std::nullopt;
    return best_centroid;
}

std::optional<Vec2> scanline_point(const PolyWithHoles& poly) {
    std::vector<double> ys;
    for (const Vec2& p : poly.outer)
        ys.push_back(p.y);
    for (const Ring& h : poly.holes)
        for (const Vec2& p : h)
            ys.push_back(p.y);
    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

    std::vector<double> levels;
    for (size_t i = 0; i + 1 < ys.size(); ++i)
        levels.push_back(0.5 * (ys[i] + ys[i + 1]));
    // try levels from the middle outwards
    std::sort(levels.begin(), levels.end(), [&](double a, double b) {
        double mid = 0.5 * (ys.front() + ys.back());
        return std::abs(a - mid) < std::abs(b - mid);
    });

    auto crossings = [&](const Ring& ring, double y, std::vector<double>& xs) {
        size_t n = ring.size();
        for (size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = ring[j];
            const Vec2& b = ring[i];
            if ((b.y > y) != (a.y > y))
                xs.push_back(b.x + (y - b.y) / (a.y - b.y) * (a.x - b.x));
        }
    };

    for (double y : levels) {
        std::vector<double> xs;
        crossings(poly.outer, y, xs);
        for (const Ring& h : poly.holes)
            crossings(h, y, xs);
        std::sort(xs.begin(), xs.end());
        double best_w = 0;
        Vec2 best;
        for (size_t i = 0; i + 1 < xs.size(); i += 2) {
            double w = xs[i + 1] - xs[i];
            if (w > best_w) {
                Vec2 candidate{0.5 * (xs[i] + xs[i + 1]), y};
                if (point_in_poly(candidate, poly)) {
                    best_w = w;
                    best = candidate;
                }
            }
        }
        if (best_w > 0)
            return best;
    }
    return std::nullopt;
}

} // namespace

Vec2 representative_point(const PolyWithHoles& poly) {
    // Dense contour rings make ear clipping quadratic in the vertex count;
    // a lightly simplified copy keeps it cheap. The candidate is verified
    // against the original geometry before use.
    double tol = 0.0125;
    PolyWithHoles slim;
    slim.outer = simplify_ring_dp(poly.outer, tol);
    for (const Ring& h : poly.holes)
        slim.holes.push_back(simplify_ring_dp(h, tol));

    Ring bridged = bridge_holes(slim);
    if (auto rep = ear_clip_largest_centroid(oriented(bridged, true)))
        if (point_in_poly(*rep, poly))
            return *rep;

    if (poly.outer.size() >= 3 && slim.outer.size() != poly.outer.size()) {
        // retry on the exact geometry before falling back
        Ring exact = bridge_holes(poly);
        if (auto rep = ear_clip_largest_centroid(oriented(exact, true)))
            if (point_in_poly(*rep, poly))
                return *rep;
    }
    if (auto rep = scanline_point(poly))
        return *rep;
    throw Error(errc::numerical_degeneracy, "no interior point found for a face");
}

std::vector<FaceGeometry> extract_bounded_faces(
    const Arrangement& arr, const std::function<bool(const Vec2&)>& inside_geometry) {
    std::vector<FaceGeometry> out;
    for (size_t f = 0; f < arr.faces.size(); ++f) {
        const ArrFace& face = arr.faces[f];
        if (!face.bounded)
            continue;
        FaceGeometry fg;
        fg.face_id = int(f);
        fg.poly.outer = arr.cycle_ring(face.outer);
        for (const auto& hole : face.holes)
            fg.poly.holes.push_back(arr.cycle_ring(hole));
        fg.area = poly_area(fg.poly);
        if (fg.area <= 0)
            continue;
        fg.rep = representative_point(fg.poly);
        if (inside_geometry && !inside_geometry(fg.rep))
            continue;
        out.push_back(std::move(fg));
    }
    return out;
}

std::vector<ColoredFace> classify_faces(const Arrangement& arr,
                                        const std::vector<FaceGeometry>& faces,
                                        const std::function<double(const Vec2&)>& gradient,
                                        const Palette& palette, double sliver_area,
                                        const ZipperSpec* zipper, WarningLog* warnings) {
    std::vector<ColoredFace> out;
    out.reserve(faces.size());
    for (const FaceGeometry& fg : faces) {
        ColoredFace cf;
        cf.face_id = fg.face_id;
        cf.poly = fg.poly;
        cf.rep = fg.rep;
        cf.area = fg.area;
        double g = gradient(fg.rep);
        if (zipper && zipper->enabled()) {
            int band = zipper->band_at(g);
            if (band >= 0) {
                cf.band = band;
                cf.color = band; // provisional: the lower neighbour color
            } else {
                cf.color = palette.bin(g);
            }
        } else {
            cf.color = palette.bin(g);
        }
        out.push_back(std::move(cf));
    }

    // shared boundary length between kept faces, for sliver merging
    std::map<int, int> kept_index;
    for (size_t i = 0; i < out.size(); ++i)
        kept_index[out[i].face_id] = int(i);
    std::map<std::pair<int, int>, double> shared;
    for (size_t h = 0; h < arr.halves.size(); ++h) {
        int fa = arr.halves[h].face;
        int fb = arr.halves[arr.halves[h].twin].face;
        if (fa >= fb)
            continue; // count each undirected edge once
        auto ia = kept_index.find(fa);
        auto ib = kept_index.find(fb);
        if (ia == kept_index.end() || ib == kept_index.end())
            continue;
        Vec2 a = arr.verts[arr.halves[h].origin];
        Vec2 b = arr.verts[arr.target(int(h))];
        shared[{ia->second, ib->second}] += (b - a).norm();
    }

    // merge slivers smallest-first so chains resolve transitively
    std::vector<size_t> order(out.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return out[a].area < out[b].area; });
    int merged_count = 0;
    for (size_t i : order) {
        if (out[i].area >= sliver_area)
            break;
        int best = -1;
        double best_len = 0;
        for (const auto& [key, len] : shared) {
            int other = -1;
            if (key.first == int(i))
                other = key.second;
            else if (key.second == int(i))
                other = key.first;
            else
                continue;
            if (len > best_len) {
                best_len = len;
                best = other;
            }
        }
        if (best >= 0) {
            out[i].color = out[size_t(best)].color;
            out[i].band = out[size_t(best)].band;
            out[i].merged_sliver = true;
            ++merged_count;
        }
    }
    if (merged_count > 0)
        warn(warnings, "classify: merged " + std::to_string(merged_count) +
                           " sliver face(s) below the area threshold into neighbours");

    // flag faces whose boundary spans more than one interval beyond its own
    int span_warned = 0;
    for (ColoredFace& cf : out) {
        if (cf.band >= 0 || cf.merged_sliver)
            continue;
        size_t step = std::max<size_t>(1, cf.poly.outer.size() / 16);
        int lo = cf.color, hi = cf.color;
        for (size_t i = 0; i < cf.poly.outer.size(); i += step) {
            int b = palette.bin(gradient(cf.poly.outer[i]));
            lo = std::min(lo, b);
            hi = std::max(hi, b);
        }
        if (hi - lo > 1)
            ++span_warned;
    }
    if (span_warned > 0)
        warn(warnings, "classify: " + std::to_string(span_warned) +
                           " face(s) span more than one palette interval at their corners");
    return out;
}

std::vector<PolyWithHoles> face_union_boundary(const Arrangement& arr,
                                               const std::vector<char>& keep_face) {
    // boundary halves have a kept face on the left and a dropped face on
    // the right
    std::vector<char> boundary(arr.halves.size(), 0);
    for (size_t h = 0; h < arr.halves.size(); ++h) {
        int f = arr.halves[h].face;
        int ft = arr.halves[arr.halves[h].twin].face;
        if (keep_face[size_t(f)] && !keep_face[size_t(ft)])
            boundary[h] = 1;
    }

    // angular order per vertex for the restricted next-walk
    std::vector<std::vector<std::pair<double, int>>> outgoing(arr.verts.size());
    for (size_t h = 0; h < arr.halves.size(); ++h) {
        int u = arr.halves[h].origin;
        Vec2 d = arr.verts[arr.target(int(h))] - arr.verts[u];
        outgoing[u].push_back({std::atan2(d.y, d.x), int(h)});
    }
    for (auto& ring : outgoing)
        std::sort(ring.begin(), ring.end());
    std::vector<int> pos(arr.halves.size(), -1);
    for (const auto& ring : outgoing)
        for (size_t k = 0; k < ring.size(); ++k)
            pos[size_t(ring[k].second)] = int(k);

    std::vector<char> used(arr.halves.size(), 0);
    std::vector<Ring> rings;
    for (size_t h0 = 0; h0 < arr.halves.size(); ++h0) {
        if (!boundary[h0] || used[h0])
            continue;
        Ring ring;
        int h = int(h0);
        size_t guard = arr.halves.size() + 1;
        do {
            used[h] = 1;
            ring.push_back(arr.verts[arr.halves[h].origin]);
            // rotate CW from twin(h) at the target vertex to the next
            // boundary half
            int twin = arr.halves[h].twin;
            int v = arr.halves[twin].origin;
            const auto& ring_v = outgoing[v];
            int sz = int(ring_v.size());
            int k = pos[twin];
            int found = -1;
            for (int step = 1; step <= sz; ++step) {
                int cand = ring_v[size_t(((k - step) % sz + sz) % sz)].second;
                if (boundary[cand]) {
                    found = cand;
                    break;
                }
            }
            if (found < 0 || guard-- == 0)
                throw Error(errc::numerical_degeneracy, "union boundary walk broke");
            h = found;
        } while (h != int(h0));
        if (ring.size() >= 3)
            rings.push_back(simplify_collinear(ring));
    }
    return assemble_polys(rings);
}

std::string faces_to_svg(const std::vector<ColoredFace>& faces,
                         const std::vector<std::array<double, 3>>& color_rgb) {
    BBox2 box;
    for (const ColoredFace& f : faces)
        box.expand(ring_bbox(f.poly.outer));
    if (!box.valid())
        box = {{0, 0}, {1, 1}};
    box = box.inflated(2.0);

    char buf[256];
    std::string svg;
    std::snprintf(buf, sizeof(buf),
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"%.3f %.3f %.3f %.3f\">\n",
                  box.min.x, box.min.y, box.width(), box.height());
    svg += buf;
    svg += "<g transform=\"scale(1,-1) translate(0," ;
    std::snprintf(buf, sizeof(buf), "%.3f", -(box.min.y + box.max.y));
    svg += buf;
    svg += ")\">\n";
    for (const ColoredFace& f : faces) {
        std::array<double, 3> rgb{0.6, 0.6, 0.6};
        if (f.color >= 0 && size_t(f.color) < color_rgb.size())
            rgb = color_rgb[size_t(f.color)];
        svg += "<path fill-rule=\"evenodd\" stroke=\"black\" stroke-width=\"0.1\" fill=\"";
        std::snprintf(buf, sizeof(buf), "rgb(%d,%d,%d)\" d=\"", int(rgb[0] * 255),
                      int(rgb[1] * 255), int(rgb[2] * 255));
        svg += buf;
        auto emit_ring = [&](const Ring& r) {
            for (size_t i = 0; i < r.size(); ++i) {
                std::snprintf(buf, sizeof(buf), "%c%.4f %.4f ", i == 0 ? 'M' : 'L', r[i].x,
                              r[i].y);
                svg += buf;
            }
            svg += "Z ";
        };
        emit_ring(f.poly.outer);
        for (const Ring& h : f.poly.holes)
            emit_ring(h);
        svg += "\"/>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

} // namespace vcad
