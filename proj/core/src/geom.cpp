#include "vcadslicer/geom.hpp"

namespace vcad {

bool point_in_ring(const Vec2& p, const Ring& ring) {
    bool inside = false;
    size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[j];
        const Vec2& b = ring[i];
        if ((b.y > p.y) != (a.y > p.y)) {
            double x_cross = b.x + (p.y - b.y) / (a.y - b.y) * (a.x - b.x);
            if (p.x < x_cross)
                inside = !inside;
        }
    }
    return inside;
}

bool point_in_poly(const Vec2& p, const PolyWithHoles& poly) {
    if (!point_in_ring(p, poly.outer))
        return false;
    for (const Ring& h : poly.holes)
        if (point_in_ring(p, h))
            return false;
    return true;
}

int winding_number(const Vec2& p, const Ring& ring) {
    int wn = 0;
    size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = ring[j];
        const Vec2& b = ring[i];
        if (a.y <= p.y) {
            if (b.y > p.y && (b - a).cross(p - a) > 0)
                ++wn;
        } else {
            if (b.y <= p.y && (b - a).cross(p - a) < 0)
                --wn;
        }
    }
    return wn;
}

double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double len2 = ab.norm2();
    if (len2 <= 0.0)
        return (p - a).norm();
    double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + ab * t)).norm();
}

double distance_point_ring(const Vec2& p, const Ring& ring) {
    double best = std::numeric_limits<double>::max();
    size_t n = ring.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++)
        best = std::min(best, distance_point_segment(p, ring[j], ring[i]));
    return best;
}

double signed_distance_poly(const Vec2& p, const PolyWithHoles& poly) {
    double d = distance_point_ring(p, poly.outer);
    for (const Ring& h : poly.holes)
        d = std::min(d, distance_point_ring(p, h));
    return point_in_poly(p, poly) ? -d : d;
}

int intersect_segments(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1,
                       SegIntersection out[2], double eps) {
    Vec2 r = a1 - a0;
    Vec2 s = b1 - b0;
    double denom = r.cross(s);
    Vec2 qp = b0 - a0;
    double scale = std::max({std::abs(r.x), std::abs(r.y), std::abs(s.x), std::abs(s.y), 1.0});

    if (std::abs(denom) > eps * scale * scale) {
        double t = qp.cross(s) / denom;
        double u = qp.cross(r) / denom;
        if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12)
            return 0;
        t = std::clamp(t, 0.0, 1.0);
        u = std::clamp(u, 0.0, 1.0);
        out[0] = {t, u, a0 + r * t};
        return 1;
    }

    // Parallel. Only collinear overlaps matter.
    if (std::abs(qp.cross(r)) > eps * scale * scale)
        return 0;
    double rlen2 = r.norm2();
    if (rlen2 <= 0.0)
        return 0;
    double t0 = (b0 - a0).dot(r) / rlen2;
    double t1 = (b1 - a0).dot(r) / rlen2;
    double lo = std::min(t0, t1), hi = std::max(t0, t1);
    lo = std::max(lo, 0.0);
    hi = std::min(hi, 1.0);
    if (lo > hi)
        return 0;
    double slen2 = s.norm2();
    auto u_of = [&](double t) {
        Vec2 p = a0 + r * t;
        return slen2 > 0 ? std::clamp((p - b0).dot(s) / slen2, 0.0, 1.0) : 0.0;
    };
    out[0] = {lo, u_of(lo), a0 + r * lo};
    if (hi - lo < 1e-15)
        return 1;
    out[1] = {hi, u_of(hi), a0 + r * hi};
    return 2;
}

Ring simplify_collinear(const Ring& ring, double eps) {
    if (ring.size() < 4)
        return ring;
    Ring out;
    size_t n = ring.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& prev = ring[(i + n - 1) % n];
        const Vec2& cur = ring[i];
        const Vec2& next = ring[(i + 1) % n];
        Vec2 d0 = cur - prev;
        Vec2 d1 = next - cur;
        double scale = std::max(d0.norm(), d1.norm());
        if (std::abs(d0.cross(d1)) > eps * scale * scale || d1.dot(d0) < 0)
            out.push_back(cur);
    }
    return out.size() >= 3 ? out : ring;
}

Polyline simplify_collinear_open(const Polyline& line, double eps) {
    if (line.size() < 3)
        return line;
    Polyline out;
    out.push_back(line.front());
    for (size_t i = 1; i + 1 < line.size(); ++i) {
        Vec2 d0 = line[i] - out.back();
        Vec2 d1 = line[i + 1] - line[i];
        double scale = std::max(d0.norm(), d1.norm());
        if (std::abs(d0.cross(d1)) > eps * scale * scale || d1.dot(d0) < 0)
            out.push_back(line[i]);
    }
    out.push_back(line.back());
    return out;
}

namespace {

void dp_recurse(const Polyline& pts, size_t lo, size_t hi, double tol, std::vector<char>& keep) {
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
        dp_recurse(pts, lo, worst_i, tol, keep);
        dp_recurse(pts, worst_i, hi, tol, keep);
    }
}

} // namespace

Polyline simplify_polyline(const Polyline& line, double tol) {
    if (line.size() <= 2 || tol <= 0)
        return line;
    std::vector<char> keep(line.size(), 0);
    keep.front() = keep.back() = 1;
    dp_recurse(line, 0, line.size() - 1, tol, keep);
    Polyline out;
    out.reserve(line.size());
    for (size_t i = 0; i < line.size(); ++i)
        if (keep[i])
            out.push_back(line[i]);
    return out;
}

std::vector<PolyWithHoles> assemble_polys(const std::vector<Ring>& rings) {
    struct Entry {
        const Ring* ring;
        double area;        // signed
        BBox2 bbox;
    };
    std::vector<Entry> outers, holes;
    for (const Ring& r : rings) {
        if (r.size() < 3)
            continue;
        double a = ring_signed_area(r);
        Entry e{&r, a, ring_bbox(r)};
        if (a > 0)
            outers.push_back(e);
        else if (a < 0)
            holes.push_back(e);
    }
    std::vector<PolyWithHoles> polys(outers.size());
    for (size_t i = 0; i < outers.size(); ++i)
        polys[i].outer = *outers[i].ring;
    for (const Entry& h : holes) {
        int best = -1;
        double best_area = std::numeric_limits<double>::max();
        Vec2 probe = (*h.ring)[0];
        for (size_t i = 0; i < outers.size(); ++i) {
            if (!outers[i].bbox.contains(probe))
                continue;
            if (outers[i].area < best_area && point_in_ring(probe, *outers[i].ring)) {
                best = int(i);
                best_area = outers[i].area;
            }
        }
        if (best >= 0)
            polys[best].holes.push_back(*h.ring);
        // An orphan hole has no enclosing outer; nothing sensible to attach it to.
    }
    return polys;
}

SegmentGrid::SegmentGrid(double cell) : m_cell(cell > 0 ? cell : 1.0) {}

void SegmentGrid::cells_for(const Vec2& a, const Vec2& b, std::vector<CellKey>& keys) const {
    keys.clear();
    int64_t x0 = (int64_t)std::floor(std::min(a.x, b.x) / m_cell);
    int64_t x1 = (int64_t)std::floor(std::max(a.x, b.x) / m_cell);
    int64_t y0 = (int64_t)std::floor(std::min(a.y, b.y) / m_cell);
    int64_t y1 = (int64_t)std::floor(std::max(a.y, b.y) / m_cell);
    for (int64_t x = x0; x <= x1; ++x)
        for (int64_t y = y0; y <= y1; ++y)
            keys.push_back({x, y});
}

void SegmentGrid::insert(int id, const Vec2& a, const Vec2& b) {
    std::vector<CellKey> keys;
    cells_for(a, b, keys);
    for (const CellKey& k : keys) {
        auto it = m_index.find(k);
        if (it == m_index.end()) {
            m_index.emplace(k, m_buckets.size());
            m_buckets.push_back({k, {id}});
        } else {
            m_buckets[it->second].second.push_back(id);
        }
    }
}

void SegmentGrid::query(const Vec2& a, const Vec2& b, std::vector<int>& out) const {
    out.clear();
    std::vector<CellKey> keys;
    cells_for(a, b, keys);
    for (const CellKey& k : keys) {
        auto it = m_index.find(k);
        if (it == m_index.end())
            continue;
        const auto& ids = m_buckets[it->second].second;
        out.insert(out.end(), ids.begin(), ids.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
}

} // namespace vcad
