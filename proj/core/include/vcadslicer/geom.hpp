#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <vector>

namespace vcad {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2() = default;
    Vec2(double x_, double y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double cross(const Vec2& o) const { return x * o.y - y * o.x; }
    double norm() const { return std::sqrt(x * x + y * y); }
    double norm2() const { return x * x + y * y; }
    Vec2 normalized() const {
        double n = norm();
        return n > 0 ? Vec2{x / n, y / n} : Vec2{0, 0};
    }
    // 90 degree counterclockwise rotation; the "left" of a direction.
    Vec2 perp() const { return {-y, x}; }

    bool operator==(const Vec2& o) const { return x == o.x && y == o.y; }
};

inline bool lex_less(const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3() = default;
    Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

struct BBox2 {
    Vec2 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
    Vec2 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest()};

    bool valid() const { return min.x <= max.x && min.y <= max.y; }
    void expand(const Vec2& p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
    }
    void expand(const BBox2& b) {
        expand(b.min);
        expand(b.max);
    }
    BBox2 inflated(double margin) const {
        BBox2 r = *this;
        r.min.x -= margin;
        r.min.y -= margin;
        r.max.x += margin;
        r.max.y += margin;
        return r;
    }
    double width() const { return max.x - min.x; }
    double height() const { return max.y - min.y; }
    bool contains(const Vec2& p) const {
        return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
    }
};

struct BBox3 {
    Vec3 min{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
             std::numeric_limits<double>::max()};
    Vec3 max{std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
             std::numeric_limits<double>::lowest()};

    bool valid() const { return min.x <= max.x; }
    void expand(const Vec3& p) {
        min.x = std::min(min.x, p.x);
        min.y = std::min(min.y, p.y);
        min.z = std::min(min.z, p.z);
        max.x = std::max(max.x, p.x);
        max.y = std::max(max.y, p.y);
        max.z = std::max(max.z, p.z);
    }
    void expand(const BBox3& b) {
        expand(b.min);
        expand(b.max);
    }
    BBox2 xy() const { return BBox2{{min.x, min.y}, {max.x, max.y}}; }
};

// Closed ring: implicit edge from back() to front(). Orientation carries
// meaning where stated (CCW outer / CW hole).
using Ring = std::vector<Vec2>;
// Open chain of vertices.
using Polyline = std::vector<Vec2>;

struct PolyWithHoles {
    Ring outer;
    std::vector<Ring> holes;
};

inline double ring_signed_area(const Ring& ring) {
    double a = 0.0;
    for (size_t i = 0, n = ring.size(); i < n; ++i)
        a += ring[i].cross(ring[(i + 1) % n]);
    return 0.5 * a;
}

inline double polyline_length(const Polyline& pts) {
    double len = 0.0;
    for (size_t i = 1; i < pts.size(); ++i)
        len += (pts[i] - pts[i - 1]).norm();
    return len;
}

inline double ring_perimeter(const Ring& ring) {
    if (ring.size() < 2)
        return 0.0;
    double len = polyline_length(ring);
    len += (ring.front() - ring.back()).norm();
    return len;
}

inline BBox2 ring_bbox(const Ring& ring) {
    BBox2 b;
    for (const Vec2& p : ring)
        b.expand(p);
    return b;
}

inline double poly_area(const PolyWithHoles& poly) {
    double a = std::abs(ring_signed_area(poly.outer));
    for (const Ring& h : poly.holes)
        a -= std::abs(ring_signed_area(h));
    return a;
}

// Even-odd crossing test. Points on the boundary land on a deterministic
// side via the half-open edge rule.
bool point_in_ring(const Vec2& p, const Ring& ring);
bool point_in_poly(const Vec2& p, const PolyWithHoles& poly);

// Signed winding number; CCW rings around p contribute +1.
int winding_number(const Vec2& p, const Ring& ring);

double distance_point_segment(const Vec2& p, const Vec2& a, const Vec2& b);
double distance_point_ring(const Vec2& p, const Ring& ring);
// Negative inside, positive outside (solid = outer minus holes).
double signed_distance_poly(const Vec2& p, const PolyWithHoles& poly);

struct SegIntersection {
    double t;      // parameter on segment a
    double u;      // parameter on segment b
    Vec2 point;
};

// Proper and endpoint intersections of segments [a0,a1] and [b0,b1].
// Collinear overlaps return the two overlap extremes.
int intersect_segments(const Vec2& a0, const Vec2& a1, const Vec2& b0, const Vec2& b1,
                       SegIntersection out[2], double eps = 1e-12);

// Drops middle vertices that are collinear with their neighbours.
Ring simplify_collinear(const Ring& ring, double eps = 1e-12);
Polyline simplify_collinear_open(const Polyline& line, double eps = 1e-12);

// Douglas-Peucker with an absolute deviation tolerance; endpoints kept.
Polyline simplify_polyline(const Polyline& line, double tol);

// Groups rings into polygons with holes by orientation (CCW = outer) and
// containment; each CW ring attaches to the smallest enclosing outer.
std::vector<PolyWithHoles> assemble_polys(const std::vector<Ring>& rings);

// Uniform hash grid over segment indices, used to cut pairwise tests.
class SegmentGrid {
public:
    SegmentGrid(double cell);
    void insert(int id, const Vec2& a, const Vec2& b);
    // Candidate ids whose cells overlap the query segment's cells.
    void query(const Vec2& a, const Vec2& b, std::vector<int>& out) const;
    double cell_size() const { return m_cell; }

private:
    struct CellKey {
        int64_t x, y;
        bool operator==(const CellKey& o) const { return x == o.x && y == o.y; }
    };
    struct CellHash {
        size_t operator()(const CellKey& k) const {
            return std::hash<int64_t>()(k.x * 73856093 ^ k.y * 19349663);
        }
    };
    void cells_for(const Vec2& a, const Vec2& b, std::vector<CellKey>& keys) const;

    double m_cell;
    std::vector<std::pair<CellKey, std::vector<int>>> m_buckets;
    // index into m_buckets
    std::unordered_map<CellKey, size_t, CellHash> m_index;
};

} // namespace vcad
