#pragma once

#include <cmath>
#include <map>

#include "vcadslicer/mesh.hpp"

namespace fixtures {

using vcad::MeshData;
using vcad::Triangle;
using vcad::Vec2;
using vcad::Vec3;

inline MeshData finalize(std::vector<Triangle> tris) {
    MeshData m;
    m.triangles = std::move(tris);
    for (const Triangle& t : m.triangles) {
        m.bbox.expand(t.a);
        m.bbox.expand(t.b);
        m.bbox.expand(t.c);
    }
    return m;
}

// Axis-aligned box [0,1]^3 (outward winding).
inline MeshData unit_cube() {
    std::vector<Vec3> v = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                           {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
    int quads[6][4] = {
        {0, 3, 2, 1}, // bottom (normal -z)
        {4, 5, 6, 7}, // top (+z)
        {0, 1, 5, 4}, // front (-y)
        {2, 3, 7, 6}, // back (+y)
        {1, 2, 6, 5}, // right (+x)
        {3, 0, 4, 7}, // left (-x)
    };
    std::vector<Triangle> tris;
    for (auto& q : quads) {
        tris.push_back({v[q[0]], v[q[1]], v[q[2]]});
        tris.push_back({v[q[0]], v[q[2]], v[q[3]]});
    }
    return finalize(std::move(tris));
}

inline MeshData tetrahedron() {
    Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0.5, 1, 0}, d{0.5, 0.4, 1};
    std::vector<Triangle> tris = {
        {a, c, b}, // base, normal -z
        {a, b, d},
        {b, c, d},
        {c, a, d},
    };
    return finalize(std::move(tris));
}

// Subdivided icosahedron projected onto a sphere of radius r centred at
// (0, 0, r).
inline MeshData icosphere(double r, int subdivisions = 3) {
    double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> verts = {
        {-1, t, 0}, {1, t, 0},  {-1, -t, 0}, {1, -t, 0}, {0, -1, t},  {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1},  {t, 0, 1},  {-t, 0, -1}, {-t, 0, 1},
    };
    for (Vec3& v : verts) {
        double n = v.norm();
        v = v * (1.0 / n);
    }
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},
        {5, 11, 4}, {11, 10, 2}, {10, 7, 6},  {7, 1, 8},  {3, 9, 4},   {3, 4, 2},
        {3, 2, 6},  {3, 6, 8},   {3, 8, 9},   {4, 9, 5},  {2, 4, 11},  {6, 2, 10},
        {8, 6, 7},  {9, 8, 1},
    };
    auto midpoint_key = [](int a, int b) {
        return (uint64_t(std::min(a, b)) << 32) | uint64_t(std::max(a, b));
    };
    for (int s = 0; s < subdivisions; ++s) {
        std::map<uint64_t, int> cache;
        auto mid = [&](int a, int b) {
            uint64_t key = midpoint_key(a, b);
            auto it = cache.find(key);
            if (it != cache.end())
                return it->second;
            Vec3 m = (verts[size_t(a)] + verts[size_t(b)]) * 0.5;
            m = m * (1.0 / m.norm());
            verts.push_back(m);
            int id = int(verts.size()) - 1;
            cache[key] = id;
            return id;
        };
        std::vector<std::array<int, 3>> next;
        for (auto& f : faces) {
            int ab = mid(f[0], f[1]);
            int bc = mid(f[1], f[2]);
            int ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    std::vector<Triangle> tris;
    for (auto& f : faces) {
        auto at = [&](int i) {
            Vec3 v = verts[size_t(i)] * r;
            return Vec3{v.x, v.y, v.z + r};
        };
        tris.push_back({at(f[0]), at(f[1]), at(f[2])});
    }
    return finalize(std::move(tris));
}

// Watertight hull-shaped loft (rounded rectangle cross-sections tapering
// with height): a stand-in for small boat-like test meshes.
inline MeshData hull_loft(double length = 60, double width = 31, double height = 48,
                          int rings = 12, int ring_points = 32) {
    std::vector<std::vector<Vec3>> loops;
    for (int k = 0; k <= rings; ++k) {
        double u = double(k) / rings;        // 0 bottom .. 1 top
        double z = u * height;
        // hull-ish profile: wide at 40% height, tapered deck and keel
        double scale = 0.35 + 0.65 * std::sin(M_PI * std::min(1.0, 0.15 + 0.85 * u));
        double a = 0.5 * length * scale;
        double b = 0.5 * width * scale;
        std::vector<Vec3> loop;
        for (int i = 0; i < ring_points; ++i) {
            double ang = 2 * M_PI * i / ring_points;
            // superellipse exponent 2.5 squares off the sides a little
            double cx = std::cos(ang), sy = std::sin(ang);
            double px = std::copysign(std::pow(std::abs(cx), 0.8), cx) * a;
            double py = std::copysign(std::pow(std::abs(sy), 0.8), sy) * b;
            loop.push_back({px, py, z});
        }
        loops.push_back(std::move(loop));
    }
    std::vector<Triangle> tris;
    for (int k = 0; k < rings; ++k) {
        const auto& lo = loops[size_t(k)];
        const auto& hi = loops[size_t(k) + 1];
        for (int i = 0; i < ring_points; ++i) {
            int j = (i + 1) % ring_points;
            tris.push_back({lo[size_t(i)], lo[size_t(j)], hi[size_t(j)]});
            tris.push_back({lo[size_t(i)], hi[size_t(j)], hi[size_t(i)]});
        }
    }
    // caps (fans)
    Vec3 c0{0, 0, 0}, c1{0, 0, height};
    for (int i = 0; i < ring_points; ++i) {
        int j = (i + 1) % ring_points;
        tris.push_back({c0, loops[0][size_t(j)], loops[0][size_t(i)]});
        tris.push_back({c1, loops.back()[size_t(i)], loops.back()[size_t(j)]});
    }
    return finalize(std::move(tris));
}

} // namespace fixtures
