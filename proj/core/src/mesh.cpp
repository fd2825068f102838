#include "vcadslicer/mesh.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

namespace vcad {

namespace {

MeshData finalize(std::vector<Triangle> tris) {
    MeshData mesh;
    mesh.triangles = std::move(tris);
    for (const Triangle& t : mesh.triangles) {
        mesh.bbox.expand(t.a);
        mesh.bbox.expand(t.b);
        mesh.bbox.expand(t.c);
    }
    return mesh;
}

MeshData read_stl_ascii(const std::string& content, const std::string& path) {
    std::istringstream in(content);
    std::string tok;
    std::vector<Triangle> tris;
    std::vector<Vec3> verts;
    while (in >> tok) {
        if (tok == "vertex") {
            Vec3 v;
            if (!(in >> v.x >> v.y >> v.z))
                throw Error(errc::io, "malformed ASCII STL vertex in " + path);
            verts.push_back(v);
        } else if (tok == "endfacet") {
            if (verts.size() != 3)
                throw Error(errc::io, "ASCII STL facet without 3 vertices in " + path);
            tris.push_back({verts[0], verts[1], verts[2]});
            verts.clear();
        }
    }
    if (tris.empty())
        throw Error(errc::io, "no facets found in " + path);
    return finalize(std::move(tris));
}

float read_f32(const char* p) {
    float f;
    std::memcpy(&f, p, 4);
    return f;
}

MeshData read_stl_binary(const std::string& content, const std::string& path) {
    if (content.size() < 84)
        throw Error(errc::io, "binary STL too short: " + path);
    uint32_t count;
    std::memcpy(&count, content.data() + 80, 4);
    size_t expected = 84 + size_t(count) * 50;
    if (content.size() < expected)
        throw Error(errc::io, "binary STL truncated: " + path);
    std::vector<Triangle> tris;
    tris.reserve(count);
    const char* p = content.data() + 84;
    for (uint32_t i = 0; i < count; ++i, p += 50) {
        // skip the 12-byte normal; recompute downstream when needed
        Triangle t;
        t.a = {read_f32(p + 12), read_f32(p + 16), read_f32(p + 20)};
        t.b = {read_f32(p + 24), read_f32(p + 28), read_f32(p + 32)};
        t.c = {read_f32(p + 36), read_f32(p + 40), read_f32(p + 44)};
        tris.push_back(t);
    }
    return finalize(std::move(tris));
}

} // namespace

MeshData read_stl(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(errc::io, "cannot open mesh file: " + path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    // "solid" prefix alone is unreliable; check facet keyword too.
    bool ascii = content.rfind("solid", 0) == 0 &&
                 content.find("facet") != std::string::npos &&
                 content.find("vertex") != std::string::npos;
    if (ascii) {
        // Some binary exports also begin with "solid"; verify the byte count.
        if (content.size() >= 84) {
            uint32_t count;
            std::memcpy(&count, content.data() + 80, 4);
            if (84 + size_t(count) * 50 == content.size())
                return read_stl_binary(content, path);
        }
        return read_stl_ascii(content, path);
    }
    return read_stl_binary(content, path);
}

void write_stl_binary(const std::string& path, const MeshData& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(errc::io, "cannot write mesh file: " + path);
    char header[80] = {0};
    std::snprintf(header, sizeof(header), "vcadslicer mesh");
    out.write(header, 80);
    uint32_t count = uint32_t(mesh.triangles.size());
    out.write(reinterpret_cast<const char*>(&count), 4);
    for (const Triangle& t : mesh.triangles) {
        Vec3 n = (t.b - t.a).cross(t.c - t.a);
        double len = n.norm();
        if (len > 0)
            n = n * (1.0 / len);
        float rec[12] = {float(n.x), float(n.y), float(n.z), float(t.a.x), float(t.a.y),
                         float(t.a.z), float(t.b.x), float(t.b.y), float(t.b.z), float(t.c.x),
                         float(t.c.y), float(t.c.z)};
        out.write(reinterpret_cast<const char*>(rec), 48);
        uint16_t attr = 0;
        out.write(reinterpret_cast<const char*>(&attr), 2);
    }
}

Contour slice_mesh(const MeshData& mesh, double z, double tol, WarningLog* warnings) {
    std::vector<Segment2> segments;
    for (const Triangle& t : mesh.triangles) {
        const Vec3* v[3] = {&t.a, &t.b, &t.c};
        // Signed distances to the plane; crossing edges contribute one point each.
        double d[3] = {t.a.z - z, t.b.z - z, t.c.z - z};
        Vec2 pts[3];
        int npts = 0;
        for (int i = 0; i < 3; ++i) {
            int j = (i + 1) % 3;
            if ((d[i] < 0) != (d[j] < 0)) {
                double s = d[i] / (d[i] - d[j]);
                pts[npts++] = {v[i]->x + s * (v[j]->x - v[i]->x),
                               v[i]->y + s * (v[j]->y - v[i]->y)};
            }
        }
        if (npts == 2) {
            // Orient so the solid interior is on the left in the XY view:
            // the target direction is z-hat x n for an outward normal n.
            Vec3 n = (t.b - t.a).cross(t.c - t.a);
            Vec2 target{-n.y, n.x};
            Vec2 dir = pts[1] - pts[0];
            if (dir.dot(target) < 0)
                std::swap(pts[0], pts[1]);
            segments.push_back({pts[0], pts[1]});
        }
        // Triangles lying exactly in the plane contribute nothing; their
        // neighbours' crossings close the loop.
    }

    Contour contour = stitch_segments(segments, tol, warnings);
    if (!contour.polylines.empty())
        warn(warnings, "OpenMeshWarning: plane z=" + std::to_string(z) + " produced " +
                           std::to_string(contour.polylines.size()) +
                           " open polyline(s); mesh may not be watertight");
    return contour;
}

} // namespace vcad
