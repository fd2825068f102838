#pragma once

#include <string>
#include <vector>

#include "vcadslicer/contour.hpp"
#include "vcadslicer/geom.hpp"

namespace vcad {

struct Triangle {
    Vec3 a, b, c;
};

struct MeshData {
    std::vector<Triangle> triangles;
    BBox3 bbox;
};

// Binary and ASCII STL. Format is sniffed from the file contents.
MeshData read_stl(const std::string& path);
void write_stl_binary(const std::string& path, const MeshData& mesh);

// Intersects every triangle with the plane z = const and stitches the
// resulting segments. Watertight input yields closed polygons only; open
// polylines raise an OpenMeshWarning in the log.
Contour slice_mesh(const MeshData& mesh, double z, double tol = kStitchTol,
                   WarningLog* warnings = nullptr);

} // namespace vcad
