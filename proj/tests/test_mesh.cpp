#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "support/fixtures.hpp"
#include "vcadslicer/mesh.hpp"

using namespace vcad;

TEST_CASE("unit cube sliced mid-height gives the unit square") {
    MeshData cube = fixtures::unit_cube();
    Contour c = slice_mesh(cube, 0.5);
    REQUIRE(c.polygons.size() == 1);
    CHECK(c.polylines.empty());
    CHECK(std::abs(ring_signed_area(c.polygons[0])) == doctest::Approx(1.0));
    CHECK(ring_perimeter(c.polygons[0]) == doctest::Approx(4.0));
    // solid interior on the left makes the outer ring CCW
    CHECK(ring_signed_area(c.polygons[0]) > 0);
}

TEST_CASE("slicing above the apex yields nothing") {
    MeshData tet = fixtures::tetrahedron();
    Contour c = slice_mesh(tet, 1.5);
    CHECK(c.polygons.empty());
    CHECK(c.polylines.empty());
}

TEST_CASE("icosphere equator area within 2% of pi r^2") {
    MeshData sphere = fixtures::icosphere(10.0, 3);
    Contour c = slice_mesh(sphere, 10.0); // equator (sphere sits on z=0)
    REQUIRE(c.polygons.size() == 1);
    CHECK(c.polylines.empty());
    double area = std::abs(ring_signed_area(c.polygons[0]));
    CHECK(area == doctest::Approx(M_PI * 100.0).epsilon(0.02));
}

TEST_CASE("open meshes warn") {
    MeshData tet = fixtures::tetrahedron();
    tet.triangles.pop_back(); // puncture it
    WarningLog log;
    Contour c = slice_mesh(tet, 0.5, kStitchTol, &log);
    CHECK(!log.empty());
    CHECK(!c.polylines.empty());
}

TEST_CASE("binary STL round trip") {
    MeshData sphere = fixtures::icosphere(5.0, 2);
    auto path = std::filesystem::temp_directory_path() / "vcad_test_sphere.stl";
    write_stl_binary(path.string(), sphere);
    MeshData back = read_stl(path.string());
    REQUIRE(back.triangles.size() == sphere.triangles.size());
    // float32 storage: coordinates match to ~1e-6 relative
    CHECK(back.bbox.max.z == doctest::Approx(sphere.bbox.max.z).epsilon(1e-6));
    Contour a = slice_mesh(sphere, 5.0);
    Contour b = slice_mesh(back, 5.0);
    REQUIRE(a.polygons.size() == 1);
    REQUIRE(b.polygons.size() == 1);
    CHECK(std::abs(ring_signed_area(a.polygons[0])) ==
          doctest::Approx(std::abs(ring_signed_area(b.polygons[0]))).epsilon(1e-4));
    std::filesystem::remove(path);
}

TEST_CASE("ascii STL parses") {
    auto path = std::filesystem::temp_directory_path() / "vcad_test_ascii.stl";
    FILE* f = std::fopen(path.string().c_str(), "w");
    REQUIRE(f);
    std::fputs("solid tri\n", f);
    std::fputs(" facet normal 0 0 1\n  outer loop\n", f);
    std::fputs("   vertex 0 0 0\n   vertex 1 0 0\n   vertex 0 1 0\n", f);
    std::fputs("  endloop\n endfacet\nendsolid tri\n", f);
    std::fclose(f);
    MeshData mesh = read_stl(path.string());
    REQUIRE(mesh.triangles.size() == 1);
    CHECK(mesh.triangles[0].b.x == 1.0);
    std::filesystem::remove(path);
}

TEST_CASE("hull loft fixture is watertight at several heights") {
    MeshData hull = fixtures::hull_loft();
    for (double z : {5.0, 15.0, 30.0, 44.0}) {
        WarningLog log;
        Contour c = slice_mesh(hull, z, kStitchTol, &log);
        CAPTURE(z);
        CHECK(c.polygons.size() == 1);
        CHECK(c.polylines.empty());
    }
}
