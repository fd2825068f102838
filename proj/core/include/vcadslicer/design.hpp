#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vcadslicer/expr.hpp"
#include "vcadslicer/geom.hpp"
#include "vcadslicer/mesh.hpp"

namespace vcad {

// Design node kinds. Primitives are XY-centred with z in [0, height].
enum class NodeKind {
    cylinder,     // radius, height
    rectprism,    // width, depth, height
    sphere,       // radius (z in [0, 2r])
    mesh,         // STL file, sliced directly (no SDF)
    csg_union,
    csg_difference,
    csg_intersection,
    translate,
    fgrade,
};

struct DesignNode;
using NodePtr = std::shared_ptr<DesignNode>;

struct FGradeField {
    std::string source; // original expression text
    ExprPtr expr;
};

struct DesignNode {
    NodeKind kind;
    double a = 0, b = 0, c = 0;          // primitive dimensions
    Vec3 offset;                          // translate
    std::string mesh_path;                // mesh
    std::shared_ptr<MeshData> mesh;       // loaded lazily via load_meshes()
    std::vector<FGradeField> fractions;   // fgrade
    std::vector<std::string> materials;   // fgrade
    std::vector<NodePtr> children;
};

struct Design {
    NodePtr root;
};

struct FractionVector {
    std::vector<std::string> names;
    std::vector<double> values; // clamped and normalized; sums to 1
};

// Throws SyntaxError with line:column, ArityError for fgrade list mismatch.
Design parse_design(const std::string& text);

// Loads every mesh node's STL relative to base_dir. Idempotent.
void load_meshes(Design& design, const std::string& base_dir);

// Signed distance, negative inside. CSG uses min/max combining; throws
// MeshNotLoaded when the tree routes evaluation through a mesh node.
double eval_sdf(const Design& design, const Vec3& p);

// Material fractions at p (defined everywhere, inside or out). Innermost
// enclosing fgrade wins; expressions are clamped to [0,1], renormalized,
// and a >1e-3 pre-normalization drift warns.
FractionVector eval_fractions(const Design& design, const Vec3& p, WarningLog* warnings = nullptr);

// Scalar gradient coordinate used for palette binning: 1 - fraction[0].
// Equals the second material's fraction for two-material designs.
double eval_gradient(const Design& design, const Vec3& p, WarningLog* warnings = nullptr);

// Ordered material names as first encountered in the tree; ["default"]
// when no fgrade exists.
std::vector<std::string> design_materials(const Design& design);

BBox3 design_bbox(const Design& design);

std::string design_to_string(const Design& design);
bool designs_equal(const Design& a, const Design& b);

// When the design's only geometry is one mesh (possibly wrapped in fgrade
// or translate), returns it plus the accumulated translation; the slicer
// then cuts the mesh directly instead of contouring the SDF.
struct MeshGeometry {
    const MeshData* mesh;
    Vec3 offset;
};
std::optional<MeshGeometry> design_mesh_geometry(const Design& design);

} // namespace vcad
