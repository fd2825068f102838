#include "vcadslicer/contour.hpp"

#include <cmath>
#include <map>

namespace vcad {

ScalarGrid sample_grid(const ScalarField2& field, const BBox2& bbox, double resolution) {
    if (resolution <= 0.0)
        throw Error(errc::resolution, "sampling resolution must be positive");
    if (!bbox.valid())
        throw Error(errc::resolution, "sampling bbox is empty");
    if (resolution > std::max(bbox.width(), bbox.height()))
        throw Error(errc::resolution, "sampling resolution exceeds bbox extent");

    ScalarGrid grid;
    grid.origin = bbox.min;
    grid.cell = resolution;
    grid.nx = int(std::ceil(bbox.width() / resolution - 1e-9)) + 1;
    grid.ny = int(std::ceil(bbox.height() / resolution - 1e-9)) + 1;
    grid.values.resize(size_t(grid.nx) * grid.ny);
    for (int iy = 0; iy < grid.ny; ++iy) {
        double y = bbox.min.y + iy * resolution;
        for (int ix = 0; ix < grid.nx; ++ix)
            grid.values[size_t(iy) * grid.nx + ix] = field(bbox.min.x + ix * resolution, y);
    }
    return grid;
}

namespace {

// Corner layout per cell:
//   c3 --- c2
//   |       |
//   c0 --- c1
// with c0 at (ix, iy). Mask bit k is set when corner k is inside (< iso).
enum CellEdge { eb = 0, er = 1, et = 2, el = 3 };

inline Vec2 edge_point(const ScalarGrid& g, int ix, int iy, int edge, double iso, double v0,
                       double v1, double v2, double v3) {
    auto lerp = [&](const Vec2& a, const Vec2& b, double va, double vb) {
        double t = (vb != va) ? (iso - va) / (vb - va) : 0.5;
        t = std::clamp(t, 0.0, 1.0);
        return a + (b - a) * t;
    };
    Vec2 p0 = g.point(ix, iy);
    Vec2 p1 = g.point(ix + 1, iy);
    Vec2 p2 = g.point(ix + 1, iy + 1);
    Vec2 p3 = g.point(ix, iy + 1);
    switch (edge) {
    case eb: return lerp(p0, p1, v0, v1);
    case er: return lerp(p1, p2, v1, v2);
    case et: return lerp(p3, p2, v3, v2);
    default: return lerp(p0, p3, v0, v3);
    }
}

} // namespace

std::vector<Segment2> marching_squares(const ScalarGrid& grid, double iso,
                                       const ScalarField2& field) {
    std::vector<Segment2> segments;
    if (grid.nx < 2 || grid.ny < 2)
        return segments;

    // Per case: pairs of (from-edge, to-edge), inside kept on the left.
    static const int table[16][4] = {
        /* 0*/ {-1, -1, -1, -1},
        /* 1*/ {eb, el, -1, -1},
        /* 2*/ {er, eb, -1, -1},
        /* 3*/ {er, el, -1, -1},
        /* 4*/ {et, er, -1, -1},
        /* 5*/ {-1, -1, -1, -1}, // saddle
        /* 6*/ {et, eb, -1, -1},
        /* 7*/ {et, el, -1, -1},
        /* 8*/ {el, et, -1, -1},
        /* 9*/ {eb, et, -1, -1},
        /*10*/ {-1, -1, -1, -1}, // saddle
        /*11*/ {er, et, -1, -1},
        /*12*/ {el, er, -1, -1},
        /*13*/ {eb, er, -1, -1},
        /*14*/ {el, eb, -1, -1},
        /*15*/ {-1, -1, -1, -1},
    };

    for (int iy = 0; iy + 1 < grid.ny; ++iy) {
        for (int ix = 0; ix + 1 < grid.nx; ++ix) {
            double v0 = grid.at(ix, iy);
            double v1 = grid.at(ix + 1, iy);
            double v2 = grid.at(ix + 1, iy + 1);
            double v3 = grid.at(ix, iy + 1);
            int mask = (v0 < iso ? 1 : 0) | (v1 < iso ? 2 : 0) | (v2 < iso ? 4 : 0) |
                       (v3 < iso ? 8 : 0);
            if (mask == 0 || mask == 15)
                continue;

            auto pt = [&](int edge) {
                return edge_point(grid, ix, iy, edge, iso, v0, v1, v2, v3);
            };

            if (mask == 5 || mask == 10) {
                Vec2 c = grid.point(ix, iy) + Vec2{grid.cell * 0.5, grid.cell * 0.5};
                double center = field ? field(c.x, c.y) : 0.25 * (v0 + v1 + v2 + v3);
                bool center_inside = center < iso;
                if (mask == 5) {
                    if (center_inside) {
                        segments.push_back({pt(et), pt(el)});
                        segments.push_back({pt(eb), pt(er)});
                    } else {
                        segments.push_back({pt(eb), pt(el)});
                        segments.push_back({pt(et), pt(er)});
                    }
                } else {
                    if (center_inside) {
                        segments.push_back({pt(el), pt(eb)});
                        segments.push_back({pt(er), pt(et)});
                    } else {
                        segments.push_back({pt(er), pt(eb)});
                        segments.push_back({pt(el), pt(et)});
                    }
                }
                continue;
            }

            const int* row = table[mask];
            segments.push_back({pt(row[0]), pt(row[1])});
        }
    }
    return segments;
}

namespace {

// Spatial bucket merge of endpoints within tol.
class VertexMerger {
public:
    explicit VertexMerger(double tol) : m_tol(tol), m_cell(std::max(tol, 1e-12)) {}

    int id_for(const Vec2& p, std::vector<Vec2>& verts) {
        int64_t cx = (int64_t)std::floor(p.x / m_cell);
        int64_t cy = (int64_t)std::floor(p.y / m_cell);
        for (int64_t dx = -1; dx <= 1; ++dx) {
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
    double m_cell;
    std::unordered_map<uint64_t, std::vector<int>> m_map;
};

} // namespace

Contour stitch_segments(const std::vector<Segment2>& segments, double tol,
                        WarningLog* warnings) {
    Contour contour;
    if (tol <= 0)
        tol = kStitchTol;

    std::vector<Vec2> verts;
    VertexMerger merger(tol);
    struct Edge {
        int from, to;
        bool used = false;
    };
    std::vector<Edge> edges;
    int dropped = 0;
    for (const Segment2& s : segments) {
        if ((s.b - s.a).norm() < tol) {
            ++dropped;
            continue;
        }
        int ia = merger.id_for(s.a, verts);
        int ib = merger.id_for(s.b, verts);
        if (ia == ib) {
            ++dropped;
            continue;
        }
        edges.push_back({ia, ib});
    }
    if (dropped > 0)
        warn(warnings, "stitch: dropped " + std::to_string(dropped) +
                           " degenerate segment(s) below tolerance");

    // Directed adjacency: marching squares emits consistently oriented
    // segments, so boundary walks follow edge direction.
    std::vector<std::vector<int>> out_edges(verts.size());
    std::vector<std::vector<int>> in_edges(verts.size());
    for (size_t i = 0; i < edges.size(); ++i) {
        out_edges[edges[i].from].push_back(int(i));
        in_edges[edges[i].to].push_back(int(i));
    }

    auto walk_forward = [&](int start_edge) {
        std::vector<int> chain_verts;
        int e = start_edge;
        chain_verts.push_back(edges[e].from);
        for (;;) {
            edges[e].used = true;
            int v = edges[e].to;
            chain_verts.push_back(v);
            if (v == chain_verts.front())
                break; // cycle closed
            // End chains at branch points so output pieces stay simple.
            if (out_edges[v].size() + in_edges[v].size() != 2)
                break;
            int next = -1;
            for (int cand : out_edges[v])
                if (!edges[cand].used) {
                    next = cand;
                    break;
                }
            if (next < 0)
                break;
            e = next;
        }
        return chain_verts;
    };

    // Deterministic order: scan edges in insertion order.
    for (size_t i = 0; i < edges.size(); ++i) {
        if (edges[i].used)
            continue;
        std::vector<int> chain = walk_forward(int(i));
        // Extend backwards for open chains.
        while (chain.front() != chain.back()) {
            int v = chain.front();
            if (out_edges[v].size() + in_edges[v].size() > 2)
                break;
            int prev = -1;
            for (int cand : in_edges[v])
                if (!edges[cand].used) {
                    prev = cand;
                    break;
                }
            if (prev < 0)
                break;
            edges[prev].used = true;
            chain.insert(chain.begin(), edges[prev].from);
        }

        bool closed = chain.size() > 2 && chain.front() == chain.back();
        if (closed) {
            Ring ring;
            ring.reserve(chain.size() - 1);
            for (size_t k = 0; k + 1 < chain.size(); ++k)
                ring.push_back(verts[chain[k]]);
            ring = simplify_collinear(ring);
            if (ring.size() >= 3 && std::abs(ring_signed_area(ring)) > tol * tol) {
                // Canonical start: lexicographically smallest vertex.
                size_t best = 0;
                for (size_t k = 1; k < ring.size(); ++k)
                    if (lex_less(ring[k], ring[best]))
                        best = k;
                std::rotate(ring.begin(), ring.begin() + best, ring.end());
                contour.polygons.push_back(std::move(ring));
            } else {
                warn(warnings, "stitch: dropped a closed loop of negligible area");
            }
        } else {
            Polyline line;
            line.reserve(chain.size());
            for (int v : chain)
                line.push_back(verts[v]);
            line = simplify_collinear_open(line);
            if (line.size() >= 2)
                contour.polylines.push_back(std::move(line));
        }
    }
    return contour;
}

namespace {

double directed_hausdorff(const Ring& a, const Ring& b) {
    double worst = 0.0;
    size_t n = b.size();
    for (const Vec2& p : a) {
        double best = std::numeric_limits<double>::max();
        for (size_t i = 0, j = n - 1; i < n; j = i++)
            best = std::min(best, distance_point_segment(p, b[j], b[i]));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hausdorff_distance(const Ring& a, const Ring& b) {
    return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

} // namespace vcad
