#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "geometry.hpp"

namespace flatcount {

// Which arithmetic the surface's coordinates live in. Square-tiled surfaces
// built from unit squares keep exact integer coordinates until they are
// normalized or hit with a matrix; everything else is generic floating.
enum class CoordinateMode { integer, floating };

inline const char* to_string(CoordinateMode m) {
    return m == CoordinateMode::integer ? "int" : "float";
}

struct EdgeRef {
    int tri = -1;
    int slot = -1;
    friend bool operator==(EdgeRef a, EdgeRef b) {
        return a.tri == b.tri && a.slot == b.slot;
    }
};

// A triangle is stored as its three edge vectors in counterclockwise order;
// slot i runs from vertex i to vertex i+1 (mod 3), so the three must sum to
// zero and cross(edge[0], edge[1]) is twice the (positive) area.
struct Triangle {
    std::array<Vec2, 3> edge;
};

// Closed translation surface as a glued triangulation. partner[t][e] names
// the unique other edge slot carrying the opposite vector; the gluing is a
// fixed-point-free involution on edge slots.
struct TranslationSurface {
    std::string name;
    CoordinateMode mode = CoordinateMode::floating;
    std::vector<Triangle> triangles;
    std::vector<std::array<EdgeRef, 3>> partner;

    std::size_t face_count() const { return triangles.size(); }
    std::size_t edge_count() const { return triangles.size() * 3 / 2; }
};

struct ValidationIssue {
    std::string code;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const { return issues.empty(); }
};

inline ValidationReport validate(const TranslationSurface& s) {
    ValidationReport report;
    auto flag = [&](const char* code, std::string detail) {
        report.issues.push_back({code, std::move(detail)});
    };
    const int F = static_cast<int>(s.triangles.size());
    if (F == 0) flag("empty", "surface has no triangles");
    if (F % 2 != 0) flag("gluing-involution", "odd number of triangles cannot pair all edge slots");
    if (s.partner.size() != s.triangles.size())
        flag("gluing-range", "partner table size does not match triangle count");

    double scale = 1.0;
    for (const auto& tri : s.triangles)
        for (const auto& e : tri.edge) scale = std::max(scale, norm(e));
    const double tol = 1e-9 * scale;

    for (int t = 0; t < F; ++t) {
        const auto& e = s.triangles[t].edge;
        Vec2 sum = e[0] + e[1] + e[2];
        if (norm(sum) > tol)
            flag("edge-sum", "triangle " + std::to_string(t) + ": edge vectors do not close");
        if (cross(e[0], e[1]) <= 0.0)
            flag("negative-area", "triangle " + std::to_string(t) + " is not counterclockwise");
    }
    if (s.partner.size() == s.triangles.size()) {
        for (int t = 0; t < F; ++t) {
            for (int c = 0; c < 3; ++c) {
                EdgeRef p = s.partner[t][c];
                std::string where = "slot (" + std::to_string(t) + "," + std::to_string(c) + ")";
                if (p.tri < 0 || p.tri >= F || p.slot < 0 || p.slot >= 3) {
                    flag("gluing-range", where + " points outside the surface");
                    continue;
                }
                if (p.tri == t && p.slot == c) {
                    flag("gluing-fixed-point", where + " is glued to itself; gluing not fixed-point-free");
                    continue;
                }
                if (!(s.partner[p.tri][p.slot] == EdgeRef{t, c}))
                    flag("gluing-involution", where + " is not matched back by its partner");
                Vec2 mine = s.triangles[t].edge[c];
                Vec2 theirs = s.triangles[p.tri].edge[p.slot];
                if (norm(mine + theirs) > tol)
                    flag("opposite-vector", where + ": opposite-vector violation against its partner");
            }
        }
    }
    return report;
}

inline void require_valid(const TranslationSurface& s) {
    ValidationReport r = validate(s);
    if (!r.ok())
        throw geometry_error("invalid surface '" + s.name + "': [" + r.issues.front().code +
                             "] " + r.issues.front().detail);
}

inline double total_area(const TranslationSurface& s) {
    double a = 0.0;
    for (const auto& tri : s.triangles) a += 0.5 * cross(tri.edge[0], tri.edge[1]);
    return a;
}

// Walking counterclockwise around the vertex under corner (t, c): cross the
// incoming edge slot (c+2)%3; our vertex is the head of that slot, which is
// the tail of the partner slot, so the next corner sits at the partner's own
// slot index. The partner's opening ray equals this corner's closing ray as
// stored doubles, so cumulative angles around a cycle need no re-anchoring.
inline std::pair<int, int> next_corner(const TranslationSurface& s, int t, int c) {
    EdgeRef p = s.partner[t][(c + 2) % 3];
    return {p.tri, p.slot};
}

// Interior angle of corner (t, c): between the outgoing slot c and the
// reversed incoming slot (c+2)%3.
inline double corner_angle(const TranslationSurface& s, int t, int c) {
    Vec2 u = s.triangles[t].edge[c];
    Vec2 v = -s.triangles[t].edge[(c + 2) % 3];
    return angle_between(u, v);
}

struct SurfaceTopology {
    std::vector<std::array<int, 3>> corner_vertex;    // (t,c) -> vertex id
    std::vector<std::array<double, 3>> corner_angle;  // interior angle at (t,c)
    std::vector<std::array<double, 3>> corner_cum;    // angle of (t,c)'s opening
                                                      // ray past the cycle root
    std::vector<std::vector<std::pair<int, int>>> cycles;  // vertex id -> ccw corners
    std::vector<double> cone_angle;  // per vertex, plain sum of corner angles
    std::vector<int> order;          // per vertex, k with cone angle 2*pi*(k+1)
    int genus = 0;
};

inline SurfaceTopology build_topology(const TranslationSurface& s) {
    const int F = static_cast<int>(s.triangles.size());
    SurfaceTopology topo;
    topo.corner_vertex.assign(F, {-1, -1, -1});
    topo.corner_angle.assign(F, {0.0, 0.0, 0.0});
    topo.corner_cum.assign(F, {0.0, 0.0, 0.0});

    for (int t = 0; t < F; ++t)
        for (int c = 0; c < 3; ++c) topo.corner_angle[t][c] = corner_angle(s, t, c);

    for (int t0 = 0; t0 < F; ++t0) {
        for (int c0 = 0; c0 < 3; ++c0) {
            if (topo.corner_vertex[t0][c0] >= 0) continue;
            int v = static_cast<int>(topo.cycles.size());
            std::vector<std::pair<int, int>> cycle;
            double cum = 0.0;
            int t = t0, c = c0;
            do {
                topo.corner_vertex[t][c] = v;
                topo.corner_cum[t][c] = cum;
                cycle.emplace_back(t, c);
                cum += topo.corner_angle[t][c];
                auto [tn, cn] = next_corner(s, t, c);
                t = tn;
                c = cn;
                if (cycle.size() > static_cast<std::size_t>(3 * F))
                    throw geometry_error("corner walk around a vertex does not close");
            } while (!(t == t0 && c == c0));
            topo.cycles.push_back(std::move(cycle));
            topo.cone_angle.push_back(cum);
        }
    }

    topo.order.reserve(topo.cone_angle.size());
    for (double cone : topo.cone_angle) {
        double turns = cone / (2.0 * pi);
        int k = static_cast<int>(std::lround(turns)) - 1;
        if (k < 0 || std::abs(cone - 2.0 * pi * (k + 1)) > 1e-6)
            throw geometry_error("cone angle " + std::to_string(cone) +
                                 " is not a positive multiple of 2*pi");
        topo.order.push_back(k);
    }

    const int V = static_cast<int>(topo.cycles.size());
    const int E = 3 * F / 2;
    const int chi = V - E + F;
    if (chi % 2 != 0) throw geometry_error("Euler characteristic is odd");
    topo.genus = (2 - chi) / 2;
    return topo;
}

// Stratum label listing every vertex order, marked points included,
// e.g. "H(0)" for the square torus and "H(2)" for three-square surfaces.
inline std::string stratum_label(const SurfaceTopology& topo) {
    std::vector<int> orders = topo.order;
    std::sort(orders.rbegin(), orders.rend());
    std::string out = "H(";
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(orders[i]);
    }
    out += ")";
    return out;
}

// Counterclockwise angle from corner (t,c)'s opening ray to direction d,
// normalized to [0, 2*pi).
inline double corner_offset(const TranslationSurface& s, int t, int c, Vec2 d) {
    Vec2 u = s.triangles[t].edge[c];
    double a = std::atan2(cross(u, d), dot(u, d));
    if (a < 0.0) a += 2.0 * pi;
    return a;
}

// Which copy of [0, 2*pi) around the cone point a cumulative angle lands in.
// The small forgiveness term keeps rays that sit on a sheet boundary (up to
// accumulated rounding) on the lower sheet consistently.
inline int sheet_index(double cum_angle) {
    return static_cast<int>(std::floor(cum_angle / (2.0 * pi) + 1e-12));
}

} // namespace flatcount
