#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "delaunay.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "parallel.hpp"
#include "surface.hpp"

namespace flatcount {

// An oriented saddle connection: straight segment from one singularity to
// another (possibly the same) with no singularity in its interior. The
// start sheet tells which copy of [0, 2*pi) around the start cone point the
// outgoing direction uses.
struct SaddleConnection {
    Vec2 holonomy;
    double length = 0.0;
    int start_singularity = -1;
    int end_singularity = -1;
    int start_sheet = 0;
};

// All saddle connections of length <= bound_L, as a multiset: parallel
// copies from different singularities or sheets are separate entries.
struct HolonomyMultiset {
    std::vector<SaddleConnection> entries;
    double bound_L = 0.0;
    std::string source;                 // name of the originating surface
    bool collapsed = false;             // true after collapse_to_set
    long degenerate_sector_skips = 0;   // sectors fp could not orient, skipped
};

struct EnumerateOptions {
    double safety_cap = 1e4;            // max L in sqrt(area) units
    std::size_t max_connections = 20'000'000;
    int threads = 1;
};

// Total order making enumeration output independent of traversal and thread
// schedule: by squared length, then direction, then combinatorial data. Two
// distinct connections never share all five fields.
inline bool canonical_less(const SaddleConnection& a, const SaddleConnection& b) {
    const double na = norm2(a.holonomy), nb = norm2(b.holonomy);
    if (na != nb) return na < nb;
    const double aa = std::atan2(a.holonomy.y, a.holonomy.x);
    const double ab = std::atan2(b.holonomy.y, b.holonomy.x);
    if (aa != ab) return aa < ab;
    if (a.start_singularity != b.start_singularity) return a.start_singularity < b.start_singularity;
    if (a.start_sheet != b.start_sheet) return a.start_sheet < b.start_sheet;
    return a.end_singularity < b.end_singularity;
}

inline void canonical_sort(std::vector<SaddleConnection>& v) {
    std::sort(v.begin(), v.end(), canonical_less);
}

namespace detail {

// A search node: we have developed into `tri` across its edge slot `slot`;
// pos is the developed position of that triangle's vertex `slot`, and only
// directions in the open sector from u1 counterclockwise to u2 (angle < pi)
// are still live.
struct UnfoldNode {
    int tri, slot;
    Vec2 pos, u1, u2;
};

// Squared distance from the origin to the part of segment [a,b] inside the
// closed cone from u1 counterclockwise to u2; +inf when that part is empty.
// Constraints too flat for fp to trust are dropped, which can only enlarge
// the clipped set, so pruning on this value never loses connections.
inline double clipped_min_dist2(Vec2 a, Vec2 b, Vec2 u1, Vec2 u2) {
    const Vec2 d = b - a;
    double lo = 0.0, hi = 1.0;
    auto clip_nonneg = [&](double c0, double c1, double scale) {
        if (std::fabs(c1) <= 1e-14 * scale) return;
        const double r = -c0 / c1;
        if (c1 > 0.0) lo = std::max(lo, r);
        else hi = std::min(hi, r);
    };
    const double seg_scale = norm(a) + norm(d);
    clip_nonneg(cross(u1, a), cross(u1, d), norm(u1) * seg_scale);
    clip_nonneg(cross(a, u2), cross(d, u2), norm(u2) * seg_scale);
    if (lo > hi) return std::numeric_limits<double>::infinity();
    const double dd = norm2(d);
    const double t = dd > 0.0 ? std::clamp(-dot(a, d) / dd, lo, hi) : lo;
    return norm2(a + t * d);
}

// Depth-first sector unfolding from one corner. Emits the corner's own
// outgoing edge, then walks across triangles splitting the sector at every
// developed vertex; a vertex on a sector boundary lies behind an earlier
// vertex on the same ray and is skipped. Children are pruned when the
// crossed edge, clipped to the child sector, is entirely farther than L.
inline void search_corner(const TranslationSurface& s, const SurfaceTopology& topo, int t0,
                          int c0, double L2, double prune2, std::size_t cap,
                          std::vector<SaddleConnection>& out, long& degenerate_skips) {
    const int start_v = topo.corner_vertex[t0][c0];
    const double cum0 = topo.corner_cum[t0][c0];
    const Vec2 root = s.triangles[t0].edge[c0];

    auto emit = [&](Vec2 v, int end_vertex) {
        if (!(norm2(v) <= L2)) return;
        if (out.size() >= cap)
            throw budget_error("more than " + std::to_string(cap) + " connections on '" +
                               s.name + "'");
        const int sheet = sheet_index(cum0 + corner_offset(s, t0, c0, v));
        out.push_back({v, norm(v), start_v, end_vertex, sheet});
    };

    emit(root, topo.corner_vertex[t0][(c0 + 1) % 3]);

    std::vector<UnfoldNode> stack;
    {
        const Vec2 u2 = -s.triangles[t0].edge[(c0 + 2) % 3];
        const Vec2 far_pos = root + s.triangles[t0].edge[(c0 + 1) % 3];
        if (clipped_min_dist2(root, far_pos, root, u2) <= prune2) {
            const EdgeRef p = s.partner[t0][(c0 + 1) % 3];
            stack.push_back({p.tri, p.slot, far_pos, root, u2});
        }
    }
    while (!stack.empty()) {
        const UnfoldNode n = stack.back();
        stack.pop_back();
        const Vec2 p0 = n.pos;
        const Vec2 p1 = n.pos + s.triangles[n.tri].edge[n.slot];
        const Vec2 v = p1 + s.triangles[n.tri].edge[(n.slot + 1) % 3];
        const double nv = norm(v);
        const bool in1 = cross(n.u1, v) > 1e-12 * norm(n.u1) * nv;
        const bool in2 = cross(v, n.u2) > 1e-12 * norm(n.u2) * nv;
        if (in1 && in2) {
            emit(v, topo.corner_vertex[n.tri][(n.slot + 2) % 3]);
            if (clipped_min_dist2(p1, v, n.u1, v) <= prune2) {
                const EdgeRef pl = s.partner[n.tri][(n.slot + 1) % 3];
                stack.push_back({pl.tri, pl.slot, v, n.u1, v});
            }
            if (clipped_min_dist2(v, p0, v, n.u2) <= prune2) {
                const EdgeRef pr = s.partner[n.tri][(n.slot + 2) % 3];
                stack.push_back({pr.tri, pr.slot, p0, v, n.u2});
            }
        } else if (in1) {
            // far vertex at or beyond the u2 boundary: everything exits left
            if (clipped_min_dist2(p1, v, n.u1, n.u2) <= prune2) {
                const EdgeRef pl = s.partner[n.tri][(n.slot + 1) % 3];
                stack.push_back({pl.tri, pl.slot, v, n.u1, n.u2});
            }
        } else if (in2) {
            // far vertex at or before the u1 boundary: everything exits right
            if (clipped_min_dist2(v, p0, n.u1, n.u2) <= prune2) {
                const EdgeRef pr = s.partner[n.tri][(n.slot + 2) % 3];
                stack.push_back({pr.tri, pr.slot, p0, n.u1, n.u2});
            }
        } else {
            ++degenerate_skips;  // sector numerically empty
        }
    }
}

} // namespace detail

// Every oriented saddle connection of length <= L, canonically sorted.
inline HolonomyMultiset enumerate(const TranslationSurface& s, double L,
                                  const EnumerateOptions& opt = {}) {
    require_valid(s);
    if (!(L > 0.0)) throw parse_error("enumeration bound must be positive");
    const double scale = std::sqrt(total_area(s));
    if (L > opt.safety_cap * scale)
        throw budget_error("enumeration bound " + std::to_string(L) + " exceeds safety cap " +
                           std::to_string(opt.safety_cap) + " * sqrt(area)");
    const SurfaceTopology topo = build_topology(s);

    std::vector<std::pair<int, int>> corners;
    corners.reserve(3 * s.face_count());
    for (int t = 0; t < s.face_count(); ++t)
        for (int c = 0; c < 3; ++c) corners.emplace_back(t, c);

    const int workers = resolve_threads(opt.threads);
    std::vector<std::vector<SaddleConnection>> parts(workers);
    std::vector<long> skips(workers, 0);
    const double L2 = L * L;
    const double prune = L * (1.0 + 1e-9);
    parallel_chunks(corners.size(), workers, [&](std::size_t chunk, std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            detail::search_corner(s, topo, corners[i].first, corners[i].second, L2,
                                  prune * prune, opt.max_connections, parts[chunk],
                                  skips[chunk]);
    });

    HolonomyMultiset m;
    m.bound_L = L;
    m.source = s.name;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    if (total > opt.max_connections)
        throw budget_error("more than " + std::to_string(opt.max_connections) +
                           " connections on '" + s.name + "'");
    m.entries.reserve(total);
    for (auto& p : parts) m.entries.insert(m.entries.end(), p.begin(), p.end());
    for (long k : skips) m.degenerate_sector_skips += k;
    canonical_sort(m.entries);
    return m;
}

// Collapse multiplicity: keep one entry per distinct holonomy vector
// (exact bit equality; entries are already sorted so equal vectors are
// adjacent).
inline HolonomyMultiset collapse_to_set(HolonomyMultiset m) {
    std::vector<SaddleConnection> kept;
    kept.reserve(m.entries.size());
    for (const auto& e : m.entries)
        if (kept.empty() || !(kept.back().holonomy == e.holonomy)) kept.push_back(e);
    m.entries = std::move(kept);
    m.collapsed = true;
    return m;
}

// Follow the straight ray from a singularity in the given direction on the
// given sheet until it hits a singularity (returned) or leaves the ball of
// radius L (nullopt). A vertex counts as hit when its developed position is
// within relative tolerance 1e-9 of the ray.
inline std::optional<SaddleConnection> trace_separatrix(const TranslationSurface& s,
                                                        int singularity, int sheet, Vec2 dir,
                                                        double L) {
    require_valid(s);
    if (!(norm2(dir) > 0.0)) throw parse_error("separatrix direction must be nonzero");
    if (!(L > 0.0)) throw parse_error("separatrix length bound must be positive");
    const SurfaceTopology topo = build_topology(s);
    if (singularity < 0 || singularity >= static_cast<int>(topo.cycles.size()))
        throw parse_error("no singularity with index " + std::to_string(singularity));
    if (sheet < 0 || sheet > topo.order[singularity])
        throw parse_error("sheet " + std::to_string(sheet) + " out of range for a cone angle of " +
                          std::to_string(topo.order[singularity] + 1) + " turns");

    // locate the corner whose angular span contains (dir, sheet)
    int t0 = -1, c0 = -1;
    double delta = 0.0;
    for (auto [t, c] : topo.cycles[singularity]) {
        const double off = corner_offset(s, t, c, dir);
        if (off < topo.corner_angle[t][c] &&
            sheet_index(topo.corner_cum[t][c] + off) == sheet) {
            t0 = t;
            c0 = c;
            delta = off;
            break;
        }
    }
    if (t0 < 0)
        throw geometry_error("no corner of singularity " + std::to_string(singularity) +
                             " contains the requested direction and sheet");

    const double limit = L * (1.0 + 1e-9);
    auto hit = [&](Vec2 v, int end_vertex) -> std::optional<SaddleConnection> {
        if (norm(v) > limit) return std::nullopt;
        return SaddleConnection{v, norm(v), singularity, end_vertex, sheet};
    };

    // along the corner's opening edge the first vertex is its endpoint
    if (delta == 0.0) return hit(s.triangles[t0].edge[c0], topo.corner_vertex[t0][(c0 + 1) % 3]);

    int tri = s.partner[t0][(c0 + 1) % 3].tri;
    int slot = s.partner[t0][(c0 + 1) % 3].slot;
    Vec2 pos = -s.triangles[t0].edge[(c0 + 2) % 3];
    for (long crossings = 1;; ++crossings) {
        if (crossings > 1'000'000)
            throw budget_error("separatrix crossed 1e6 edges without ending");
        const Vec2 p0 = pos;
        const Vec2 p1 = pos + s.triangles[tri].edge[slot];
        // distance along the ray where it crosses the entry segment
        const double denom = cross(dir, p1 - p0);
        if (denom != 0.0) {
            const double tau = cross(p0, p1 - p0) / denom;  // crossing point is tau*dir
            if (tau * norm(dir) > limit) return std::nullopt;
        }
        const Vec2 v = p1 + s.triangles[tri].edge[(slot + 1) % 3];
        const double c = cross(dir, v);
        if (std::fabs(c) < 1e-9 * norm(dir) * norm(v)) {
            if (dot(dir, v) <= 0.0)
                throw geometry_error("separatrix walk lost the ray");
            return hit(v, topo.corner_vertex[tri][(slot + 2) % 3]);
        }
        if (c > 0.0) {  // far vertex left of the ray: exit across (slot+1)
            const EdgeRef p = s.partner[tri][(slot + 1) % 3];
            tri = p.tri;
            slot = p.slot;
            pos = v;
        } else {
            const EdgeRef p = s.partner[tri][(slot + 2) % 3];
            tri = p.tri;
            slot = p.slot;
            pos = p0;
        }
    }
}

// Shortest saddle connection: every Delaunay edge is a connection, so the
// shortest Delaunay edge length bounds the search radius.
inline double systole(const TranslationSurface& s) {
    TranslationSurface d = s;
    delaunayize(d);
    double shortest_edge = std::numeric_limits<double>::infinity();
    for (const auto& tri : d.triangles)
        for (const auto& e : tri.edge) shortest_edge = std::min(shortest_edge, norm(e));
    // hair of slack so the defining edge survives the norm2 <= L*L cut
    const HolonomyMultiset m = enumerate(d, shortest_edge * (1.0 + 1e-12));
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : m.entries) best = std::min(best, e.length);
    return best;
}

} // namespace flatcount
