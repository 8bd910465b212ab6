#pragma once

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "enumerate.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "surface.hpp"

namespace flatcount {

// A surface recognized as axis-aligned unit squares, each cut along its
// rising diagonal into an A triangle (lower right) and a B triangle (upper
// left). rot_* give the cyclic offset between stored and canonical edge
// order: stored slot j carries canonical edge (j + rot) % 3.
struct OrigamiStructure {
    int squares = 0;
    std::vector<int> sigma_h, sigma_v;  // square to the right / above
    std::vector<int> inv_h, inv_v;
    std::vector<int> tri_a, tri_b;      // per square: triangle indices
    std::vector<int> rot_a, rot_b;

    // stored (triangle, slot) of a canonical corner: kind 0for A, 1 for B
    std::pair<int, int> corner(int square, int kind, int canon) const {
        const int tri = kind == 0 ? tri_a[square] : tri_b[square];
        const int rot = kind == 0 ? rot_a[square] : rot_b[square];
        return {tri, ((canon - rot) % 3 + 3) % 3};
    }
};

// Rebuild the two square permutations from a triangulated origami. Fails
// with mode_error when the surface is not exactly unit squares cut along
// rising diagonals (e.g. after any linear distortion).
inline OrigamiStructure recover_origami(const TranslationSurface& s) {
    if (s.mode != CoordinateMode::integer)
        throw mode_error("origami recovery requires an integer-mode surface");
    require_valid(s);
    static const Vec2 canon[2][3] = {{{1, 0}, {0, 1}, {-1, -1}}, {{1, 1}, {-1, 0}, {0, -1}}};
    const int F = s.face_count();
    std::vector<int> kind(F, -1), rot(F, -1);
    for (int t = 0; t < F; ++t) {
        for (int k = 0; k < 2 && kind[t] < 0; ++k)
            for (int r = 0; r < 3 && kind[t] < 0; ++r)
                if (s.triangles[t].edge[0] == canon[k][r % 3] &&
                    s.triangles[t].edge[1] == canon[k][(r + 1) % 3] &&
                    s.triangles[t].edge[2] == canon[k][(r + 2) % 3]) {
                    kind[t] = k;
                    rot[t] = r;
                }
        if (kind[t] < 0)
            throw mode_error("triangle " + std::to_string(t) +
                             " is not half of an axis-aligned unit square");
    }

    OrigamiStructure og;
    std::vector<int> square_of(F, -1);
    for (int t = 0; t < F; ++t) {
        if (kind[t] != 0) continue;
        const int slot_diag = ((2 - rot[t]) % 3 + 3) % 3;
        const EdgeRef p = s.partner[t][slot_diag];
        if (kind[p.tri] != 1 || (p.slot + rot[p.tri]) % 3 != 0)
            throw mode_error("triangle " + std::to_string(t) +
                             " is not glued to an upper half along its diagonal");
        const int sq = og.squares++;
        square_of[t] = square_of[p.tri] = sq;
        og.tri_a.push_back(t);
        og.tri_b.push_back(p.tri);
        og.rot_a.push_back(rot[t]);
        og.rot_b.push_back(rot[p.tri]);
    }
    for (int t = 0; t < F; ++t)
        if (square_of[t] < 0)
            throw mode_error("triangle " + std::to_string(t) + " belongs to no square");

    og.sigma_h.resize(og.squares);
    og.sigma_v.resize(og.squares);
    for (int i = 0; i < og.squares; ++i) {
        const auto [ra, rb] = std::pair(og.rot_a[i], og.rot_b[i]);
        const EdgeRef right = s.partner[og.tri_a[i]][((1 - ra) % 3 + 3) % 3];
        if (kind[right.tri] != 1 || (right.slot + rot[right.tri]) % 3 != 2)
            throw mode_error("square " + std::to_string(i) + " has a malformed right gluing");
        og.sigma_h[i] = square_of[right.tri];
        const EdgeRef top = s.partner[og.tri_b[i]][((1 - rb) % 3 + 3) % 3];
        if (kind[top.tri] != 0 || (top.slot + rot[top.tri]) % 3 != 0)
            throw mode_error("square " + std::to_string(i) + " has a malformed top gluing");
        og.sigma_v[i] = square_of[top.tri];
    }
    og.inv_h.resize(og.squares);
    og.inv_v.resize(og.squares);
    for (int i = 0; i < og.squares; ++i) {
        og.inv_h[og.sigma_h[i]] = i;
        og.inv_v[og.sigma_v[i]] = i;
    }
    return og;
}

namespace detail {

// Square reached after following (dx, dy) from a corner of `sq` across the
// grid: merge the vertical crossings (at parameter i*|dy|) and horizontal
// ones (at j*|dx|) in exact integer order. Coprimality rules out ties.
inline int origami_trace(const OrigamiStructure& og, int sq, long dx, long dy) {
    const long p = std::labs(dx), q = std::labs(dy);
    int cur = sq;
    long i = 1, j = 1;
    while (i < p || j < q) {
        const bool vertical = (j >= q) || (i < p && i * q < j * p);
        if (vertical) {
            cur = dx > 0 ? og.sigma_h[cur] : og.inv_h[cur];
            ++i;
        } else {
            cur = dy > 0 ? og.sigma_v[cur] : og.inv_v[cur];
            ++j;
        }
    }
    return cur;
}

} // namespace detail

// Independent enumeration for origamis: every saddle connection is a
// primitive lattice vector starting at a lattice point, one per square and
// direction, because every lattice point of the grid is a surface vertex.
// Start and end corners are read off tables indexed by octant; interior
// squares are crossed with exact integer arithmetic only.
inline HolonomyMultiset enumerate_origami(const TranslationSurface& s, double L) {
    if (!(L > 0.0)) throw parse_error("enumeration bound must be positive");
    const OrigamiStructure og = recover_origami(s);
    const SurfaceTopology topo = build_topology(s);

    HolonomyMultiset m;
    m.bound_L = L;
    m.source = s.name;

    const long lmax = static_cast<long>(std::floor(L));
    for (long dx = -lmax; dx <= lmax; ++dx) {
        for (long dy = -lmax; dy <= lmax; ++dy) {
            if (dx == 0 && dy == 0) continue;
            if (std::gcd(std::labs(dx), std::labs(dy)) != 1) continue;
            const Vec2 hol{static_cast<double>(dx), static_cast<double>(dy)};
            if (!(norm2(hol) <= L * L)) continue;

            for (int sq = 0; sq < og.squares; ++sq) {
                std::pair<int, int> sc, ec;
                if (dy == 0) {
                    sc = dx > 0 ? og.corner(sq, 0, 0) : og.corner(sq, 1, 1);
                    ec = dx > 0 ? og.corner(sq, 0, 1) : og.corner(sq, 1, 2);
                } else if (dx == 0) {
                    sc = dy > 0 ? og.corner(sq, 0, 1) : og.corner(sq, 1, 2);
                    ec = dy > 0 ? og.corner(sq, 0, 2) : og.corner(sq, 1, 0);
                } else {
                    if (dx > 0 && dy > 0) sc = dx > dy ? og.corner(sq, 0, 0) : og.corner(sq, 1, 0);
                    else if (dx < 0 && dy > 0) sc = og.corner(sq, 0, 1);
                    else if (dx < 0 && dy < 0) sc = dy > dx ? og.corner(sq, 1, 1) : og.corner(sq, 0, 2);
                    else sc = og.corner(sq, 1, 2);
                    const int e = detail::origami_trace(og, sq, dx, dy);
                    if (dx > 0 && dy > 0) ec = og.corner(e, 1, 1);       // NE
                    else if (dx < 0 && dy > 0) ec = og.corner(e, 1, 2);  // NW
                    else if (dx < 0 && dy < 0) ec = og.corner(e, 0, 0);  // SW
                    else ec = og.corner(e, 0, 1);                        // SE
                }
                const auto [st, ss] = sc;
                const auto [et, es] = ec;
                m.entries.push_back(
                    {hol, norm(hol), topo.corner_vertex[st][ss], topo.corner_vertex[et][es],
                     sheet_index(topo.corner_cum[st][ss] + corner_offset(s, st, ss, hol))});
            }
        }
    }
    canonical_sort(m.entries);
    return m;
}

} // namespace flatcount
