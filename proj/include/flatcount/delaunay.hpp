#pragma once

#include <algorithm>
#include <limits>
#include <string>
#include <utility>

#include "errors.hpp"
#include "geometry.hpp"
#include "surface.hpp"

namespace flatcount {

// Signed incircle test for the quadrilateral glued across edge slot (t,e).
// Triangle t is developed as (0, A, A+B) with A = edge[t][e]; the partner
// triangle's far vertex then sits at its own next edge vector. Positive
// means that vertex lies strictly inside t's circumcircle, i.e. the edge is
// not locally Delaunay.
inline double incircle(const TranslationSurface& s, EdgeRef ref) {
    const int t = ref.tri, e = ref.slot;
    const EdgeRef p = s.partner[t][e];
    const Vec2 A = s.triangles[t].edge[e];
    const Vec2 B = s.triangles[t].edge[(e + 1) % 3];
    const Vec2 D = s.triangles[p.tri].edge[(p.slot + 1) % 3];
    return incircle_det(Vec2{0, 0}, A, A + B, D);
}

// Flip the diagonal of the quadrilateral glued across (t1,e1). The four
// outer sides keep their vectors but move to fixed slots of the two
// triangles; outer gluings are rewired through a relocation map so that
// sides glued to the quadrilateral itself (as on a one-square torus) stay
// consistent.
inline void flip(TranslationSurface& s, int t1, int e1) {
    const EdgeRef p = s.partner[t1][e1];
    const int t2 = p.tri, e2 = p.slot;
    if (t2 == t1) throw geometry_error("flip across a slot glued to its own triangle");

    const Vec2 A = s.triangles[t1].edge[e1];
    const Vec2 B = s.triangles[t1].edge[(e1 + 1) % 3];
    const Vec2 C = s.triangles[t1].edge[(e1 + 2) % 3];
    const Vec2 Bp = s.triangles[t2].edge[(e2 + 1) % 3];
    const Vec2 Cp = s.triangles[t2].edge[(e2 + 2) % 3];
    const Vec2 G = (A + B) - Bp;  // new diagonal: t2's far vertex -> t1's far vertex

    const EdgeRef nb_B = s.partner[t1][(e1 + 1) % 3];
    const EdgeRef nb_C = s.partner[t1][(e1 + 2) % 3];
    const EdgeRef nb_Bp = s.partner[t2][(e2 + 1) % 3];
    const EdgeRef nb_Cp = s.partner[t2][(e2 + 2) % 3];

    auto relocate = [&](EdgeRef r) -> EdgeRef {
        if (r.tri == t1 && r.slot == (e1 + 1) % 3) return {t2, 1};
        if (r.tri == t1 && r.slot == (e1 + 2) % 3) return {t1, 2};
        if (r.tri == t2 && r.slot == (e2 + 1) % 3) return {t1, 0};
        if (r.tri == t2 && r.slot == (e2 + 2) % 3) return {t2, 0};
        return r;
    };

    s.triangles[t1].edge = {Bp, G, C};
    s.triangles[t2].edge = {Cp, B, -G};

    s.partner[t1][1] = {t2, 2};
    s.partner[t2][2] = {t1, 1};
    auto reglue = [&](EdgeRef here, EdgeRef nb) {
        const EdgeRef n = relocate(nb);
        s.partner[here.tri][here.slot] = n;
        s.partner[n.tri][n.slot] = here;
    };
    reglue({t2, 1}, nb_B);
    reglue({t1, 2}, nb_C);
    reglue({t1, 0}, nb_Bp);
    reglue({t2, 0}, nb_Cp);
}

// Cocircular configurations (|det| at fp-noise scale) are treated as already
// Delaunay, so square-tiled surfaces flip zero times.
inline constexpr double delaunay_tolerance = 1e-9;

// Lawson's flip algorithm: scan slots in a fixed order, flip the first
// non-Delaunay edge, restart. Returns the number of flips performed.
inline int delaunayize(TranslationSurface& s) {
    require_valid(s);
    const int F = s.face_count();
    const long E = s.edge_count();
    const long budget = 50L * E * E;
    long flips = 0;
    for (;;) {
        bool flipped = false;
        for (int t = 0; t < F && !flipped; ++t)
            for (int c = 0; c < 3 && !flipped; ++c) {
                const EdgeRef q = s.partner[t][c];
                if (std::pair(q.tri, q.slot) < std::pair(t, c)) continue;
                if (incircle(s, {t, c}) > delaunay_tolerance) {
                    flip(s, t, c);
                    flipped = true;
                    if (++flips > budget)
                        throw budget_error("delaunay flip budget " + std::to_string(budget) +
                                           " exceeded on '" + s.name + "'");
                }
            }
        if (!flipped) return static_cast<int>(flips);
    }
}

// Largest incircle determinant over all edges; <= delaunay_tolerance means
// the triangulation is Delaunay.
inline double max_incircle(const TranslationSurface& s) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < s.face_count(); ++t)
        for (int c = 0; c < 3; ++c) {
            const EdgeRef q = s.partner[t][c];
            if (std::pair(q.tri, q.slot) < std::pair(t, c)) continue;
            worst = std::max(worst, incircle(s, {t, c}));
        }
    return worst;
}

inline bool is_delaunay(const TranslationSurface& s) {
    return max_incircle(s) <= delaunay_tolerance;
}

} // namespace flatcount
