#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "enumerate.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "surface.hpp"

namespace flatcount {

// 2x2 real matrix, row-major.
struct Mat2 {
    double a = 1, b = 0, c = 0, d = 1;

    Vec2 apply(Vec2 v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
};

inline double det(Mat2 m) { return m.a * m.d - m.b * m.c; }

inline Mat2 compose(Mat2 m, Mat2 n) {
    return {m.a * n.a + m.b * n.c, m.a * n.b + m.b * n.d,
            m.c * n.a + m.d * n.c, m.c * n.b + m.d * n.d};
}

inline Mat2 inverse(Mat2 m) {
    const double dt = det(m);
    if (dt == 0.0) throw geometry_error("singular 2x2 matrix has no inverse");
    return {m.d / dt, -m.b / dt, -m.c / dt, m.a / dt};
}

// Largest singular value.
inline double op_norm(Mat2 m) {
    const double s = m.a * m.a + m.b * m.b + m.c * m.c + m.d * m.d;
    const double dt = det(m);
    const double disc = std::max(0.0, s * s - 4.0 * dt * dt);
    return std::sqrt(0.5 * (s + std::sqrt(disc)));
}

// Diagonal geodesic-flow matrix diag(e^t, e^-t).
inline Mat2 make_gt(double t) { return {std::exp(t), 0.0, 0.0, std::exp(-t)}; }

// Counterclockwise rotation.
inline Mat2 make_rot(double theta) {
    const double c = std::cos(theta), s = std::sin(theta);
    return {c, -s, s, c};
}

inline Mat2 make_raw(double a, double b, double c, double d) {
    const Mat2 m{a, b, c, d};
    if (std::fabs(det(m) - 1.0) > 1e-9)
        throw geometry_error("matrix is not unimodular: det = " + std::to_string(det(m)));
    return m;
}

// Applies m to every holonomy vector.  The completeness certificate shrinks to
// bound_L / op_norm(m^-1): inside that radius the image list is still complete.
// Entries beyond the new bound are dropped (with a hair of slack so isometries
// keep entries sitting exactly on the old boundary).
inline HolonomyMultiset act_on_holonomies(Mat2 m, const HolonomyMultiset& set) {
    HolonomyMultiset out;
    out.bound_L = set.bound_L / op_norm(inverse(m));
    out.source = set.source;
    out.collapsed = set.collapsed;
    out.degenerate_sector_skips = set.degenerate_sector_skips;
    const double keep2 = out.bound_L * out.bound_L * (1.0 + 2e-9);
    out.entries.reserve(set.entries.size());
    for (const SaddleConnection& e : set.entries) {
        SaddleConnection sc = e;
        sc.holonomy = m.apply(e.holonomy);
        if (norm2(sc.holonomy) > keep2) continue;
        sc.length = norm(sc.holonomy);
        out.entries.push_back(sc);
    }
    canonical_sort(out.entries);
    return out;
}

// Applies m to every edge vector.  Gluing combinatorics are untouched; the
// result is a floating-point surface even when m is the identity.
inline TranslationSurface act_on_surface(Mat2 m, const TranslationSurface& s) {
    TranslationSurface out = s;
    out.mode = CoordinateMode::floating;
    for (Triangle& tri : out.triangles)
        for (Vec2& e : tri.edge) e = m.apply(e);
    return out;
}

}  // namespace flatcount
