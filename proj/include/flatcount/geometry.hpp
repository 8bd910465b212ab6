#pragma once

#include <cmath>
#include <compare>

namespace flatcount {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm2(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

// Counterclockwise angle from u to v in (0, 2*pi), intended for corner
// angles where 0 never occurs.
inline double angle_between(Vec2 u, Vec2 v) {
    double a = std::atan2(cross(u, v), dot(u, v));
    if (a <= 0.0) a += 2.0 * 3.141592653589793238462643383279502884;
    return a;
}

// Sign of the incircle test: for a counterclockwise triangle (a, b, c),
// positive means d lies strictly inside the circumcircle.
inline double incircle_det(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
    const double ax = a.x - d.x, ay = a.y - d.y;
    const double bx = b.x - d.x, by = b.y - d.y;
    const double cx = c.x - d.x, cy = c.y - d.y;
    const double a2 = ax * ax + ay * ay;
    const double b2 = bx * bx + by * by;
    const double c2 = cx * cx + cy * cy;
    return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx);
}

inline constexpr double pi = 3.141592653589793238462643383279502884;

} // namespace flatcount
