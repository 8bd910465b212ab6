#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "surface.hpp"

namespace flatcount {

// Square-tiled surface from two permutations: sigma_h(i) is the square to
// the right of square i, sigma_v(i) the square above it. Square i becomes
// triangles 2i (lower-left) and 2i+1 (upper-right), cut along the rising
// diagonal, with exact integer coordinates.
inline TranslationSurface make_origami(const std::vector<int>& sigma_h,
                                       const std::vector<int>& sigma_v,
                                       std::string name) {
    const int n = static_cast<int>(sigma_h.size());
    if (n == 0 || sigma_v.size() != sigma_h.size())
        throw parse_error("origami permutations must be nonempty and equal length");
    auto check_perm = [n](const std::vector<int>& p, const char* which) {
        std::vector<char> seen(n, 0);
        for (int v : p) {
            if (v < 0 || v >= n || seen[v]) throw parse_error(std::string(which) + " is not a permutation");
            seen[v] = 1;
        }
    };
    check_perm(sigma_h, "sigma_h");
    check_perm(sigma_v, "sigma_v");

    TranslationSurface s;
    s.name = std::move(name);
    s.mode = CoordinateMode::integer;
    s.triangles.resize(2 * n);
    s.partner.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        const int A = 2 * i, B = 2 * i + 1;
        s.triangles[A].edge = {Vec2{1, 0}, Vec2{0, 1}, Vec2{-1, -1}};
        s.triangles[B].edge = {Vec2{1, 1}, Vec2{-1, 0}, Vec2{0, -1}};
        auto glue = [&s](int t1, int e1, int t2, int e2) {
            s.partner[t1][e1] = {t2, e2};
            s.partner[t2][e2] = {t1, e1};
        };
        glue(A, 2, B, 0);                     // diagonal
        glue(A, 1, 2 * sigma_h[i] + 1, 2);    // right side of i = left side of sigma_h(i)
        glue(B, 1, 2 * sigma_v[i], 0);        // top side of i = bottom side of sigma_v(i)
    }
    return s;
}

inline TranslationSurface make_torus() {
    return make_origami({0}, {0}, "torus");
}

// Three squares in an L: 0 and 1 side by side, 2 on top of 0. One cone
// point of angle 6*pi (genus 2).
inline TranslationSurface make_l_origami() {
    return make_origami({1, 0, 2}, {2, 1, 0}, "L-origami");
}

// Regular octagon with opposite sides identified, side length 1, fanned into
// six triangles from vertex 0. Opposite vertices are stored as exact
// negations so glued slots carry bit-identical opposite vectors.
inline TranslationSurface make_octagon() {
    const double rho = 1.0 / (2.0 * std::sin(pi / 8.0));  // circumradius
    std::vector<Vec2> v(8);
    for (int j = 0; j < 4; ++j) {
        double a = pi / 8.0 + j * pi / 4.0;
        v[j] = {rho * std::cos(a), rho * std::sin(a)};
        v[j + 4] = -v[j];
    }
    TranslationSurface s;
    s.name = "regular-octagon";
    s.mode = CoordinateMode::floating;
    s.triangles.resize(6);
    s.partner.resize(6);
    for (int j = 0; j < 6; ++j)
        s.triangles[j].edge = {v[j + 1] - v[0], v[j + 2] - v[j + 1], v[0] - v[j + 2]};
    auto glue = [&s](int t1, int e1, int t2, int e2) {
        s.partner[t1][e1] = {t2, e2};
        s.partner[t2][e2] = {t1, e1};
    };
    for (int j = 0; j < 5; ++j) glue(j, 2, j + 1, 0);  // fan diagonals
    glue(0, 0, 3, 1);  // side v0->v1 with side v4->v5
    glue(0, 1, 4, 1);  // side v1->v2 with side v5->v6
    glue(1, 1, 5, 1);  // side v2->v3 with side v6->v7
    glue(2, 1, 5, 2);  // side v3->v4 with side v7->v0
    return s;
}

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

inline bool origami_connected(const std::vector<int>& sh, const std::vector<int>& sv) {
    const int n = static_cast<int>(sh.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i) {
        uf.unite(i, sh[i]);
        uf.unite(i, sv[i]);
    }
    int root = uf.find(0);
    for (int i = 1; i < n; ++i)
        if (uf.find(i) != root) return false;
    return true;
}

// Fisher-Yates with explicit modulo draws: std::shuffle's draw sequence is
// implementation-defined, and the same (n, seed) must give the same surface
// on every platform.
inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    for (int i = n - 1; i > 0; --i) {
        int j = static_cast<int>(rng() % static_cast<std::uint64_t>(i + 1));
        std::swap(p[i], p[j]);
    }
    return p;
}

} // namespace detail

inline TranslationSurface make_random_origami(int n, std::uint64_t seed) {
    if (n <= 0) throw parse_error("random origami needs at least one square");
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<int> sh = detail::random_permutation(n, rng);
        std::vector<int> sv = detail::random_permutation(n, rng);
        if (!detail::origami_connected(sh, sv)) continue;
        char name[64];
        std::snprintf(name, sizeof name, "random-origami(%d,%llu)", n,
                      static_cast<unsigned long long>(seed));
        return make_origami(sh, sv, name);
    }
    throw budget_error("could not draw a connected random origami in 64 attempts");
}

// Uniform rescaling to unit area. Exactly-unit-area surfaces keep their
// coordinate mode (the square torus stays integer); any real scaling leaves
// the integer lattice.
inline TranslationSurface normalize(TranslationSurface s) {
    double area = total_area(s);
    if (!(area > 0.0)) throw geometry_error("cannot normalize non-positive area");
    double f = 1.0 / std::sqrt(area);
    if (f == 1.0) return s;
    for (auto& tri : s.triangles)
        for (auto& e : tri.edge) e = f * e;
    s.mode = CoordinateMode::floating;
    return s;
}

// Named surfaces: "torus", "L-origami", "regular-octagon",
// "random-origami(N, SEED)". With normalize_area the result is rescaled to
// unit area.
inline TranslationSurface catalog(const std::string& name, bool normalize_area = false) {
    auto finish = [normalize_area](TranslationSurface s) {
        return normalize_area ? normalize(std::move(s)) : s;
    };
    if (name == "torus") return finish(make_torus());
    if (name == "L-origami") return finish(make_l_origami());
    if (name == "regular-octagon" || name == "octagon") return finish(make_octagon());
    int n = 0;
    unsigned long long seed = 0;
    char trailing = 0;
    if (std::sscanf(name.c_str(), "random-origami(%d ,%llu %c", &n, &seed, &trailing) == 3 &&
        trailing == ')' && name.back() == ')')
        return finish(make_random_origami(n, seed));
    throw parse_error("unknown catalog surface '" + name + "'");
}

} // namespace flatcount
