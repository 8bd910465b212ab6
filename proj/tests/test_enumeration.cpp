#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include <flatcount/catalog.hpp>
#include <flatcount/delaunay.hpp>
#include <flatcount/enumerate.hpp>
#include <flatcount/errors.hpp>
#include <flatcount/counting.hpp>
#include <flatcount/origami.hpp>
#include <flatcount/sl2.hpp>

#include "support/oracles.hpp"

using namespace flatcount;

namespace {

std::vector<Vec2> holonomy_list(const HolonomyMultiset& set) {
    std::vector<Vec2> out;
    for (const auto& e : set.entries) out.push_back(e.holonomy);
    return out;
}

bool same_connection(const SaddleConnection& a, const SaddleConnection& b) {
    return a.holonomy == b.holonomy && a.length == b.length &&
           a.start_singularity == b.start_singularity &&
           a.end_singularity == b.end_singularity && a.start_sheet == b.start_sheet;
}

std::map<std::pair<double, double>, int> vector_counts(const std::vector<Vec2>& v) {
    std::map<std::pair<double, double>, int> m;
    for (const Vec2& x : v) ++m[{x.x, x.y}];
    return m;
}

}  // namespace

TEST_CASE("torus enumeration matches the frozen small cases", "[enumerate]") {
    const HolonomyMultiset tiny = enumerate(make_torus(), 0.5);
    REQUIRE(tiny.entries.empty());
    REQUIRE(tiny.bound_L == 0.5);
    REQUIRE(tiny.source == "torus");

    const HolonomyMultiset set = enumerate(make_torus(), 2.0);
    REQUIRE(set.entries.size() == 8);
    const auto counts = vector_counts(holonomy_list(set));
    for (auto [x, y] : {std::pair{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0},
                        {1.0, 1.0}, {1.0, -1.0}, {-1.0, 1.0}, {-1.0, -1.0}}) {
        INFO("missing (" << x << "," << y << ")");
        REQUIRE(counts.count({x, y}) == 1);
    }
    for (const auto& e : set.entries) {
        REQUIRE(e.start_singularity == 0);
        REQUIRE(e.end_singularity == 0);
        REQUIRE(e.start_sheet == 0);
        REQUIRE(e.length == norm(e.holonomy));
    }
    REQUIRE(std::is_sorted(set.entries.begin(), set.entries.end(), canonical_less));

    const HolonomyMultiset mid = enumerate(make_torus(), 2.5);
    REQUIRE(count_N(mid, 1.0) == 4);
    REQUIRE(count_N(mid, 2.0) == 8);
    REQUIRE(count_N(mid, 2.5) == 16);
}

TEST_CASE("L-origami at unit length has twelve connections", "[enumerate]") {
    const HolonomyMultiset set = enumerate(make_l_origami(), 1.0);
    REQUIRE(set.entries.size() == 12);
    const auto counts = vector_counts(holonomy_list(set));
    REQUIRE(counts.at({1.0, 0.0}) == 3);
    REQUIRE(counts.at({-1.0, 0.0}) == 3);
    REQUIRE(counts.at({0.0, 1.0}) == 3);
    REQUIRE(counts.at({0.0, -1.0}) == 3);
}

TEST_CASE("torus enumeration equals the primitive-vector model", "[enumerate]") {
    const double L = 50.0;
    const HolonomyMultiset set = enumerate(make_torus(), L);
    auto expect = oracle::primitive_vectors(L);
    std::sort(expect.begin(), expect.end(), [](Vec2 a, Vec2 b) {
        const double na = norm2(a), nb = norm2(b);
        if (na != nb) return na < nb;
        return std::atan2(a.y, a.x) < std::atan2(b.y, b.x);
    });
    const auto got = holonomy_list(set);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == expect[i]);
}

TEST_CASE("direct enumeration agrees with the square-tiled oracle", "[enumerate]") {
    SECTION("torus") {
        const HolonomyMultiset a = enumerate(make_torus(), 30.0);
        const HolonomyMultiset b = enumerate_origami(make_torus(), 30.0);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            INFO("entry " << i);
            REQUIRE(same_connection(a.entries[i], b.entries[i]));
        }
    }
    SECTION("L-origami") {
        const HolonomyMultiset a = enumerate(make_l_origami(), 20.0);
        const HolonomyMultiset b = enumerate_origami(make_l_origami(), 20.0);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            INFO("entry " << i);
            REQUIRE(same_connection(a.entries[i], b.entries[i]));
        }
    }
    SECTION("random origami") {
        const TranslationSurface s = catalog("random-origami(4,11)");
        const HolonomyMultiset a = enumerate(s, 8.0);
        const HolonomyMultiset b = enumerate_origami(s, 8.0);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i)
            REQUIRE(same_connection(a.entries[i], b.entries[i]));
    }
    SECTION("rejects non-integer surfaces") {
        REQUIRE_THROWS_AS(enumerate_origami(make_octagon(), 5.0), mode_error);
        REQUIRE_THROWS_AS(enumerate_origami(normalize(make_l_origami()), 5.0), mode_error);
    }
}

TEST_CASE("enumeration grows monotonically and symmetrically", "[enumerate]") {
    const HolonomyMultiset small = enumerate(make_l_origami(), 5.0);
    const HolonomyMultiset large = enumerate(make_l_origami(), 7.0);
    REQUIRE(small.entries.size() < large.entries.size());

    // Multiset inclusion via merge over the canonical order.
    std::size_t j = 0;
    for (const auto& e : small.entries) {
        while (j < large.entries.size() && !same_connection(large.entries[j], e)) ++j;
        INFO("missing " << e.holonomy.x << "," << e.holonomy.y);
        REQUIRE(j < large.entries.size());
        ++j;
    }

    // Central symmetry: v and -v appear with equal multiplicity.
    const auto counts = vector_counts(holonomy_list(large));
    for (const auto& [key, n] : counts) {
        const auto it = counts.find({-key.first, -key.second});
        REQUIRE(it != counts.end());
        REQUIRE(it->second == n);
    }
}

TEST_CASE("enumeration does not depend on the triangulation", "[enumerate]") {
    TranslationSurface flipped = make_l_origami();
    flip(flipped, 0, 0);
    REQUIRE(validate(flipped).ok());
    const auto a = holonomy_list(enumerate(flipped, 10.0));
    const auto b = holonomy_list(enumerate(make_l_origami(), 10.0));
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}

TEST_CASE("counting function quadruples when the radius doubles", "[enumerate]") {
    for (const char* name : {"torus", "L-origami"}) {
        const HolonomyMultiset set = enumerate(catalog(name), 40.0);
        const double n10 = static_cast<double>(count_N(set, 10.0));
        const double n20 = static_cast<double>(count_N(set, 20.0));
        const double n40 = static_cast<double>(count_N(set, 40.0));
        INFO(name << ": " << n10 << " " << n20 << " " << n40);
        REQUIRE(n20 / n10 >= 3.2);
        REQUIRE(n20 / n10 <= 4.8);
        REQUIRE(n40 / n20 >= 3.2);
        REQUIRE(n40 / n20 <= 4.8);
    }
}

TEST_CASE("trace_separatrix follows straight lines to singularities", "[enumerate]") {
    const TranslationSurface torus = make_torus();

    const auto horizontal = trace_separatrix(torus, 0, 0, {1.0, 0.0}, 1.5);
    REQUIRE(horizontal.has_value());
    REQUIRE(horizontal->holonomy == Vec2{1.0, 0.0});
    REQUIRE(horizontal->length == 1.0);

    const auto skew = trace_separatrix(torus, 0, 0, {2.0, 1.0}, 3.0);
    REQUIRE(skew.has_value());
    REQUIRE(skew->holonomy == Vec2{2.0, 1.0});

    // The golden ratio direction is irrational: no singularity within reach.
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    REQUIRE_FALSE(trace_separatrix(torus, 0, 0, {1.0, phi}, 100.0).has_value());

    SECTION("three horizontal sheets of the L-origami") {
        const TranslationSurface l = make_l_origami();
        for (int sheet : {0, 1, 2}) {
            const auto hit = trace_separatrix(l, 0, sheet, {1.0, 0.0}, 1.5);
            INFO("sheet " << sheet);
            REQUIRE(hit.has_value());
            REQUIRE(hit->holonomy == Vec2{1.0, 0.0});
            REQUIRE(hit->length == 1.0);
            REQUIRE(hit->start_sheet == sheet);
        }
    }

    SECTION("argument validation") {
        REQUIRE_THROWS_AS(trace_separatrix(torus, 0, 1, {1.0, 0.0}, 5.0), parse_error);
        REQUIRE_THROWS_AS(trace_separatrix(torus, 3, 0, {1.0, 0.0}, 5.0), parse_error);
        REQUIRE_THROWS_AS(trace_separatrix(torus, 0, 0, {0.0, 0.0}, 5.0), parse_error);
        REQUIRE_THROWS_AS(trace_separatrix(torus, 0, 0, {1.0, 0.0}, -1.0), parse_error);
    }

    SECTION("every enumerated connection is retraced") {
        const TranslationSurface l = make_l_origami();
        const HolonomyMultiset set = enumerate(l, 3.0);
        for (const auto& e : set.entries) {
            const auto hit = trace_separatrix(l, e.start_singularity, e.start_sheet,
                                              e.holonomy, e.length * (1.0 + 1e-9));
            INFO("connection (" << e.holonomy.x << "," << e.holonomy.y << ") sheet "
                                << e.start_sheet);
            REQUIRE(hit.has_value());
            REQUIRE(std::fabs(hit->holonomy.x - e.holonomy.x) < 1e-9);
            REQUIRE(std::fabs(hit->holonomy.y - e.holonomy.y) < 1e-9);
            REQUIRE(hit->end_singularity == e.end_singularity);
        }
    }
}

TEST_CASE("collapse_to_set merges parallel copies", "[enumerate]") {
    const HolonomyMultiset set = enumerate(make_l_origami(), 1.0);
    const HolonomyMultiset collapsed = collapse_to_set(set);
    REQUIRE(collapsed.collapsed);
    REQUIRE(collapsed.entries.size() == 4);  // (1,0),(-1,0),(0,1),(0,-1) once each

    const HolonomyMultiset torus = collapse_to_set(enumerate(make_torus(), 2.0));
    REQUIRE(torus.entries.size() == 8);  // already a set
}

TEST_CASE("enumeration budgets trip cleanly", "[enumerate]") {
    REQUIRE_THROWS_AS(enumerate(make_torus(), 2.0e4), budget_error);
    EnumerateOptions opt;
    opt.max_connections = 10;
    REQUIRE_THROWS_AS(enumerate(make_torus(), 30.0, opt), budget_error);
    REQUIRE_THROWS_AS(enumerate(make_torus(), 0.0), parse_error);
    REQUIRE_THROWS_AS(enumerate(make_torus(), -3.0), parse_error);
}

TEST_CASE("enumeration is identical across thread counts", "[enumerate]") {
    EnumerateOptions one;
    one.threads = 1;
    EnumerateOptions four;
    four.threads = 4;
    const HolonomyMultiset a = enumerate(make_l_origami(), 20.0, one);
    const HolonomyMultiset b = enumerate(make_l_origami(), 20.0, four);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i)
        REQUIRE(same_connection(a.entries[i], b.entries[i]));
}

TEST_CASE("systole shrinks under the geodesic flow", "[enumerate]") {
    const double s = systole(act_on_surface(make_gt(0.5), make_torus()));
    REQUIRE(std::fabs(s - std::exp(-0.5)) < 1e-9);
}
