#pragma once

// Low-discrepancy point streams for property tests that need deterministic
// quasi-random coverage of pair space.

#include <cstdint>

#include <flatcount/geometry.hpp>

namespace testsupport {

// Radical-inverse (van der Corput) value of index i in the given base.
inline double halton(std::uint64_t i, unsigned base) {
    double f = 1.0, r = 0.0;
    while (i != 0) {
        f /= base;
        r += f * static_cast<double>(i % base);
        i /= base;
    }
    return r;
}

// Pair stream in [-range, range]^4 over bases 2, 3, 5, 7. Indices should
// start at 1 so the all-zero point never appears.
struct HaltonPairs {
    double range;

    explicit HaltonPairs(double r) : range(r) {}

    void get(std::uint64_t i, flatcount::Vec2& z, flatcount::Vec2& w) const {
        auto span = [&](double u) { return range * (2.0 * u - 1.0); };
        z = {span(halton(i, 2)), span(halton(i, 3))};
        w = {span(halton(i, 5)), span(halton(i, 7))};
    }
};

}  // namespace testsupport
