#pragma once

#include <stdexcept>
#include <string>

namespace flatcount {

// Malformed input: bad JSON, missing fields, non-involutive gluing tables.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Geometrically invalid data: edge sums not closing, non-opposite glued
// vectors, non-positive triangle areas.
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& what) : std::runtime_error(what) {}
};

// Operation requested in the wrong coordinate mode (e.g. the integer-lattice
// oracle on a surface that is no longer axis-aligned unit squares).
struct mode_error : std::runtime_error {
    explicit mode_error(const std::string& what) : std::runtime_error(what) {}
};

// A work or iteration budget was exhausted before the computation converged
// (flip loops, separatrix crossing counts, enumeration caps).
struct budget_error : std::runtime_error {
    explicit budget_error(const std::string& what) : std::runtime_error(what) {}
};

// A computation needed data certified complete out to some radius and the
// provided holonomy list's bound was too small.
struct certificate_error : std::runtime_error {
    explicit certificate_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace flatcount
