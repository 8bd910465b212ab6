#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "errors.hpp"
#include "surface.hpp"

namespace flatcount {

namespace detail {

// Shortest-but-exact decimal for a double; %.17g round-trips IEEE doubles
// and is byte-stable across runs.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string json_escape(const std::string& in) {
    std::string out;
    out.reserve(in.size() + 2);
    for (char ch : in) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += ch;
                }
        }
    }
    return out;
}

} // namespace detail

// Structural parse of the surface JSON; geometric soundness is validate()'s
// job. Gluing is a list of slot pairs [[t1,e1],[t2,e2]], each pair listed
// once (redundant symmetric entries are accepted if consistent).
inline TranslationSurface read_surface(const nlohmann::json& j) {
    if (!j.is_object()) throw parse_error("surface JSON must be an object");
    TranslationSurface s;
    if (j.contains("name")) {
        if (!j["name"].is_string()) throw parse_error("'name' must be a string");
        s.name = j["name"].get<std::string>();
    }
    std::string mode = "float";
    if (j.contains("mode")) {
        if (!j["mode"].is_string()) throw parse_error("'mode' must be a string");
        mode = j["mode"].get<std::string>();
    }
    if (mode == "int") s.mode = CoordinateMode::integer;
    else if (mode == "float") s.mode = CoordinateMode::floating;
    else throw parse_error("'mode' must be \"int\" or \"float\"");

    if (!j.contains("triangles") || !j["triangles"].is_array())
        throw parse_error("'triangles' must be an array");
    for (const auto& jt : j["triangles"]) {
        if (!jt.is_array() || jt.size() != 3)
            throw parse_error("each triangle must be an array of three edge vectors");
        Triangle tri;
        for (int c = 0; c < 3; ++c) {
            const auto& je = jt[c];
            if (!je.is_array() || je.size() != 2 || !je[0].is_number() || !je[1].is_number())
                throw parse_error("each edge must be a [x, y] number pair");
            if (s.mode == CoordinateMode::integer &&
                (!je[0].is_number_integer() || !je[1].is_number_integer()))
                throw parse_error("integer-mode surface has a non-integer coordinate");
            tri.edge[c] = {je[0].get<double>(), je[1].get<double>()};
        }
        s.triangles.push_back(tri);
    }

    const int F = static_cast<int>(s.triangles.size());
    s.partner.assign(F, {EdgeRef{}, EdgeRef{}, EdgeRef{}});
    if (!j.contains("gluing") || !j["gluing"].is_array())
        throw parse_error("'gluing' must be an array");
    for (const auto& jp : j["gluing"]) {
        if (!jp.is_array() || jp.size() != 2)
            throw parse_error("each gluing entry must pair two slots");
        EdgeRef ref[2];
        for (int k = 0; k < 2; ++k) {
            const auto& js = jp[k];
            if (!js.is_array() || js.size() != 2 || !js[0].is_number_integer() ||
                !js[1].is_number_integer())
                throw parse_error("each gluing slot must be an [triangle, slot] integer pair");
            ref[k] = {js[0].get<int>(), js[1].get<int>()};
            if (ref[k].tri < 0 || ref[k].tri >= F || ref[k].slot < 0 || ref[k].slot > 2)
                throw parse_error("gluing slot out of range");
        }
        for (int k = 0; k < 2; ++k) {
            EdgeRef& cell = s.partner[ref[k].tri][ref[k].slot];
            if (cell.tri >= 0 && !(cell == ref[1 - k]))
                throw parse_error("slot glued twice with different partners");
            cell = ref[1 - k];
        }
    }
    for (int t = 0; t < F; ++t)
        for (int c = 0; c < 3; ++c)
            if (s.partner[t][c].tri < 0)
                throw parse_error("slot (" + std::to_string(t) + "," + std::to_string(c) +
                                  ") is not glued");
    return s;
}

inline TranslationSurface read_surface(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("surface JSON: ") + e.what());
    }
    return read_surface(j);
}

// Read and geometrically validate a surface file.
inline TranslationSurface load_surface(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot open surface file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    TranslationSurface s = read_surface(buf.str());
    require_valid(s);
    return s;
}

// Serialization round-trips exactly: integer-mode coordinates are written as
// JSON integers, floating ones with full precision.
inline std::string surface_to_json(const TranslationSurface& s) {
    std::string out = "{\n";
    out += "  \"name\": \"" + detail::json_escape(s.name) + "\",\n";
    out += std::string("  \"mode\": \"") + to_string(s.mode) + "\",\n";
    out += "  \"triangles\": [\n";
    auto coord = [&](double v) {
        if (s.mode == CoordinateMode::integer) return std::to_string(std::llround(v));
        return detail::fmt_double(v);
    };
    for (std::size_t t = 0; t < s.triangles.size(); ++t) {
        out += "    [";
        for (int c = 0; c < 3; ++c) {
            const Vec2& e = s.triangles[t].edge[c];
            out += "[" + coord(e.x) + "," + coord(e.y) + "]";
            if (c < 2) out += ",";
        }
        out += t + 1 < s.triangles.size() ? "],\n" : "]\n";
    }
    out += "  ],\n  \"gluing\": [\n";
    std::vector<std::pair<EdgeRef, EdgeRef>> pairs;
    for (int t = 0; t < static_cast<int>(s.triangles.size()); ++t)
        for (int c = 0; c < 3; ++c) {
            EdgeRef p = s.partner[t][c];
            if (std::pair(t, c) < std::pair(p.tri, p.slot)) pairs.push_back({{t, c}, p});
        }
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        out += "    [[" + std::to_string(pairs[i].first.tri) + "," +
               std::to_string(pairs[i].first.slot) + "],[" + std::to_string(pairs[i].second.tri) +
               "," + std::to_string(pairs[i].second.slot) + "]]";
        out += i + 1 < pairs.size() ? ",\n" : "\n";
    }
    out += "  ]\n}\n";
    return out;
}

inline void save_surface(const TranslationSurface& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parse_error("cannot open '" + path + "' for writing");
    out << surface_to_json(s);
}

} // namespace flatcount
