#pragma once

#include <json.hpp>
#include <stdexcept>
#include <string>

#include "qmoebius/cross_ratio.hpp"
#include "qmoebius/geometry.hpp"
#include "qmoebius/moebius.hpp"
#include "qmoebius/quaternion.hpp"

namespace qmoebius {

using nlohmann::json;

/// Quaternion <-> [t, x, y, z]; ExtQuaternion additionally admits "inf".
inline json to_json(const Quaternion& q) { return json::array({q.t, q.x, q.y, q.z}); }

inline Quaternion quaternion_from_json(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("expected a quaternion as an array of 4 numbers");
    for (const auto& v : j)
        if (!v.is_number()) throw std::invalid_argument("quaternion entries must be numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

inline json to_json(const ExtQuaternion& e) {
    if (e.is_infinity()) return json("inf");
    return to_json(e.value());
}

inline ExtQuaternion ext_from_json(const json& j) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtQuaternion::infinity();
        throw std::invalid_argument("unknown point literal, expected \"inf\"");
    }
    return ExtQuaternion(quaternion_from_json(j));
}

inline json to_json(const MatGL2H& m) {
    return json{{"a", to_json(m.a)}, {"b", to_json(m.b)}, {"c", to_json(m.c)}, {"d", to_json(m.d)}};
}

inline json to_json(const Moebius& T) { return to_json(T.matrix()); }

/// Parses and validates invertibility (throws SingularMatrix otherwise).
inline Moebius moebius_from_json(const json& j) {
    if (!j.is_object()) throw std::invalid_argument("expected a matrix object");
    for (const char* key : {"a", "b", "c", "d"})
        if (!j.contains(key)) throw std::invalid_argument("matrix needs entries a, b, c, d");
    return Moebius(make_matrix(quaternion_from_json(j["a"]), quaternion_from_json(j["b"]),
                               quaternion_from_json(j["c"]), quaternion_from_json(j["d"])));
}

inline json to_json(const CrossRatioInvariant& r) { return json{{"norm", r.norm}, {"re", r.re}}; }

inline json to_json(const AffineSubspace& a) {
    json basis = json::array();
    for (const auto& b : a.basis) basis.push_back(to_json(b));
    return json{{"base", to_json(a.base)}, {"basis", basis}};
}

inline AffineSubspace affine_from_json(const json& j, bool extended) {
    if (!j.is_object() || !j.contains("base") || !j.contains("basis"))
        throw std::invalid_argument("carrier needs base and basis");
    AffineSubspace a;
    a.base = quaternion_from_json(j["base"]);
    a.extended = extended;
    // orthonormalize while parsing to restore the basis invariant
    for (const auto& b : j["basis"]) {
        Quaternion v = quaternion_from_json(b);
        for (const auto& prev : a.basis) v = v - dot(v, prev) * prev;
        const double n = norm(v);
        if (n <= 1e-12) throw std::invalid_argument("carrier basis is degenerate");
        a.basis.push_back(v / n);
    }
    return a;
}

inline json to_json(const Locus& L) {
    switch (L.kind()) {
        case Locus::Kind::point: return json{{"kind", "point"}, {"point", to_json(L.as_point())}};
        case Locus::Kind::sphere: {
            const SphereK& s = L.as_sphere();
            json j{{"kind", "sphere"},
                   {"center", to_json(s.center)},
                   {"radius", s.radius},
                   {"dim", s.dim}};
            if (s.carrier) j["carrier"] = to_json(*s.carrier);
            return j;
        }
        case Locus::Kind::affine: {
            const AffineSubspace& a = L.as_affine();
            return json{{"kind", "affine"},
                        {"dim", a.dim()},
                        {"carrier", to_json(a)},
                        {"extended", a.extended}};
        }
    }
    throw std::logic_error("unreachable");
}

inline Locus locus_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("locus needs a kind field");
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "point") return Locus::point(ext_from_json(j.at("point")));
    if (kind == "sphere") {
        SphereK s;
        s.center = quaternion_from_json(j.at("center"));
        s.radius = j.at("radius").get<double>();
        s.dim = j.at("dim").get<int>();
        if (s.dim < 1 || s.dim > 3) throw std::invalid_argument("sphere dim must be 1, 2 or 3");
        if (!(s.radius > 0)) throw std::invalid_argument("sphere radius must be positive");
        if (j.contains("carrier")) {
            s.carrier = affine_from_json(j["carrier"], false);
            if (s.carrier->dim() != s.dim + 1)
                throw std::invalid_argument("sphere carrier must have dimension dim + 1");
        } else if (s.dim < 3) {
            throw std::invalid_argument("a sphere of dim < 3 needs a carrier");
        }
        return Locus::sphere(s);
    }
    if (kind == "affine") {
        const bool extended = j.value("extended", true);
        AffineSubspace a = affine_from_json(j.at("carrier"), extended);
        if (a.dim() < 1 || a.dim() > 3)
            throw std::invalid_argument("affine dim must be 1, 2 or 3");
        return Locus::affine(a);
    }
    throw std::invalid_argument("unknown locus kind: " + kind);
}

} // namespace qmoebius
