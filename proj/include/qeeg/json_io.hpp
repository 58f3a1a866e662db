#pragma once

#include <optional>

#include <json.hpp>

#include "qeeg/quaternion_matrix.hpp"

namespace qeeg {

/// [w, x, y, z]
inline nlohmann::json quaternion_to_json(const Quaternion& q) { return nlohmann::json::array({q.w(), q.x(), q.y(), q.z()}); }

inline Quaternion quaternion_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 4) throw ValidationError("quaternion must be a 4-element array");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

/// {"rows": m, "cols": n, "entries": [[w,x,y,z], ...]} row-major.
inline nlohmann::json matrix_to_json(const QuaternionMatrix& m) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& q : m.entries()) entries.push_back(quaternion_to_json(q));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline QuaternionMatrix matrix_from_json(const nlohmann::json& j) {
    std::vector<Quaternion> entries;
    for (const auto& e : j.at("entries")) entries.push_back(quaternion_from_json(e));
    return QuaternionMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), std::move(entries));
}

/// Percentages and other optional metrics serialize as null when undefined.
inline nlohmann::json optional_to_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace qeeg
