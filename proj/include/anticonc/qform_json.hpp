#pragma once

#include <filesystem>

#include "anticonc/polyform.hpp"
#include "json.hpp"

namespace anticonc {

// Schema: {"n": int, "q11": number, "q12": [number], "q22": [[number]]},
// q22 row-major. Asymmetry up to 1e-12 (relative to entry size) is
// tolerated and averaged away.
inline constexpr double kJsonAsymmetryTol = 1e-12;

nlohmann::json qform_to_json(const QForm& q);
QForm qform_from_json(const nlohmann::json& j);

QForm load_qform(const std::filesystem::path& path);
void save_qform(const QForm& q, const std::filesystem::path& path);

}  // namespace anticonc
