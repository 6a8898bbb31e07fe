#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "modclass/baselines.hpp"
#include "modclass/bayes.hpp"
#include "modclass/constellation.hpp"
#include "modclass/distributions.hpp"

namespace modclass {

nlohmann::json to_json(const Constellation& c);
Constellation constellation_from_json(const nlohmann::json& j);

nlohmann::json to_json(const TestpointSet& tps);
TestpointSet testpoints_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DiscriminantModel& model);
DiscriminantModel discriminant_model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const VdModel& model);
VdModel vd_model_from_json(const nlohmann::json& j);

// File helpers; errors carry the path. save_json is a no-op when the file
// already holds identical content, keeping rebuilds byte-stable.
void save_json(const nlohmann::json& j, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace modclass
