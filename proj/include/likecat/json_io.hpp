#pragma once

#include <json.hpp>

#include "likecat/models/model.hpp"

namespace likecat {

/// {"name": "<kind>", ...hyperparameters}. Unknown keys are rejected with InvalidConfig.
nlohmann::json algorithm_config_to_json(const AlgorithmConfig& config);
AlgorithmConfig algorithm_config_from_json(const nlohmann::json& doc);

nlohmann::json model_to_json(const TrainedModel& model);
/// Throws UnsupportedVersion or CorruptDocument.
TrainedModel model_from_json(const nlohmann::json& doc);

}  // namespace likecat
