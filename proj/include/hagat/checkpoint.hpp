#pragma once

#include <filesystem>

#include <json.hpp>

#include "hagat/model.hpp"

namespace hagat {

nlohmann::json config_to_json(const ModelConfig& c);
/// Missing keys keep their defaults. Throws ParameterError on bad values.
ModelConfig config_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const ad::Matrix& m);
ad::Matrix matrix_from_json(const nlohmann::json& j);

struct Checkpoint {
    ModelConfig config;  // resolved
    ModelParams params;
    nlohmann::json meta;  // free-form: dataset path, seed, metrics
};

/// One JSON document holding the config, every parameter by name and `meta`.
/// Doubles are written in shortest round-trip form, so reloading is exact.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config, const ModelParams& params,
                     const nlohmann::json& meta = nlohmann::json::object());

/// Throws IoError when the file is missing or unreadable, ParameterError when
/// the arrays do not fit the stored config.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hagat
