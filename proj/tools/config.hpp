#pragma once

#include <string>

#include <json.hpp>

#include "ltf/sim.hpp"

namespace ltf::tools {

/// Experiment config with the named preset's trend (example1, example2).
/// Throws InvalidSpec for an unknown name.
ExperimentConfig preset_config(const std::string& name, std::size_t n);

/// Reads an experiment config from JSON. Unknown keys are rejected. Errors
/// are InvalidSpec with the JSON path of the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

/// Full echo of `c` (worker count excluded; it does not affect results).
nlohmann::json config_to_json(const ExperimentConfig& c);

}  // namespace ltf::tools
