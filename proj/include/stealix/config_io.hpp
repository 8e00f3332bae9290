#pragma once

#include <json.hpp>
#include <string>

#include "stealix/harness.hpp"

// JSON bindings for configs and reports.  Config parsing is partial: a file
// only overrides the keys it names, everything else keeps its preset value.

namespace stealix {

void to_json(nlohmann::json& j, const WorldConfig& c);
void from_json(const nlohmann::json& j, WorldConfig& c);
void to_json(nlohmann::json& j, const RefineConfig& c);
void from_json(const nlohmann::json& j, RefineConfig& c);
void to_json(nlohmann::json& j, const EvolveConfig& c);
void from_json(const nlohmann::json& j, EvolveConfig& c);
void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);
void to_json(nlohmann::json& j, const RunConfig& c);
void from_json(const nlohmann::json& j, RunConfig& c);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);

// Named defaults: "desk" is the fast profile, "full" raises the refinement
// steps and the per-class budget to the reference scale.
RunConfig preset(const std::string& name);

// Parses a config file on top of a preset.
RunConfig load_run_config(const std::string& path, const std::string& preset_name = "desk");

}  // namespace stealix
