#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "dfrelay/link_sim.hpp"

namespace dfrelay::config {

// Applies a flat JSON object whose keys are SimConfig field names.
// Unknown keys and ill-typed values throw InvalidConfig naming the key.
void apply_json(sim::SimConfig& cfg, const nlohmann::json& obj);

// Reads and applies a JSON config file. Throws InvalidConfig on parse errors
// and std::ios_base::failure if the file cannot be read.
void apply_file(sim::SimConfig& cfg, const std::string& path);

// "key=value"; the value is parsed as JSON when possible, otherwise taken as a string.
void apply_override(sim::SimConfig& cfg, const std::string& assignment);

nlohmann::json to_json(const sim::SimConfig& cfg);

// Figure presets. Each returns the list of configurations whose records make
// up the figure, derived from `base` (which carries trials, seed, grid, ...).
enum class Preset { Fig2, Fig3, Fig4 };

Preset parse_preset(const std::string& name);

// Defaults a preset applies before the user's config file and overrides.
void apply_preset_defaults(sim::SimConfig& cfg, Preset preset);

std::vector<sim::SimConfig> expand_preset(const sim::SimConfig& base, Preset preset);

} // namespace dfrelay::config
