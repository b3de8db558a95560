#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

#include "rumorsim/engine.hpp"

namespace rumorsim {

/*!
 * Parse a configuration document. Unknown keys are rejected; relative file
 * paths resolve against base_dir. Throws ConfigError with the offending key.
 */
SimulationConfig config_from_json(nlohmann::json const& doc, std::filesystem::path const& base_dir = {});

SimulationConfig load_config(std::filesystem::path const& path);
SimulationConfig parse_config(std::string_view text, std::filesystem::path const& base_dir = {});

/// Every field, in a form config_from_json reads back to an equal config.
nlohmann::ordered_json config_to_json(SimulationConfig const& config);

/*!
 * Hash of the parts of a configuration that shape a trajectory. Steps,
 * interventions, checkpoint cadence and parallelism are left out so a
 * checkpoint can be resumed under a different intervention schedule.
 */
std::uint64_t config_hash(SimulationConfig const& config);

/// "kind@start[:key=value,...]" with keys score, message, leader (id or top_degree).
InterventionSpec parse_intervention_spec(std::string_view spec);

}  // namespace rumorsim
