#pragma once

#include <filesystem>
#include <iosfwd>

#include "urllc/sim_engine.hpp"

namespace urllc {

/// Parses the flat `key = value` scenario format (`#` starts a comment).
/// Keys not present keep their defaults. A relative bler_table path is
/// resolved against base_dir. Throws ConfigError on unknown keys, duplicate
/// keys or unparsable values.
ScenarioConfig parse_scenario(std::istream& in, const std::filesystem::path& base_dir = {});

/// Throws ConfigError when the file cannot be opened or parsed.
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Writes every key, so the output round-trips through parse_scenario.
void write_scenario(std::ostream& out, const ScenarioConfig& sc);

}  // namespace urllc
