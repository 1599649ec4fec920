#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include <json.hpp>

namespace dflow {

// Parses a JSON config file. Comments (// and /* */) are allowed; parse failures raise ConfigError
// naming the file and byte offset.
nlohmann::json load_config(const std::filesystem::path& path);

// Replaces every "seed" field in the model section(s) of a config, or the campaign base seed.
void apply_seed_override(nlohmann::json& config, std::uint64_t seed);

}  // namespace dflow
