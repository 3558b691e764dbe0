/*! @file config.hpp
    @brief JSON configuration documents.

    A document may be partial: every key that is present overrides the
    built-in default, and unknown keys are rejected with their full path.
    Top-level keys are `model`, `init`, `sweep` and a free-form `provenance`.
*/
#pragma once

#include "foxpop/engine.hpp"
#include "foxpop/experiments.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace foxpop {

struct ConfigDocument {
    ModelParams model{};
    InitParams init{};
    std::optional<SweepSpec> sweep;
};

//! Throws ConfigError naming the offending path.
ConfigDocument parse_config(const nlohmann::json& doc);
ConfigDocument parse_config_text(std::string_view text);
//! Throws IoError if unreadable, ConfigError if invalid.
ConfigDocument load_config(const std::filesystem::path& path);

nlohmann::json survival_to_json(const SurvivalTable& table);
nlohmann::json to_json(const ConfigDocument& doc);

//! Path of the shipped default configuration.
std::filesystem::path default_config_path();

}  // namespace foxpop
