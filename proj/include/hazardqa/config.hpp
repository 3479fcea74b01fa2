#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "hazardqa/backend.hpp"
#include "hazardqa/eval.hpp"
#include "hazardqa/strategy.hpp"

namespace hazardqa {

struct RunConfig {
    std::filesystem::path manifest_path;
    BackendConfig backend;
    StrategyConfig strategy;
    ScoringPolicy scoring;
    std::uint64_t seed = 0;
    int workers = 1;
    std::optional<int> limit;
    std::filesystem::path cache_dir = "cache";
    std::filesystem::path runs_dir = "runs";
    std::optional<std::filesystem::path> templates_path;
};

/// Builds a RunConfig from its JSON form. Relative paths resolve against
/// `base_dir`. Throws ConfigError.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads the config file as JSON without interpreting it.
nlohmann::json read_config_json(const std::filesystem::path& path);

/// The parts of a config that determine results: dataset and fixture
/// content digests, backend identity and generation settings, strategy,
/// scoring, seed and template digest. Worker count, limit and I/O
/// locations are left out so they can change between resumes.
nlohmann::json config_snapshot(const RunConfig& config, const std::string& templates_digest);

}  // namespace hazardqa
