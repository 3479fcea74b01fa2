#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "hazardqa/stage.hpp"

namespace hazardqa {

/// One manifest line: a frame source plus per-stage ground truth.
struct ScenarioRecord {
    std::string id;
    std::string source;  // resolved against the manifest's directory
    std::map<QAStage, std::string> truth;
};

struct ManifestDiagnostic {
    int line = 0;
    std::string message;
};

/// Parses every line and collects problems instead of stopping at the
/// first: JSON syntax, missing fields, duplicate ids (citing both lines),
/// unknown or malformed truth keys, unreachable sources.
std::vector<ManifestDiagnostic> check_manifest(const std::filesystem::path& path,
                                               std::vector<ScenarioRecord>* records = nullptr);

/// Strict load. Throws ConfigError carrying the first diagnostic.
std::vector<ScenarioRecord> load_manifest(const std::filesystem::path& path);

struct ContextText {
    std::string text;
    int first_index = 0;
    int last_index = 0;

    friend bool operator==(const ContextText&, const ContextText&) = default;
};

struct StageAnswer {
    QAStage stage = QAStage::Risk;
    std::string raw_text;  // empty iff skipped
    std::string variant_label;
    bool skipped = false;

    friend bool operator==(const StageAnswer&, const StageAnswer&) = default;
};

struct ScenarioResult {
    std::string scenario_id;
    std::string strategy_digest;
    std::vector<int> window_indices;  // frames attached to every prediction
    std::optional<ContextText> context;
    std::map<QAStage, std::string> answers;  // final voted answer per non-skipped stage
    std::vector<StageAnswer> per_variant;    // canonical stage order, then variant order
    std::map<std::string, std::string> errors;  // stage key or "context" -> failure message

    bool failed() const { return !errors.empty(); }
    bool skipped(QAStage stage) const;
    const StageAnswer* find(QAStage stage, const std::string& variant_label) const;

    friend bool operator==(const ScenarioResult&, const ScenarioResult&) = default;
};

nlohmann::json to_json(const ScenarioResult& result);
ScenarioResult scenario_result_from_json(const nlohmann::json& doc);

}  // namespace hazardqa
