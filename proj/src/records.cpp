#include "hazardqa/records.hpp"

#include <fstream>

#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

QAStage stage_from_json(const nlohmann::json& value) {
    const auto key = value.get<std::string>();
    if (auto stage = parse_stage_key(key)) {
        return *stage;
    }
    throw ConfigError("unknown stage '" + key + "'");
}

}  // namespace

std::vector<ManifestDiagnostic> check_manifest(const std::filesystem::path& path,
                                               std::vector<ScenarioRecord>* records) {
    std::vector<ManifestDiagnostic> diagnostics;
    std::ifstream in(path);
    if (!in) {
        diagnostics.push_back({0, "cannot open manifest " + path.string()});
        return diagnostics;
    }
    const auto base = path.parent_path();
    std::map<std::string, int> first_line_of;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            diagnostics.push_back({line_no, std::string("invalid JSON: ") + e.what()});
            continue;
        }
        if (!doc.is_object()) {
            diagnostics.push_back({line_no, "expected a JSON object"});
            continue;
        }
        const auto before = diagnostics.size();
        ScenarioRecord record;

        for (const auto& [key, value] : doc.items()) {
            if (key != "id" && key != "source" && key != "truth") {
                diagnostics.push_back({line_no, "unknown field '" + key + "'"});
            }
        }
        if (!doc.contains("id") || !doc["id"].is_string() || doc["id"].get<std::string>().empty()) {
            diagnostics.push_back({line_no, "missing or empty string field 'id'"});
        } else {
            record.id = doc["id"].get<std::string>();
            auto [it, inserted] = first_line_of.emplace(record.id, line_no);
            if (!inserted) {
                diagnostics.push_back({line_no, "duplicate id '" + record.id + "' (lines " +
                                                    std::to_string(it->second) + " and " +
                                                    std::to_string(line_no) + ")"});
            }
        }
        if (!doc.contains("source") || !doc["source"].is_string() || doc["source"].get<std::string>().empty()) {
            diagnostics.push_back({line_no, "missing or empty string field 'source'"});
        } else {
            std::filesystem::path source = doc["source"].get<std::string>();
            if (source.is_relative()) {
                source = base / source;
            }
            record.source = source.lexically_normal().string();
            std::error_code ec;
            if (!std::filesystem::exists(source, ec)) {
                diagnostics.push_back({line_no, "source not found: " + record.source});
            }
        }
        if (!doc.contains("truth") || !doc["truth"].is_object()) {
            diagnostics.push_back({line_no, "missing object field 'truth'"});
        } else {
            for (const auto& [key, value] : doc["truth"].items()) {
                const auto stage = parse_stage_key(key);
                if (!stage) {
                    diagnostics.push_back({line_no, "unknown truth key '" + key + "'"});
                    continue;
                }
                if (!value.is_string() || value.get<std::string>().empty()) {
                    diagnostics.push_back({line_no, "truth '" + key + "' must be a non-empty string"});
                    continue;
                }
                const auto text = value.get<std::string>();
                if (*stage == QAStage::Risk && text != "yes" && text != "no") {
                    diagnostics.push_back({line_no, "truth 'risk' must be \"yes\" or \"no\""});
                    continue;
                }
                record.truth[*stage] = text;
            }
        }
        if (records != nullptr && diagnostics.size() == before) {
            records->push_back(std::move(record));
        }
    }
    return diagnostics;
}

std::vector<ScenarioRecord> load_manifest(const std::filesystem::path& path) {
    std::vector<ScenarioRecord> records;
    const auto diagnostics = check_manifest(path, &records);
    if (!diagnostics.empty()) {
        const auto& d = diagnostics.front();
        throw ConfigError(path.string() + ":" + std::to_string(d.line) + ": " + d.message);
    }
    return records;
}

bool ScenarioResult::skipped(QAStage stage) const {
    for (const auto& answer : per_variant) {
        if (answer.stage == stage && answer.skipped) {
            return true;
        }
    }
    return false;
}

const StageAnswer* ScenarioResult::find(QAStage stage, const std::string& variant_label) const {
    for (const auto& answer : per_variant) {
        if (answer.stage == stage && answer.variant_label == variant_label) {
            return &answer;
        }
    }
    return nullptr;
}

nlohmann::json to_json(const ScenarioResult& result) {
    nlohmann::json answers = nlohmann::json::object();
    for (const auto& [stage, text] : result.answers) {
        answers[std::string(stage_key(stage))] = text;
    }
    nlohmann::json errors = nlohmann::json::object();
    for (const auto& [where, text] : result.errors) {
        errors[where] = text;
    }
    nlohmann::json per_variant = nlohmann::json::array();
    for (const auto& a : result.per_variant) {
        per_variant.push_back({
            {"stage", stage_key(a.stage)},
            {"variant", a.variant_label},
            {"raw_text", a.raw_text},
            {"skipped", a.skipped},
        });
    }
    nlohmann::json context = nullptr;
    if (result.context) {
        context = {
            {"text", result.context->text},
            {"first_index", result.context->first_index},
            {"last_index", result.context->last_index},
        };
    }
    return {
        {"scenario_id", result.scenario_id},
        {"strategy_digest", result.strategy_digest},
        {"window", result.window_indices},
        {"context", context},
        {"answers", answers},
        {"per_variant", per_variant},
        {"errors", errors},
    };
}

ScenarioResult scenario_result_from_json(const nlohmann::json& doc) {
    ScenarioResult result;
    result.scenario_id = doc.at("scenario_id").get<std::string>();
    result.strategy_digest = doc.at("strategy_digest").get<std::string>();
    result.window_indices = doc.at("window").get<std::vector<int>>();
    if (!doc.at("context").is_null()) {
        const auto& c = doc["context"];
        result.context = ContextText{c.at("text").get<std::string>(), c.at("first_index").get<int>(),
                                     c.at("last_index").get<int>()};
    }
    for (const auto& [key, value] : doc.at("answers").items()) {
        result.answers[stage_from_json(key)] = value.get<std::string>();
    }
    for (const auto& item : doc.at("per_variant")) {
        result.per_variant.push_back(StageAnswer{stage_from_json(item.at("stage")),
                                                 item.at("raw_text").get<std::string>(),
                                                 item.at("variant").get<std::string>(),
                                                 item.at("skipped").get<bool>()});
    }
    if (doc.contains("errors")) {
        for (const auto& [key, value] : doc["errors"].items()) {
            result.errors[key] = value.get<std::string>();
        }
    }
    return result;
}

}  // namespace hazardqa
