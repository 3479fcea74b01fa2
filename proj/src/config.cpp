#include "hazardqa/config.hpp"

#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"
#include "hazardqa/files.hpp"

namespace hazardqa {

namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base, const std::string& value) {
    fs::path p = value;
    if (p.is_relative()) {
        p = base / p;
    }
    return p.lexically_normal();
}

BackendConfig backend_from_json(const nlohmann::json& doc, const fs::path& base) {
    BackendConfig b;
    const auto kind = doc.value("kind", std::string("mock"));
    if (kind == "http_generic") {
        b.kind = BackendKind::HttpGeneric;
    } else if (kind == "mock") {
        b.kind = BackendKind::Mock;
    } else {
        throw ConfigError("unknown backend kind '" + kind + "'");
    }
    b.name = doc.value("name", b.name);
    b.timeout_s = doc.value("timeout_s", b.timeout_s);
    b.max_retries = doc.value("max_retries", b.max_retries);
    b.rate_limit_rps = doc.value("rate_limit_rps", b.rate_limit_rps);
    if (doc.contains("generation")) {
        const auto& g = doc["generation"];
        b.generation.temperature = g.value("temperature", b.generation.temperature);
        b.generation.max_tokens = g.value("max_tokens", b.generation.max_tokens);
    }
    b.endpoint_url = doc.value("endpoint_url", b.endpoint_url);
    b.auth_env_var = doc.value("auth_env_var", b.auth_env_var);
    if (doc.contains("body_template")) {
        const auto& t = doc["body_template"];
        // Either a JSON string holding the template or the template itself as JSON.
        b.body_template = t.is_string() ? t.get<std::string>() : t.dump();
    }
    b.image_item_template = doc.value("image_item_template", b.image_item_template);
    b.response_pointer = doc.value("response_pointer", b.response_pointer);
    if (doc.contains("fixtures_path")) {
        b.fixtures_path = resolve(base, doc["fixtures_path"].get<std::string>()).string();
    }
    validate(b);
    return b;
}

}  // namespace

nlohmann::json read_config_json(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_file(path));
    } catch (const IoFailure& e) {
        throw ConfigError(e.what());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

RunConfig run_config_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
    RunConfig config;
    try {
        if (!doc.is_object()) {
            throw ConfigError("config must be a JSON object");
        }
        config.seed = doc.value("seed", std::uint64_t{0});
        config.manifest_path = resolve(base_dir, doc.at("manifest_path").get<std::string>());
        config.backend = backend_from_json(doc.at("backend"), base_dir);
        config.strategy = strategy_config_from_json(doc.value("strategy", nlohmann::json::object()), config.seed);
        if (doc.contains("scoring")) {
            config.scoring.f1_threshold = doc["scoring"].value("f1_threshold", config.scoring.f1_threshold);
        }
        config.workers = doc.value("workers", config.workers);
        if (doc.contains("limit") && !doc["limit"].is_null()) {
            config.limit = doc["limit"].get<int>();
        }
        config.cache_dir = resolve(base_dir, doc.value("cache_dir", std::string("cache")));
        config.runs_dir = resolve(base_dir, doc.value("runs_dir", std::string("runs")));
        if (doc.contains("templates_path") && !doc["templates_path"].is_null()) {
            config.templates_path = resolve(base_dir, doc["templates_path"].get<std::string>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad run config: ") + e.what());
    }
    validate(config.strategy);
    validate(config.scoring);
    if (config.workers < 1) {
        throw ConfigError("workers must be >= 1");
    }
    if (config.limit && *config.limit < 0) {
        throw ConfigError("limit must be >= 0");
    }
    std::error_code ec;
    if (!fs::exists(config.manifest_path, ec)) {
        throw ConfigError("manifest not found: " + config.manifest_path.string());
    }
    if (config.backend.kind == BackendKind::Mock && !fs::exists(config.backend.fixtures_path, ec)) {
        throw ConfigError("mock fixtures not found: " + config.backend.fixtures_path);
    }
    return config;
}

nlohmann::json config_snapshot(const RunConfig& config, const std::string& templates_digest) {
    const auto& b = config.backend;
    nlohmann::json backend = {
        {"kind", backend_kind_name(b.kind)},
        {"name", b.name},
        {"generation", {{"temperature", b.generation.temperature}, {"max_tokens", b.generation.max_tokens}}},
    };
    if (b.kind == BackendKind::HttpGeneric) {
        backend["endpoint_url"] = b.endpoint_url;
        backend["body_template"] = b.body_template;
        backend["image_item_template"] = b.image_item_template;
        backend["response_pointer"] = b.response_pointer;
    } else {
        backend["fixtures_digest"] = sha256_hex(read_file(b.fixtures_path));
    }
    return {
        {"manifest_path", config.manifest_path.string()},
        {"manifest_digest", sha256_hex(read_file(config.manifest_path))},
        {"backend", backend},
        {"strategy", to_json(config.strategy)},
        {"scoring", {{"f1_threshold", config.scoring.f1_threshold}}},
        {"seed", config.seed},
        {"templates_digest", templates_digest},
    };
}

}  // namespace hazardqa
