#include "hazardqa/cache.hpp"

#include <chrono>
#include <ctime>

#include "json.hpp"

#include "hazardqa/errors.hpp"
#include "hazardqa/files.hpp"

namespace hazardqa {

ResponseStore::ResponseStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path ResponseStore::path_for(const CacheKey& key) const {
    if (key.digest.size() < 2) {
        throw InvalidArgument("cache key too short");
    }
    return root_ / key.digest.substr(0, 2) / (key.digest + ".json");
}

std::optional<CachedResponse> ResponseStore::get(const CacheKey& key) const {
    const auto path = path_for(key);
    std::error_code ec;
    if (!std::filesystem::exists(path, ec)) {
        return std::nullopt;
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
        CachedResponse out;
        out.key = doc.at("key").get<std::string>();
        out.backend = doc.at("backend").get<std::string>();
        out.text = doc.at("text").get<std::string>();
        out.latency_ms = doc.at("latency_ms").get<double>();
        out.created_at = doc.value("created_at", "");
        if (out.key != key.digest) {
            throw CacheCorrupt("cache entry " + path.string() + " holds key " + out.key);
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw CacheCorrupt("unreadable cache entry " + path.string() + ": " + e.what());
    }
}

void ResponseStore::put(const CacheKey& key, const CachedResponse& response) {
    nlohmann::json doc = {
        {"key", key.digest},
        {"backend", response.backend},
        {"text", response.text},
        {"latency_ms", response.latency_ms},
        {"created_at", response.created_at},
    };
    atomic_write_file(path_for(key), doc.dump(2) + "\n");
}

}  // namespace hazardqa
