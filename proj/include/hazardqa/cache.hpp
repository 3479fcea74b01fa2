#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "hazardqa/backend.hpp"

namespace hazardqa {

struct CachedResponse {
    std::string key;
    std::string backend;
    std::string text;
    double latency_ms = 0.0;
    std::string created_at;  // ISO-8601 UTC
};

/// Permanent on-disk response cache laid out as `<root>/<first-2-hex>/<key>.json`.
/// Writes go through temp-file-and-rename, so concurrent writers of the same
/// key leave one complete entry.
class ResponseStore {
public:
    explicit ResponseStore(std::filesystem::path root);

    std::optional<CachedResponse> get(const CacheKey& key) const;
    void put(const CacheKey& key, const CachedResponse& response);

    std::filesystem::path path_for(const CacheKey& key) const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

}  // namespace hazardqa
