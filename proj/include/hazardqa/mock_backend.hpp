#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "hazardqa/backend.hpp"

namespace hazardqa {

struct FixtureKey {
    std::string scenario;
    std::string stage;    // stage key or "context"
    std::string variant;  // variant label, or "*" to match any label

    auto operator<=>(const FixtureKey&) const = default;
};

using FixtureMap = std::map<FixtureKey, std::string>;

/// Reads a fixture file: one JSON object per line with keys
/// `scenario`, `stage`, `variant`, `text`.
FixtureMap load_fixtures(const std::filesystem::path& path);

/// Returns the fixture text for the request's metadata verbatim. An exact
/// variant entry wins over a "*" entry. Throws FixtureMiss.
ModelResponse mock_lookup(const FixtureMap& fixtures, const ModelRequest& request);

/// Deterministic in-process backend driven by fixtures. Every send() is
/// counted and captured; scripted statuses are returned before fixtures.
class MockBackend : public Transport {
public:
    explicit MockBackend(FixtureMap fixtures);

    TransportReply send(const ModelRequest& request) override;

    /// Queue statuses returned (in order) by the next sends.
    void script_failures(std::vector<int> statuses);
    /// Every send returns this status until cleared with std::nullopt.
    void set_always_fail(std::optional<int> status);
    /// Every send reports a timeout.
    void set_timeout(bool timed_out);

    /// Request capture is on by default; CLI runs switch it off.
    void set_capture(bool enabled);

    std::size_t invocation_count() const { return invocations_.load(); }
    void reset_invocations() { invocations_.store(0); }
    std::vector<ModelRequest> captured() const;
    void clear_captured();

private:
    FixtureMap fixtures_;
    std::atomic<std::size_t> invocations_{0};
    mutable std::mutex mutex_;
    std::deque<int> scripted_;
    std::optional<int> always_fail_;
    bool timed_out_ = false;
    bool capture_ = true;
    std::vector<ModelRequest> captured_;
};

}  // namespace hazardqa
