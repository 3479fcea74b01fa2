#include "hazardqa/mock_backend.hpp"

#include <fstream>

#include "json.hpp"

#include "hazardqa/errors.hpp"

namespace hazardqa {

FixtureMap load_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoFailure("cannot open fixture file " + path.string());
    }
    FixtureMap fixtures;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        try {
            const auto doc = nlohmann::json::parse(line);
            FixtureKey key{doc.at("scenario").get<std::string>(), doc.at("stage").get<std::string>(),
                           doc.value("variant", std::string("*"))};
            fixtures[key] = doc.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": bad fixture: " + e.what());
        }
    }
    return fixtures;
}

ModelResponse mock_lookup(const FixtureMap& fixtures, const ModelRequest& request) {
    const auto& meta = request.meta;
    auto it = fixtures.find(FixtureKey{meta.scenario, meta.stage, meta.variant});
    if (it == fixtures.end()) {
        it = fixtures.find(FixtureKey{meta.scenario, meta.stage, "*"});
    }
    if (it == fixtures.end()) {
        throw FixtureMiss("no fixture for (" + meta.scenario + ", " + meta.stage + ", " + meta.variant + ")");
    }
    return ModelResponse{it->second, 0.0, false, 1};
}

MockBackend::MockBackend(FixtureMap fixtures) : fixtures_(std::move(fixtures)) {}

TransportReply MockBackend::send(const ModelRequest& request) {
    invocations_.fetch_add(1);
    {
        std::lock_guard lock(mutex_);
        if (capture_) {
            captured_.push_back(request);
        }
        if (timed_out_) {
            return TransportReply{0, {}, true};
        }
        if (always_fail_) {
            return TransportReply{*always_fail_, {}, false};
        }
        if (!scripted_.empty()) {
            const int status = scripted_.front();
            scripted_.pop_front();
            return TransportReply{status, {}, false};
        }
    }
    return TransportReply{200, mock_lookup(fixtures_, request).text, false};
}

void MockBackend::script_failures(std::vector<int> statuses) {
    std::lock_guard lock(mutex_);
    scripted_.insert(scripted_.end(), statuses.begin(), statuses.end());
}

void MockBackend::set_always_fail(std::optional<int> status) {
    std::lock_guard lock(mutex_);
    always_fail_ = status;
}

void MockBackend::set_timeout(bool timed_out) {
    std::lock_guard lock(mutex_);
    timed_out_ = timed_out;
}

void MockBackend::set_capture(bool enabled) {
    std::lock_guard lock(mutex_);
    capture_ = enabled;
}

std::vector<ModelRequest> MockBackend::captured() const {
    std::lock_guard lock(mutex_);
    return captured_;
}

void MockBackend::clear_captured() {
    std::lock_guard lock(mutex_);
    captured_.clear();
}

}  // namespace hazardqa
