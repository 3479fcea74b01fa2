#include "hazardqa/runstore.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <random>
#include <set>

#include <fcntl.h>
#include <unistd.h>

#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"
#include "hazardqa/files.hpp"

namespace hazardqa {

namespace fs = std::filesystem;

namespace {

constexpr const char* kConfigFile = "config.json";
constexpr const char* kStatusFile = "status.json";
constexpr const char* kResultsFile = "results.jsonl";

ScenarioStatus parse_status(const std::string& name) {
    if (name == "done") {
        return ScenarioStatus::Done;
    }
    if (name == "failed") {
        return ScenarioStatus::Failed;
    }
    return ScenarioStatus::Pending;
}

// Drops a torn final line left by an interrupted append.
void trim_partial_tail(const fs::path& path) {
    std::error_code ec;
    if (!fs::exists(path, ec)) {
        return;
    }
    const std::string contents = read_file(path);
    if (contents.empty() || contents.back() == '\n') {
        return;
    }
    const auto last_newline = contents.rfind('\n');
    fs::resize_file(path, last_newline == std::string::npos ? 0 : last_newline + 1, ec);
    if (ec) {
        throw IoFailure("cannot trim " + path.string() + ": " + ec.message());
    }
}

void append_line(const fs::path& path, const std::string& line) {
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND, 0644);
    if (fd < 0) {
        throw IoFailure("cannot open " + path.string() + " for append");
    }
    std::string data = line + "\n";
    std::size_t done = 0;
    while (done < data.size()) {
        const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
        if (n < 0) {
            ::close(fd);
            throw IoFailure("append to " + path.string() + " failed");
        }
        done += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
}

}  // namespace

std::string_view status_name(ScenarioStatus status) {
    switch (status) {
        case ScenarioStatus::Pending: return "pending";
        case ScenarioStatus::Done: return "done";
        case ScenarioStatus::Failed: return "failed";
    }
    return "pending";
}

std::string new_run_id() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y%m%dT%H%M%SZ", &tm);
    std::random_device rd;
    char suffix[8];
    std::snprintf(suffix, sizeof(suffix), "%06x", static_cast<unsigned>(rd() & 0xffffffU));
    return std::string(stamp) + "-" + suffix;
}

std::string config_digest(const nlohmann::json& snapshot) {
    return sha256_hex(snapshot.dump());
}

RunStore::RunStore(fs::path dir, RunManifest manifest) : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

RunStore::RunStore(RunStore&& other) noexcept : dir_(std::move(other.dir_)), manifest_(std::move(other.manifest_)) {}

RunStore RunStore::open(const fs::path& run_dir, const nlohmann::json& config_snapshot,
                        const std::vector<std::string>& scenario_ids, const std::string& run_id) {
    const std::string digest = config_digest(config_snapshot);
    std::error_code ec;
    if (fs::exists(run_dir / kConfigFile, ec)) {
        RunStore existing = load(run_dir);
        if (existing.manifest_.config_digest != digest) {
            throw ConfigMismatch("run " + run_dir.string() + " was created with config " +
                                 existing.manifest_.config_digest + "; this config is " + digest);
        }
        const std::set<std::string> wanted(scenario_ids.begin(), scenario_ids.end());
        for (const auto& id : wanted) {
            existing.manifest_.status.emplace(id, ScenarioStatus::Pending);
        }
        trim_partial_tail(run_dir / kResultsFile);
        existing.write_status();
        return existing;
    }

    fs::create_directories(run_dir, ec);
    if (ec) {
        throw IoFailure("cannot create run directory " + run_dir.string() + ": " + ec.message());
    }
    RunManifest manifest;
    manifest.run_id = run_id.empty() ? run_dir.filename().string() : run_id;
    manifest.config_snapshot = config_snapshot;
    manifest.config_digest = digest;
    for (const auto& id : scenario_ids) {
        manifest.status[id] = ScenarioStatus::Pending;
    }
    const nlohmann::json config_doc = {
        {"run_id", manifest.run_id},
        {"config_digest", manifest.config_digest},
        {"config", manifest.config_snapshot},
    };
    RunStore store(run_dir, std::move(manifest));
    store.write_status();
    atomic_write_file(run_dir / kConfigFile, config_doc.dump(2) + "\n");
    return store;
}

RunStore RunStore::load(const fs::path& run_dir) {
    std::error_code ec;
    if (!fs::exists(run_dir / kConfigFile, ec)) {
        throw IoFailure("no run found in " + run_dir.string());
    }
    RunManifest manifest;
    try {
        const auto config_doc = nlohmann::json::parse(read_file(run_dir / kConfigFile));
        manifest.run_id = config_doc.at("run_id").get<std::string>();
        manifest.config_digest = config_doc.at("config_digest").get<std::string>();
        manifest.config_snapshot = config_doc.at("config");
        if (config_digest(manifest.config_snapshot) != manifest.config_digest) {
            throw IoFailure("config digest in " + (run_dir / kConfigFile).string() + " does not match its snapshot");
        }
        if (fs::exists(run_dir / kStatusFile, ec)) {
            const auto status_doc = nlohmann::json::parse(read_file(run_dir / kStatusFile));
            for (const auto& [id, entry] : status_doc.items()) {
                manifest.status[id] = parse_status(entry.at("status").get<std::string>());
                if (entry.contains("error")) {
                    manifest.failures[id] = entry["error"].get<std::string>();
                }
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoFailure("corrupt run metadata in " + run_dir.string() + ": " + e.what());
    }
    return RunStore(run_dir, std::move(manifest));
}

std::vector<std::string> RunStore::pending() const {
    std::vector<std::string> out;
    for (const auto& [id, status] : manifest_.status) {
        if (status != ScenarioStatus::Done) {
            out.push_back(id);
        }
    }
    return out;
}

void RunStore::write_status() {
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& [id, status] : manifest_.status) {
        nlohmann::json entry = {{"status", status_name(status)}};
        if (auto it = manifest_.failures.find(id); it != manifest_.failures.end() && status == ScenarioStatus::Failed) {
            entry["error"] = it->second;
        }
        doc[id] = entry;
    }
    atomic_write_file(dir_ / kStatusFile, doc.dump(2) + "\n");
}

void RunStore::record_result(const ScenarioResult& result) {
    std::lock_guard lock(mutex_);
    auto it = manifest_.status.find(result.scenario_id);
    if (it == manifest_.status.end()) {
        throw InvalidArgument("scenario '" + result.scenario_id + "' is not part of this run");
    }
    if (it->second == ScenarioStatus::Done) {
        throw InvalidArgument("scenario '" + result.scenario_id + "' is already recorded");
    }
    append_line(dir_ / kResultsFile, to_json(result).dump());
    it->second = ScenarioStatus::Done;
    manifest_.failures.erase(result.scenario_id);
    write_status();
}

void RunStore::record_failure(const std::string& scenario_id, const std::string& message) {
    std::lock_guard lock(mutex_);
    auto it = manifest_.status.find(scenario_id);
    if (it == manifest_.status.end()) {
        throw InvalidArgument("scenario '" + scenario_id + "' is not part of this run");
    }
    it->second = ScenarioStatus::Failed;
    manifest_.failures[scenario_id] = message;
    write_status();
}

std::vector<ScenarioResult> RunStore::load_results() const {
    std::map<std::string, ScenarioResult> latest;
    std::ifstream in(dir_ / kResultsFile);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        try {
            auto result = scenario_result_from_json(nlohmann::json::parse(line));
            latest[result.scenario_id] = std::move(result);
        } catch (const std::exception&) {
            if (in.peek() == std::char_traits<char>::eof()) {
                break;  // torn final record
            }
            throw IoFailure("corrupt record in " + (dir_ / kResultsFile).string());
        }
    }
    std::vector<ScenarioResult> out;
    out.reserve(latest.size());
    for (auto& [id, result] : latest) {
        out.push_back(std::move(result));
    }
    return out;
}

void RunStore::compact() {
    const auto results = load_results();
    std::lock_guard lock(mutex_);
    std::string contents;
    for (const auto& result : results) {
        contents += to_json(result).dump();
        contents += '\n';
    }
    atomic_write_file(dir_ / kResultsFile, contents);
}

void RunStore::write_reports(const EvaluationReport& report) {
    std::lock_guard lock(mutex_);
    atomic_write_file(dir_ / "report.csv", render_report(report, ReportFormat::Csv));
    atomic_write_file(dir_ / "report.md", render_report(report, ReportFormat::Markdown));
}

}  // namespace hazardqa
