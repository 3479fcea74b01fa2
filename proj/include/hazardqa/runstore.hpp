#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "json.hpp"

#include "hazardqa/eval.hpp"
#include "hazardqa/records.hpp"

namespace hazardqa {

enum class ScenarioStatus { Pending, Done, Failed };

std::string_view status_name(ScenarioStatus status);

struct RunManifest {
    std::string run_id;
    nlohmann::json config_snapshot;
    std::string config_digest;
    std::map<std::string, ScenarioStatus> status;
    std::map<std::string, std::string> failures;  // scenario id -> last error
};

/// "<UTC yyyymmddThhmmssZ>-<6 hex>".
std::string new_run_id();

/// SHA-256 of the snapshot's canonical (sorted-key, compact) serialisation.
std::string config_digest(const nlohmann::json& snapshot);

/// One run directory:
///   config.json    run id, config digest and the full config snapshot
///   status.json    per-scenario pending/done/failed
///   results.jsonl  one ScenarioResult per line
///   report.csv, report.md
///
/// Results are appended before the status flips to done, so a crash in
/// between re-runs that scenario on resume; reloading keeps the last record
/// per scenario. All writes from one process go through a single lock.
class RunStore {
public:
    /// Creates a run or resumes the one already in `run_dir`. Throws
    /// ConfigMismatch when resuming under a different config digest.
    static RunStore open(const std::filesystem::path& run_dir, const nlohmann::json& config_snapshot,
                         const std::vector<std::string>& scenario_ids, const std::string& run_id = {});

    /// Opens an existing run read-only (for reporting). Throws IoFailure if
    /// `run_dir` holds no run.
    static RunStore load(const std::filesystem::path& run_dir);

    RunStore(RunStore&& other) noexcept;
    RunStore& operator=(RunStore&&) = delete;

    const RunManifest& manifest() const { return manifest_; }
    const std::filesystem::path& dir() const { return dir_; }

    /// Ids still to execute (pending or failed), sorted.
    std::vector<std::string> pending() const;

    /// Throws InvalidArgument for an unknown id or one already done.
    void record_result(const ScenarioResult& result);
    void record_failure(const std::string& scenario_id, const std::string& message);

    /// Last stored record per scenario, sorted by id. A torn trailing line
    /// is ignored.
    std::vector<ScenarioResult> load_results() const;

    /// Rewrites results.jsonl with one line per scenario in id order.
    void compact();

    void write_reports(const EvaluationReport& report);

private:
    RunStore(std::filesystem::path dir, RunManifest manifest);
    void write_status();

    std::filesystem::path dir_;
    RunManifest manifest_;
    std::mutex mutex_;
};

}  // namespace hazardqa
