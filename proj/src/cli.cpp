#include "hazardqa/cli.hpp"

#include <atomic>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "hazardqa/cache.hpp"
#include "hazardqa/config.hpp"
#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"
#include "hazardqa/files.hpp"
#include "hazardqa/runstore.hpp"
#include "hazardqa/strategy.hpp"

namespace hazardqa::cli {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

void apply_overrides(nlohmann::json& doc, const RunOverrides& o) {
    if (!doc.contains("strategy")) {
        doc["strategy"] = nlohmann::json::object();
    }
    auto& strategy = doc["strategy"];
    if (o.strategy) strategy["kind"] = *o.strategy;
    if (o.n) strategy["n"] = *o.n;
    if (o.k) strategy["k"] = *o.k;
    if (o.gate) strategy["gate_on_risk"] = *o.gate;
    if (o.thread_prior) strategy["thread_prior"] = *o.thread_prior;
    if (o.variants) strategy["variants"] = split_commas(*o.variants);
    if (o.threshold) doc["scoring"]["f1_threshold"] = *o.threshold;
    if (o.workers) doc["workers"] = *o.workers;
    if (o.limit) doc["limit"] = *o.limit;
    if (o.seed) doc["seed"] = *o.seed;
    if (o.templates) doc["templates_path"] = fs::absolute(*o.templates).string();
    if (o.runs_dir) doc["runs_dir"] = fs::absolute(*o.runs_dir).string();
    if (o.cache_dir) doc["cache_dir"] = fs::absolute(*o.cache_dir).string();
}

std::vector<ScenarioRecord> records_for_run(const nlohmann::json& snapshot) {
    const fs::path manifest_path = snapshot.at("manifest_path").get<std::string>();
    const std::string expected = snapshot.at("manifest_digest").get<std::string>();
    if (sha256_hex(read_file(manifest_path)) != expected) {
        throw ConfigMismatch("manifest " + manifest_path.string() + " changed since the run was created");
    }
    return load_manifest(manifest_path);
}

}  // namespace

int cmd_validate(const fs::path& manifest_path, std::ostream& out) {
    std::vector<ScenarioRecord> records;
    const auto diagnostics = check_manifest(manifest_path, &records);
    for (const auto& d : diagnostics) {
        out << manifest_path.string() << ":" << d.line << ": " << d.message << "\n";
    }
    if (!diagnostics.empty()) {
        out << diagnostics.size() << " problem(s) found\n";
        return kExitConfig;
    }
    out << records.size() << " scenarios OK\n";
    return kExitOk;
}

RunOutcome cmd_run(const fs::path& config_path, const RunOverrides& overrides, std::ostream& out, std::ostream& err,
                   const TransportFactory& factory) {
    RunOutcome outcome;
    RunConfig config;
    std::vector<ScenarioRecord> records;
    std::shared_ptr<PromptTemplates> templates;
    std::shared_ptr<Transport> transport;
    try {
        auto doc = read_config_json(config_path);
        apply_overrides(doc, overrides);
        config = run_config_from_json(doc, fs::absolute(config_path).parent_path());
        records = load_manifest(config.manifest_path);
        templates = std::make_shared<PromptTemplates>(config.templates_path
                                                          ? PromptTemplates::load(*config.templates_path)
                                                          : PromptTemplates::builtin());
        transport = factory ? factory(config.backend) : make_transport(config.backend);
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        outcome.exit_code = kExitConfig;
        return outcome;
    }

    std::map<std::string, const ScenarioRecord*> by_id;
    std::vector<std::string> ids;
    for (const auto& r : records) {
        by_id[r.id] = &r;
        ids.push_back(r.id);
    }

    std::optional<RunStore> store;
    try {
        const auto snapshot = config_snapshot(config, templates->digest());
        const fs::path run_dir = overrides.resume ? *overrides.resume : config.runs_dir / new_run_id();
        store.emplace(RunStore::open(run_dir, snapshot, ids));
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        outcome.exit_code = kExitConfig;
        return outcome;
    }
    outcome.run_dir = store->dir();

    auto todo = store->pending();
    if (config.limit && todo.size() > static_cast<std::size_t>(*config.limit)) {
        todo.resize(static_cast<std::size_t>(*config.limit));
    }

    ModelClient client(config.backend, transport, std::make_shared<ResponseStore>(config.cache_dir));
    std::atomic<std::size_t> next{0};
    std::atomic<int> failed{0};
    std::mutex err_mutex;
    const auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < todo.size(); i = next.fetch_add(1)) {
            const auto& record = *by_id.at(todo[i]);
            std::string failure;
            try {
                auto result = run_scenario(record, config.strategy, client, *templates);
                if (result.failed()) {
                    for (const auto& [where, message] : result.errors) {
                        failure += (failure.empty() ? "" : "; ") + where + ": " + message;
                    }
                } else {
                    store->record_result(result);
                }
            } catch (const Error& e) {
                failure = e.kind() + ": " + e.what();
            }
            if (!failure.empty()) {
                store->record_failure(record.id, failure);
                ++failed;
                std::lock_guard lock(err_mutex);
                err << "scenario " << record.id << " failed: " << failure << "\n";
            }
        }
    };
    const int width = std::max(1, std::min<int>(config.workers, static_cast<int>(todo.size())));
    std::vector<std::thread> pool;
    for (int w = 1; w < width; ++w) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }
    outcome.executed = static_cast<int>(todo.size());

    try {
        store->compact();
        const auto results = store->load_results();
        if (!results.empty()) {
            const auto report = compute_report(results, records, config.scoring, store->manifest().run_id,
                                               store->manifest().config_digest);
            store->write_reports(report);
            out << render_report(report, ReportFormat::Markdown);
        }
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        outcome.exit_code = kExitPartial;
    }

    int failed_total = 0;
    for (const auto& [id, status] : store->manifest().status) {
        failed_total += status == ScenarioStatus::Failed ? 1 : 0;
    }
    outcome.failed = failed.load();
    if (failed_total > 0) {
        err << failed_total << " scenario(s) failed\n";
        outcome.exit_code = kExitPartial;
    }
    out << "run directory: " << store->dir().string() << "\n";
    return outcome;
}

int cmd_report(const fs::path& run_dir, ReportFormat format, std::ostream& out, std::ostream& err) {
    try {
        const auto store = RunStore::load(run_dir);
        const auto results = store.load_results();
        if (results.empty()) {
            err << "error: run " << run_dir.string() << " has no results\n";
            return kExitConfig;
        }
        const auto& snapshot = store.manifest().config_snapshot;
        ScoringPolicy policy;
        policy.f1_threshold = snapshot.at("scoring").at("f1_threshold").get<double>();
        const auto records = records_for_run(snapshot);
        const auto report =
            compute_report(results, records, policy, store.manifest().run_id, store.manifest().config_digest);
        out << render_report(report, format);

        const auto incomplete = store.pending();
        if (!incomplete.empty()) {
            err << "warning: IncompleteRun: " << incomplete.size() << " scenario(s) not done; report covers "
                << results.size() << " of " << store.manifest().status.size() << "\n";
            return kExitPartial;
        }
        return kExitOk;
    } catch (const Error& e) {
        err << "error: " << e.kind() << ": " << e.what() << "\n";
        return kExitConfig;
    } catch (const nlohmann::json::exception& e) {
        err << "error: corrupt run config: " << e.what() << "\n";
        return kExitConfig;
    }
}

int main(int argc, char** argv) {
    CLI::App app{"Staged hazard question-answering over dashcam frames, with evaluation reports"};
    app.require_subcommand(1);

    std::string manifest;
    auto* validate_cmd = app.add_subcommand("validate", "Check a scenario manifest");
    validate_cmd->add_option("manifest", manifest, "Line-delimited JSON manifest")->required();

    std::string config_path;
    RunOverrides o;
    std::string gate;
    std::string thread_prior;
    auto* run_cmd = app.add_subcommand("run", "Execute a run and write its reports");
    run_cmd->add_option("config", config_path, "Run config (JSON)")->required();
    run_cmd->add_option("--strategy", o.strategy, "sliding_window | textual_context | full_video");
    run_cmd->add_option("--n", o.n, "Window length");
    run_cmd->add_option("--k", o.k, "Vote groups considered");
    run_cmd->add_option("--variants", o.variants, "Comma-separated augmentation variants, e.g. raw,rotate30,noise");
    run_cmd->add_option("--threshold", o.threshold, "Token-F1 threshold for free-form stages");
    run_cmd->add_option("--gate", gate, "Skip object-level stages when risk is 'no' (on|off)")
        ->check(CLI::IsMember({"on", "off", "true", "false"}));
    run_cmd->add_option("--thread-prior", thread_prior, "Feed earlier answers into later prompts (on|off)")
        ->check(CLI::IsMember({"on", "off", "true", "false"}));
    run_cmd->add_option("--workers", o.workers, "Scenarios executed in parallel");
    run_cmd->add_option("--limit", o.limit, "Execute at most this many pending scenarios");
    run_cmd->add_option("--seed", o.seed, "Seed for noise augmentation");
    run_cmd->add_option("--templates", o.templates, "Prompt template file overriding the built-in one");
    run_cmd->add_option("--runs-dir", o.runs_dir, "Parent directory for new runs");
    run_cmd->add_option("--cache-dir", o.cache_dir, "Response cache directory");
    run_cmd->add_option("--resume", o.resume, "Existing run directory to continue");

    std::string run_dir;
    std::string format = "markdown";
    auto* report_cmd = app.add_subcommand("report", "Recompute and print a run's report");
    report_cmd->add_option("run_dir", run_dir, "Run directory")->required();
    report_cmd->add_option("--format", format, "csv | markdown")->check(CLI::IsMember({"csv", "markdown"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    if (*validate_cmd) {
        return cmd_validate(manifest, std::cout);
    }
    if (*run_cmd) {
        if (!gate.empty()) o.gate = gate == "on" || gate == "true";
        if (!thread_prior.empty()) o.thread_prior = thread_prior == "on" || thread_prior == "true";
        return cmd_run(config_path, o, std::cout, std::cerr).exit_code;
    }
    return cmd_report(run_dir, format == "csv" ? ReportFormat::Csv : ReportFormat::Markdown, std::cout, std::cerr);
}

}  // namespace hazardqa::cli
