#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>

#include "hazardqa/backend.hpp"
#include "hazardqa/eval.hpp"

namespace hazardqa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitPartial = 2;

/// Prints one diagnostic per problem, each citing its manifest line.
int cmd_validate(const std::filesystem::path& manifest_path, std::ostream& out);

struct RunOverrides {
    std::optional<std::string> strategy;
    std::optional<int> n;
    std::optional<int> k;
    std::optional<std::string> variants;  // comma-separated names, e.g. "raw,rotate30,noise"
    std::optional<double> threshold;
    std::optional<bool> gate;
    std::optional<bool> thread_prior;
    std::optional<int> workers;
    std::optional<int> limit;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> templates;
    std::optional<std::filesystem::path> runs_dir;
    std::optional<std::filesystem::path> cache_dir;
    /// Continue the run in this directory instead of starting a new one.
    std::optional<std::filesystem::path> resume;
};

using TransportFactory = std::function<std::shared_ptr<Transport>(const BackendConfig&)>;

struct RunOutcome {
    int exit_code = kExitOk;
    std::filesystem::path run_dir;
    int executed = 0;  // scenarios attempted by this invocation
    int failed = 0;
};

/// Executes every pending scenario of a new or resumed run and writes
/// results plus both report formats. `factory` defaults to make_transport.
RunOutcome cmd_run(const std::filesystem::path& config_path, const RunOverrides& overrides, std::ostream& out,
                   std::ostream& err, const TransportFactory& factory = {});

/// Recomputes the report from results.jsonl and prints it.
int cmd_report(const std::filesystem::path& run_dir, ReportFormat format, std::ostream& out, std::ostream& err);

/// Command-line entry point.
int main(int argc, char** argv);

}  // namespace hazardqa::cli
