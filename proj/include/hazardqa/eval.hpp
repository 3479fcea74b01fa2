#pragma once

#include <string>
#include <vector>

#include "hazardqa/records.hpp"
#include "hazardqa/vote.hpp"

namespace hazardqa {

struct ScoringPolicy {
    double f1_threshold = 0.5;  // in (0, 1]
};

void validate(const ScoringPolicy& policy);

struct StageScore {
    QAStage stage = QAStage::Risk;
    int correct = 0;
    int total = 0;
    double accuracy_pct = 0.0;
};

struct EvaluationReport {
    std::string run_id;
    std::string config_digest;
    std::vector<StageScore> per_stage;  // canonical order; stages with no scored answers are omitted
    double overall_pct = 0.0;
    int scenario_count = 0;
};

/// Token-multiset F1. Returns 0 when either side is empty or they share nothing.
double token_f1(const NormalizedAnswer& answer, const NormalizedAnswer& truth);

/// Risk compares parsed labels; other stages require token F1 at or above
/// the policy threshold. An unparsable risk answer scores false.
bool score_stage_answer(const std::string& answer, const std::string& truth, QAStage stage,
                        const ScoringPolicy& policy);

/// Mean of the stage accuracies truncated (not rounded) to one decimal.
double overall_accuracy(const std::vector<double>& stage_accuracies);

/// Tallies every scored stage across results. A skipped stage counts as
/// incorrect when the scenario's truth says there is a hazard and is left
/// out of the totals otherwise. Results are processed in scenario-id order.
/// Throws UnknownScenario, EmptyRun.
EvaluationReport compute_report(const std::vector<ScenarioResult>& results,
                                const std::vector<ScenarioRecord>& manifest, const ScoringPolicy& policy,
                                const std::string& run_id = {}, const std::string& config_digest = {});

enum class ReportFormat { Csv, Markdown };

std::string render_report(const EvaluationReport& report, ReportFormat format);

}  // namespace hazardqa
