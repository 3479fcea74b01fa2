#include "hazardqa/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

std::string format_pct(double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", value);
    return buf;
}

}  // namespace

void validate(const ScoringPolicy& policy) {
    if (!(policy.f1_threshold > 0.0 && policy.f1_threshold <= 1.0)) {
        throw ConfigError("f1_threshold must lie in (0, 1]");
    }
}

double token_f1(const NormalizedAnswer& answer, const NormalizedAnswer& truth) {
    if (answer.tokens.empty() || truth.tokens.empty()) {
        return 0.0;
    }
    std::unordered_map<std::string, int> remaining;
    for (const auto& t : truth.tokens) {
        ++remaining[t];
    }
    int overlap = 0;
    for (const auto& t : answer.tokens) {
        auto it = remaining.find(t);
        if (it != remaining.end() && it->second > 0) {
            --it->second;
            ++overlap;
        }
    }
    if (overlap == 0) {
        return 0.0;
    }
    const double precision = static_cast<double>(overlap) / static_cast<double>(answer.tokens.size());
    const double recall = static_cast<double>(overlap) / static_cast<double>(truth.tokens.size());
    return 2.0 * precision * recall / (precision + recall);
}

bool score_stage_answer(const std::string& answer, const std::string& truth, QAStage stage,
                        const ScoringPolicy& policy) {
    if (truth.empty()) {
        throw InvalidArgument("ground truth is empty");
    }
    if (answer.empty()) {
        return false;
    }
    if (stage == QAStage::Risk) {
        try {
            return risk_label_name(parse_risk(answer)) == truth;
        } catch (const UnparsableRisk&) {
            return false;
        }
    }
    return token_f1(normalize_answer(answer, stage), normalize_answer(truth, stage)) >= policy.f1_threshold;
}

double overall_accuracy(const std::vector<double>& stage_accuracies) {
    if (stage_accuracies.empty()) {
        throw InvalidArgument("overall accuracy of zero stages");
    }
    double sum = 0.0;
    for (double v : stage_accuracies) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(stage_accuracies.size());
    return std::floor(mean * 10.0 + 1e-9) / 10.0;
}

EvaluationReport compute_report(const std::vector<ScenarioResult>& results,
                                const std::vector<ScenarioRecord>& manifest, const ScoringPolicy& policy,
                                const std::string& run_id, const std::string& config_digest) {
    validate(policy);
    if (results.empty()) {
        throw EmptyRun("no scenario results to score");
    }
    std::map<std::string, const ScenarioRecord*> by_id;
    for (const auto& record : manifest) {
        by_id[record.id] = &record;
    }

    std::vector<const ScenarioResult*> ordered;
    ordered.reserve(results.size());
    for (const auto& r : results) {
        if (by_id.count(r.scenario_id) == 0) {
            throw UnknownScenario("result for scenario '" + r.scenario_id + "' has no manifest entry");
        }
        ordered.push_back(&r);
    }
    std::sort(ordered.begin(), ordered.end(),
              [](const ScenarioResult* a, const ScenarioResult* b) { return a->scenario_id < b->scenario_id; });

    std::map<QAStage, StageScore> scores;
    for (const ScenarioResult* result : ordered) {
        const auto& truth = by_id.at(result->scenario_id)->truth;
        const auto risk_truth = truth.find(QAStage::Risk);
        const bool hazard_in_truth = risk_truth != truth.end() && risk_truth->second == "yes";
        for (const auto& [stage, expected] : truth) {
            auto& score = scores[stage];
            score.stage = stage;
            if (result->skipped(stage)) {
                if (hazard_in_truth) {
                    ++score.total;
                }
                continue;
            }
            auto answer = result->answers.find(stage);
            if (answer == result->answers.end()) {
                continue;  // stage not part of this run
            }
            ++score.total;
            if (score_stage_answer(answer->second, expected, stage, policy)) {
                ++score.correct;
            }
        }
    }

    EvaluationReport report;
    report.run_id = run_id;
    report.config_digest = config_digest;
    report.scenario_count = static_cast<int>(results.size());
    std::vector<double> accuracies;
    for (QAStage stage : kAllStages) {
        auto it = scores.find(stage);
        if (it == scores.end() || it->second.total == 0) {
            continue;
        }
        auto score = it->second;
        score.accuracy_pct = 100.0 * score.correct / score.total;
        accuracies.push_back(score.accuracy_pct);
        report.per_stage.push_back(score);
    }
    if (report.per_stage.empty()) {
        throw EmptyRun("no stage had a scored answer");
    }
    report.overall_pct = overall_accuracy(accuracies);
    return report;
}

std::string render_report(const EvaluationReport& report, ReportFormat format) {
    if (report.per_stage.empty()) {
        throw InvalidArgument("report has no stage rows");
    }
    std::string out;
    if (format == ReportFormat::Csv) {
        out += "stage,correct,total,accuracy_pct\n";
        for (const auto& s : report.per_stage) {
            out += std::string(stage_key(s.stage)) + "," + std::to_string(s.correct) + "," +
                   std::to_string(s.total) + "," + format_pct(s.accuracy_pct) + "\n";
        }
        out += "overall,,," + format_pct(report.overall_pct) + "\n";
        return out;
    }

    out += "# Evaluation report\n\n";
    if (!report.run_id.empty()) {
        out += "- run: `" + report.run_id + "`\n";
    }
    if (!report.config_digest.empty()) {
        out += "- config digest: `" + report.config_digest + "`\n";
    }
    out += "- scenarios: " + std::to_string(report.scenario_count) + "\n\n";
    out += "| Q/A | Correct | Total | Accuracy |\n";
    out += "|---|---:|---:|---:|\n";
    for (const auto& s : report.per_stage) {
        out += "| " + std::string(stage_label(s.stage)) + " | " + std::to_string(s.correct) + " | " +
               std::to_string(s.total) + " | " + format_pct(s.accuracy_pct) + "% |\n";
    }
    out += "| Overall | | | " + format_pct(report.overall_pct) + "% |\n";
    return out;
}

}  // namespace hazardqa
