#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hazardqa/errors.hpp"
#include "hazardqa/eval.hpp"

using namespace hazardqa;

namespace {

NormalizedAnswer tokens(std::vector<std::string> t) {
    NormalizedAnswer n;
    n.tokens = std::move(t);
    return n;
}

// Multiset intersection by sorted merge.
double f1_oracle(std::vector<std::string> a, std::vector<std::string> b) {
    if (a.empty() || b.empty()) {
        return 0.0;
    }
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    if (common.empty()) {
        return 0.0;
    }
    const double p = static_cast<double>(common.size()) / na;
    const double r = static_cast<double>(common.size()) / nb;
    return 2.0 * p * r / (p + r);
}

ScenarioRecord record(const std::string& id, std::map<QAStage, std::string> truth) {
    return ScenarioRecord{id, "/unused", std::move(truth)};
}

ScenarioResult result(const std::string& id, std::map<QAStage, std::string> answers) {
    ScenarioResult r;
    r.scenario_id = id;
    r.answers = std::move(answers);
    return r;
}

const std::map<QAStage, std::string> kTruth = {
    {QAStage::Risk, "yes"},         {QAStage::Scene, "urban street"},     {QAStage::What, "pedestrian"},
    {QAStage::Which, "red jacket"}, {QAStage::Where, "crossing ahead"}, {QAStage::ProposedAction, "stop"},
};

const std::map<QAStage, std::string> kWrong = {
    {QAStage::Risk, "no"},           {QAStage::Scene, "highway"},    {QAStage::What, "truck"},
    {QAStage::Which, "blue cab"},    {QAStage::Where, "behind us"}, {QAStage::ProposedAction, "accelerate"},
};

int lines_of(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("token_f1 hand cases") {
    CHECK(std::abs(token_f1(tokens({"white", "sedan"}), tokens({"white", "sedan"})) - 1.0) < 1e-9);
    CHECK(std::abs(token_f1(tokens({"cyclist"}), tokens({"pedestrian", "crossing"})) - 0.0) < 1e-9);
    CHECK(std::abs(token_f1(tokens({"sedan", "ahead"}), tokens({"white", "sedan", "ahead"})) - 0.8) < 1e-9);
    CHECK(token_f1(tokens({}), tokens({"a"})) == 0.0);
}

TEST_CASE("token_f1 agrees with a sorted-merge oracle") {
    std::mt19937 rng(11);
    const std::vector<std::string> vocab = {"car", "left", "lane", "slow", "red", "bus"};
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<std::string> a(1 + rng() % 5);
        std::vector<std::string> b(1 + rng() % 5);
        for (auto& t : a) {
            t = vocab[rng() % vocab.size()];
        }
        for (auto& t : b) {
            t = vocab[rng() % vocab.size()];
        }
        const double got = token_f1(tokens(a), tokens(b));
        CHECK(std::abs(got - f1_oracle(a, b)) < 1e-12);
        CHECK(std::abs(got - token_f1(tokens(b), tokens(a))) < 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("score_stage_answer") {
    const ScoringPolicy policy;
    CHECK(score_stage_answer("Yes, a pedestrian is crossing", "yes", QAStage::Risk, policy));
    CHECK_FALSE(score_stage_answer("No hazard.", "yes", QAStage::Risk, policy));
    CHECK(score_stage_answer("No hazard.", "no", QAStage::Risk, policy));
    CHECK_FALSE(score_stage_answer("The weather is cloudy.", "no", QAStage::Risk, policy));
    CHECK_FALSE(score_stage_answer("cyclist on the left", "pedestrian crossing ahead", QAStage::What, policy));
    CHECK(score_stage_answer("a white sedan ahead", "white sedan ahead", QAStage::Which, policy));
    CHECK_FALSE(score_stage_answer("", "truck", QAStage::What, policy));
    CHECK_THROWS_AS(score_stage_answer("truck", "", QAStage::What, policy), InvalidArgument);

    // Threshold extremes.
    const ScoringPolicy lenient{1e-6};
    const ScoringPolicy strict{1.0};
    CHECK(score_stage_answer("big red truck turning", "truck", QAStage::What, lenient));
    CHECK_FALSE(score_stage_answer("big red truck turning", "truck", QAStage::What, strict));
    CHECK(score_stage_answer("sedan, white", "the white sedan", QAStage::What, strict));
    CHECK_FALSE(score_stage_answer("bus", "truck", QAStage::What, lenient));
}

TEST_CASE("overall accuracy truncates the mean to one decimal") {
    CHECK(overall_accuracy({60, 95, 90, 95, 80, 70}) == 81.6);
    CHECK(overall_accuracy({55, 80, 75, 60, 60, 55}) == 64.1);
    CHECK(overall_accuracy({55, 90, 85, 85, 60, 55}) == 71.6);
    CHECK(overall_accuracy({45, 75, 70, 60, 50, 50}) == 58.3);
    CHECK(overall_accuracy({75, 100, 65, 65, 65, 75}) == 74.1);
    CHECK(overall_accuracy({55, 85, 40, 25, 15, 40}) == 43.3);
    CHECK(overall_accuracy({55, 90, 55, 35, 30, 45}) == 51.6);
    // The noise column's printed overall is 25; its mean is 25.83.
    CHECK(overall_accuracy({40, 70, 10, 0, 5, 30}) == 25.8);
    CHECK(overall_accuracy({50}) == 50.0);
    CHECK_THROWS_AS(overall_accuracy({}), InvalidArgument);
}

TEST_CASE("overall accuracy agrees with an integer oracle on whole percentages") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> accs(1 + rng() % 6);
        long long sum = 0;
        for (auto& a : accs) {
            const int v = static_cast<int>(rng() % 101);
            a = v;
            sum += v;
        }
        // floor(10 * sum / n) / 10, computed in integers.
        const long long tenths = (sum * 10) / static_cast<long long>(accs.size());
        CHECK(overall_accuracy(accs) == static_cast<double>(tenths) / 10.0);
    }
}

TEST_CASE("twenty scenarios with twelve correct risk answers give 60 percent") {
    std::vector<ScenarioRecord> manifest;
    std::vector<ScenarioResult> results;
    for (int i = 0; i < 20; ++i) {
        const auto id = "s" + std::to_string(100 + i);
        manifest.push_back(record(id, {{QAStage::Risk, "yes"}}));
        results.push_back(result(id, {{QAStage::Risk, i < 12 ? "Yes, hazard ahead." : "No."}}));
    }
    const auto report = compute_report(results, manifest, ScoringPolicy{});
    REQUIRE(report.per_stage.size() == 1);
    CHECK(report.per_stage[0].stage == QAStage::Risk);
    CHECK(report.per_stage[0].correct == 12);
    CHECK(report.per_stage[0].total == 20);
    CHECK(report.per_stage[0].accuracy_pct == 60.0);
    CHECK(report.overall_pct == 60.0);
    CHECK(report.scenario_count == 20);
}

TEST_CASE("compute_report errors") {
    CHECK_THROWS_AS(compute_report({}, {record("a", kTruth)}, ScoringPolicy{}), EmptyRun);
    CHECK_THROWS_AS(compute_report({result("ghost", kTruth)}, {record("a", kTruth)}, ScoringPolicy{}),
                    UnknownScenario);
    CHECK_THROWS_AS(compute_report({result("a", kTruth)}, {record("a", kTruth)}, ScoringPolicy{0.0}), ConfigError);
}

TEST_CASE("skipped stages") {
    auto gated = [](const std::string& id) {
        auto r = result(id, {{QAStage::Risk, "No hazard."}, {QAStage::Scene, "urban street"}});
        for (QAStage s : {QAStage::What, QAStage::Which, QAStage::Where, QAStage::ProposedAction}) {
            r.per_variant.push_back(StageAnswer{s, "", "raw", true});
        }
        return r;
    };
    auto no_truth = kTruth;
    no_truth[QAStage::Risk] = "no";

    // Truth agrees there is no hazard: the skipped stages leave the totals.
    const auto quiet = compute_report({gated("a")}, {record("a", no_truth)}, ScoringPolicy{});
    REQUIRE(quiet.per_stage.size() == 2);
    CHECK(quiet.per_stage[0].stage == QAStage::Risk);
    CHECK(quiet.per_stage[0].correct == 1);
    CHECK(quiet.per_stage[1].stage == QAStage::Scene);
    CHECK(quiet.per_stage[1].correct == 1);
    CHECK(quiet.overall_pct == 100.0);

    // Truth has a hazard: skipping is a miss.
    const auto missed = compute_report({gated("a")}, {record("a", kTruth)}, ScoringPolicy{});
    REQUIRE(missed.per_stage.size() == 6);
    for (const auto& s : missed.per_stage) {
        if (s.stage == QAStage::Scene) {
            CHECK(s.correct == 1);
        } else {
            CHECK(s.correct == 0);
        }
        CHECK(s.total == 1);
    }
}

TEST_CASE("report rendering") {
    std::vector<ScenarioRecord> manifest;
    std::vector<ScenarioResult> results;
    for (int i = 0; i < 4; ++i) {
        const auto id = "s" + std::to_string(i);
        manifest.push_back(record(id, kTruth));
        results.push_back(result(id, i == 0 ? kWrong : kTruth));
    }
    const auto report = compute_report(results, manifest, ScoringPolicy{}, "run-1", "abc");
    const auto csv = render_report(report, ReportFormat::Csv);
    CHECK(lines_of(csv) == 8);
    CHECK(csv.rfind("stage,correct,total,accuracy_pct\n", 0) == 0);
    CHECK(csv.find("risk,3,4,75.0\n") != std::string::npos);
    CHECK(csv.find("proposed_action,3,4,75.0\n") != std::string::npos);
    CHECK(csv.substr(csv.size() - std::string("overall,,,75.0\n").size()) == "overall,,,75.0\n");
    CHECK(render_report(report, ReportFormat::Csv) == csv);

    const auto md = render_report(report, ReportFormat::Markdown);
    CHECK(md == render_report(report, ReportFormat::Markdown));
    CHECK(md.find("| Proposed Action | 3 | 4 | 75.0% |") != std::string::npos);
    CHECK(md.find("| Overall | | | 75.0% |") != std::string::npos);
    CHECK(md.find("run-1") != std::string::npos);

    EvaluationReport empty;
    CHECK_THROWS_AS(render_report(empty, ReportFormat::Csv), InvalidArgument);
}

TEST_CASE("report is invariant to result order") {
    std::mt19937 rng(5);
    std::vector<ScenarioRecord> manifest;
    std::vector<ScenarioResult> results;
    for (int i = 0; i < 15; ++i) {
        const auto id = "s" + std::to_string(i);
        manifest.push_back(record(id, kTruth));
        std::map<QAStage, std::string> answers;
        for (QAStage s : kAllStages) {
            answers[s] = (rng() % 2) ? kTruth.at(s) : kWrong.at(s);
        }
        results.push_back(result(id, answers));
    }
    const auto reference = render_report(compute_report(results, manifest, ScoringPolicy{}), ReportFormat::Csv);
    for (int i = 0; i < 10; ++i) {
        std::shuffle(results.begin(), results.end(), rng);
        std::shuffle(manifest.begin(), manifest.end(), rng);
        CHECK(render_report(compute_report(results, manifest, ScoringPolicy{}), ReportFormat::Csv) == reference);
    }
}

TEST_CASE("flipping one answer to correct never lowers any accuracy") {
    std::mt19937 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int scenarios = 3 + static_cast<int>(rng() % 10);
        std::vector<ScenarioRecord> manifest;
        std::vector<ScenarioResult> results;
        std::vector<std::pair<int, QAStage>> wrong_cells;
        for (int i = 0; i < scenarios; ++i) {
            const auto id = "s" + std::to_string(i);
            manifest.push_back(record(id, kTruth));
            std::map<QAStage, std::string> answers;
            for (QAStage s : kAllStages) {
                if (rng() % 3 == 0) {
                    answers[s] = kWrong.at(s);
                    wrong_cells.emplace_back(i, s);
                } else {
                    answers[s] = kTruth.at(s);
                }
            }
            results.push_back(result(id, answers));
        }
        if (wrong_cells.empty()) {
            continue;
        }
        const auto before = compute_report(results, manifest, ScoringPolicy{});
        const auto [row, stage] = wrong_cells[rng() % wrong_cells.size()];
        results[row].answers[stage] = kTruth.at(stage);
        const auto after = compute_report(results, manifest, ScoringPolicy{});
        REQUIRE(before.per_stage.size() == after.per_stage.size());
        for (std::size_t i = 0; i < before.per_stage.size(); ++i) {
            CHECK(after.per_stage[i].accuracy_pct >= before.per_stage[i].accuracy_pct);
            if (before.per_stage[i].stage == stage) {
                CHECK(after.per_stage[i].correct == before.per_stage[i].correct + 1);
            }
        }
        CHECK(after.overall_pct >= before.overall_pct);
    }
}
