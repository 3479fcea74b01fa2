#include "doctest.h"

#include "hazardqa/errors.hpp"
#include "hazardqa/ingest.hpp"
#include "hazardqa/strategy.hpp"
#include "test_support.hpp"

using namespace hazardqa;
using hazardqa::testing::mock_config;
using hazardqa::testing::TempDir;

namespace {

const std::map<QAStage, std::string> kAnswers = {
    {QAStage::Risk, "Yes, a pedestrian is crossing."},
    {QAStage::Scene, "urban intersection"},
    {QAStage::What, "pedestrian"},
    {QAStage::Which, "adult in a red jacket"},
    {QAStage::Where, "crossing ahead from the left"},
    {QAStage::ProposedAction, "brake and yield"},
};

FixtureMap fixtures_for(const std::string& scenario, const std::map<QAStage, std::string>& answers,
                        const std::string& context = "A pedestrian steps off the left curb.") {
    FixtureMap fixtures;
    for (const auto& [stage, text] : answers) {
        fixtures[FixtureKey{scenario, std::string(stage_key(stage)), "*"}] = text;
    }
    fixtures[FixtureKey{scenario, "context", "*"}] = context;
    return fixtures;
}

struct Harness {
    TempDir tmp;
    std::shared_ptr<MockBackend> mock;
    std::unique_ptr<ModelClient> client;
    ScenarioRecord record;

    Harness(int frames, FixtureMap fixtures, int salt = 0) {
        hazardqa::testing::write_frame_dir(tmp / "s1", frames, salt);
        mock = std::make_shared<MockBackend>(std::move(fixtures));
        client = std::make_unique<ModelClient>(mock_config(), mock, nullptr);
        record = ScenarioRecord{"s1", (tmp / "s1").string(), {}};
    }
};

Image decoded(const std::string& png) {
    return decode_image(std::span(reinterpret_cast<const unsigned char*>(png.data()), png.size()));
}

std::vector<AugmentationSpec> three_variants() {
    return {{Identity{}, "raw"}, {Rotate{30.0}, "rotate30"}, {Noise{25.0, 9}, "noise"}};
}

}  // namespace

TEST_CASE("sliding window attaches exactly the last n frames to every request") {
    Harness h(5, fixtures_for("s1", kAnswers));
    StrategyConfig config;
    config.n = 2;
    const auto result = run_scenario(h.record, config, *h.client);
    CHECK_FALSE(result.failed());
    CHECK(result.window_indices == std::vector<int>{3, 4});
    CHECK_FALSE(result.context.has_value());

    const auto frames = sample_frames("s1", h.record.source, SamplingSpec{});
    const auto captured = h.mock->captured();
    REQUIRE(captured.size() == 6);
    for (const auto& request : captured) {
        REQUIRE(request.images.size() == 2);
        CHECK(decoded(request.images[0]) == frames.frames[3].image);
        CHECK(decoded(request.images[1]) == frames.frames[4].image);
        CHECK(request.prompt_text.find(std::string(kContextMarker)) == std::string::npos);
    }
    for (QAStage stage : kAllStages) {
        CHECK(result.answers.at(stage) == kAnswers.at(stage));
    }
}

TEST_CASE("sliding window with n larger than the scenario is an error") {
    Harness h(1, fixtures_for("s1", kAnswers));
    StrategyConfig config;
    config.n = 2;
    CHECK_THROWS_AS(run_scenario(h.record, config, *h.client), ScenarioTooShort);
}

TEST_CASE("textual context needs 2n frames") {
    Harness h(3, fixtures_for("s1", kAnswers));
    StrategyConfig config;
    config.kind = StrategyKind::TextualContext;
    config.n = 2;
    CHECK_THROWS_AS(run_scenario(h.record, config, *h.client), ScenarioTooShort);
    CHECK(h.mock->invocation_count() == 0);
}

TEST_CASE("textual context issues one context call plus stages x variants predictions") {
    const std::string context = "A pedestrian steps off the left curb and walks toward the ego lane.";
    Harness h(6, fixtures_for("s1", kAnswers, context));
    StrategyConfig config;
    config.kind = StrategyKind::TextualContext;
    config.n = 2;
    config.variants = three_variants();
    const auto result = run_scenario(h.record, config, *h.client);
    CHECK_FALSE(result.failed());
    CHECK(h.mock->invocation_count() == 1 + 6 * 3);
    REQUIRE(result.context.has_value());
    CHECK(result.context->text == context);
    CHECK(result.context->first_index == 2);
    CHECK(result.context->last_index == 3);
    CHECK(result.window_indices == std::vector<int>{4, 5});

    const auto frames = sample_frames("s1", h.record.source, SamplingSpec{});
    int context_calls = 0;
    for (const auto& request : h.mock->captured()) {
        if (request.meta.stage == "context") {
            ++context_calls;
            REQUIRE(request.images.size() == 2);
            // Context frames are never augmented.
            CHECK(decoded(request.images[0]) == frames.frames[2].image);
            CHECK(decoded(request.images[1]) == frames.frames[3].image);
            CHECK(request.prompt_text.find("at most 120 words") != std::string::npos);
            continue;
        }
        const auto marker = request.prompt_text.find(std::string(kContextMarker));
        REQUIRE(marker != std::string::npos);
        CHECK(request.prompt_text.find(context, marker) != std::string::npos);
    }
    CHECK(context_calls == 1);
}

TEST_CASE("full video attaches every sampled frame") {
    Harness h(4, fixtures_for("s1", kAnswers));
    StrategyConfig config;
    config.kind = StrategyKind::FullVideo;
    config.stages = {QAStage::Scene};
    const auto result = run_scenario(h.record, config, *h.client);
    CHECK(result.window_indices == std::vector<int>{0, 1, 2, 3});
    REQUIRE(h.mock->captured().size() == 1);
    CHECK(h.mock->captured()[0].images.size() == 4);
}

TEST_CASE("risk gating skips object-level stages") {
    auto answers = kAnswers;
    answers[QAStage::Risk] = "No hazard";
    Harness h(3, fixtures_for("s1", answers));
    StrategyConfig config;
    config.gate_on_risk = true;
    config.variants = three_variants();
    const auto result = run_scenario(h.record, config, *h.client);
    CHECK(result.answers.count(QAStage::Risk) == 1);
    CHECK(result.answers.at(QAStage::Scene) == "urban intersection");
    for (QAStage s : {QAStage::What, QAStage::Which, QAStage::Where, QAStage::ProposedAction}) {
        CHECK(result.skipped(s));
        CHECK(result.answers.count(s) == 0);
    }
    CHECK_FALSE(result.skipped(QAStage::Scene));
    CHECK(h.mock->invocation_count() == 2 * 3);

    // Without gating nothing is skipped.
    h.mock->reset_invocations();
    config.gate_on_risk = false;
    const auto open = run_scenario(h.record, config, *h.client);
    for (const auto& a : open.per_variant) {
        CHECK_FALSE(a.skipped);
    }
    CHECK(h.mock->invocation_count() == 6 * 3);
}

TEST_CASE("a single raw variant with k=1 returns raw answers verbatim") {
    Harness h(3, fixtures_for("s1", kAnswers));
    StrategyConfig config;
    config.k = 1;
    const auto result = run_scenario(h.record, config, *h.client);
    for (QAStage stage : kAllStages) {
        CHECK(result.answers.at(stage) == kAnswers.at(stage));
        const auto* raw = result.find(stage, "raw");
        REQUIRE(raw != nullptr);
        CHECK(raw->raw_text == kAnswers.at(stage));
    }
}

TEST_CASE("voting across variants picks the majority answer") {
    FixtureMap fixtures = fixtures_for("s1", kAnswers);
    fixtures[FixtureKey{"s1", "what", "raw"}] = "cyclist";
    fixtures[FixtureKey{"s1", "what", "rotate30"}] = "A pedestrian.";
    Harness h(3, fixtures);
    StrategyConfig config;
    config.variants = three_variants();
    const auto result = run_scenario(h.record, config, *h.client);
    // noise -> "pedestrian" (wildcard), rotate30 -> "A pedestrian."; raw is outvoted.
    CHECK(result.answers.at(QAStage::What) == "A pedestrian.");
    CHECK(result.find(QAStage::What, "raw")->raw_text == "cyclist");
}

TEST_CASE("prior voted answers thread into later prompts") {
    Harness h(3, fixtures_for("s1", kAnswers));
    StrategyConfig config;
    config.stages = {QAStage::Where, QAStage::What};  // order on input does not matter
    run_scenario(h.record, config, *h.client);
    const auto captured = h.mock->captured();
    REQUIRE(captured.size() == 2);
    CHECK(captured[0].meta.stage == "what");
    CHECK(captured[1].meta.stage == "where");
    CHECK(captured[1].prompt_text.find(std::string(kKnownMarker)) != std::string::npos);
    CHECK(captured[1].prompt_text.find("pedestrian") != std::string::npos);

    h.mock->clear_captured();
    config.thread_prior = false;
    run_scenario(h.record, config, *h.client);
    CHECK(h.mock->captured()[1].prompt_text.find(std::string(kKnownMarker)) == std::string::npos);
}

TEST_CASE("backend failures are recorded and stop the scenario") {
    auto answers = kAnswers;
    answers.erase(QAStage::Which);
    Harness h(3, fixtures_for("s1", answers));
    StrategyConfig config;
    const auto result = run_scenario(h.record, config, *h.client);
    CHECK(result.failed());
    REQUIRE(result.errors.count("which") == 1);
    CHECK(result.errors.at("which").find("FixtureMiss") != std::string::npos);
    CHECK(result.answers.count(QAStage::What) == 1);
    CHECK(result.answers.count(QAStage::Where) == 0);
}

TEST_CASE("mock runs are deterministic") {
    StrategyConfig config;
    config.variants = three_variants();
    Harness a(4, fixtures_for("s1", kAnswers));
    Harness b(4, fixtures_for("s1", kAnswers));
    const auto ra = run_scenario(a.record, config, *a.client);
    const auto rb = run_scenario(b.record, config, *b.client);
    CHECK(to_json(ra).dump() == to_json(rb).dump());
    CHECK(scenario_result_from_json(to_json(ra)) == ra);
    const auto ca = a.mock->captured();
    const auto cb = b.mock->captured();
    REQUIRE(ca.size() == cb.size());
    for (std::size_t i = 0; i < ca.size(); ++i) {
        CHECK(cache_key(ca[i]) == cache_key(cb[i]));
    }
}

TEST_CASE("strategy config json") {
    StrategyConfig config;
    config.kind = StrategyKind::TextualContext;
    config.n = 3;
    config.variants = three_variants();
    config.stages = {QAStage::Where, QAStage::Risk};
    const auto doc = to_json(config);
    const auto back = strategy_config_from_json(doc, 0);
    CHECK(to_json(back) == doc);
    CHECK(back.stages == std::vector<QAStage>{QAStage::Risk, QAStage::Where});

    const auto named = strategy_config_from_json(
        nlohmann::json::parse(R"({"kind":"sliding_window","variants":["raw","rotate30","noise"]})"), 42);
    REQUIRE(named.variants.size() == 3);
    CHECK(std::get<Noise>(named.variants[2].variant).seed == 42);

    CHECK_THROWS_AS(strategy_config_from_json(nlohmann::json::parse(R"({"kind":"magic"})"), 0), ConfigError);
    CHECK_THROWS_AS(strategy_config_from_json(nlohmann::json::parse(R"({"stages":["when"]})"), 0), ConfigError);
    config.variants.push_back({Identity{}, "raw"});
    CHECK_THROWS_AS(validate(config), ConfigError);

    StrategyConfig other;
    CHECK(strategy_digest(other, PromptTemplates::builtin()) != strategy_digest(config, PromptTemplates::builtin()));
    CHECK(canonical_stages({QAStage::ProposedAction, QAStage::Risk, QAStage::Risk}) ==
          std::vector<QAStage>{QAStage::Risk, QAStage::ProposedAction});
}
