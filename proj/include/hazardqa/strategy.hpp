#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hazardqa/augment.hpp"
#include "hazardqa/backend.hpp"
#include "hazardqa/ingest.hpp"
#include "hazardqa/prompt.hpp"
#include "hazardqa/records.hpp"
#include "hazardqa/vote.hpp"

namespace hazardqa {

enum class StrategyKind { SlidingWindow, TextualContext, FullVideo };

std::string_view strategy_kind_name(StrategyKind kind);
std::optional<StrategyKind> parse_strategy_kind(std::string_view name);

struct StrategyConfig {
    StrategyKind kind = StrategyKind::SlidingWindow;
    int n = 2;
    bool gate_on_risk = false;
    bool thread_prior = true;
    std::vector<QAStage> stages{kAllStages.begin(), kAllStages.end()};
    std::vector<AugmentationSpec> variants{{Identity{}, "raw"}};
    int k = 3;
    SamplingSpec sampling;
};

/// Throws ConfigError on n < 1, k < 1, an empty or duplicated stage or
/// variant list, or an invalid augmentation.
void validate(const StrategyConfig& config);

/// Stages sorted into canonical order with duplicates removed.
std::vector<QAStage> canonical_stages(const std::vector<QAStage>& stages);

nlohmann::json to_json(const StrategyConfig& config);
StrategyConfig strategy_config_from_json(const nlohmann::json& doc, std::uint64_t seed);

/// Digest identifying everything that shapes a scenario's requests: the
/// strategy config and the prompt template text.
std::string strategy_digest(const StrategyConfig& config, const PromptTemplates& templates);

/// Textual summary of the frames that precede the analysed window. One
/// backend call with the context prompt and the frames attached.
ContextText summarize_context(ModelClient& client, const PromptTemplates& templates,
                              const std::vector<Frame>& frames);

/// One stage question over a (possibly augmented) window. With no context
/// this is a plain windowed prediction.
StageAnswer predict_stage(ModelClient& client, const PromptTemplates& templates, QAStage stage,
                          const Window& window, const std::optional<ContextText>& context,
                          const std::map<QAStage, std::string>& prior, const std::string& variant_label = "raw");

/// Runs one scenario end to end: sample, pick the window (the latest n
/// frames, or every frame for full_video), optionally summarise the frames
/// before it, ask each stage across all variants, vote, and gate the
/// object-level stages on a "no" risk verdict when configured.
///
/// Backend failures are recorded in the result's `errors` and stop the
/// scenario. Ingest failures and ScenarioTooShort are thrown.
ScenarioResult run_scenario(const ScenarioRecord& scenario, const StrategyConfig& config, ModelClient& client,
                            const PromptTemplates& templates = PromptTemplates::builtin());

}  // namespace hazardqa
