#include "hazardqa/strategy.hpp"

#include <algorithm>
#include <set>

#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"

namespace hazardqa {

namespace {

constexpr std::string_view kContextStage = "context";

nlohmann::json variant_to_json(const AugmentationSpec& spec) {
    nlohmann::json out = {{"label", spec.label}};
    if (std::holds_alternative<Identity>(spec.variant)) {
        out["type"] = "identity";
    } else if (const auto* rot = std::get_if<Rotate>(&spec.variant)) {
        out["type"] = "rotate";
        out["degrees"] = rot->degrees;
    } else if (const auto* noise = std::get_if<Noise>(&spec.variant)) {
        out["type"] = "noise";
        out["sigma"] = noise->sigma;
        out["seed"] = noise->seed;
    }
    return out;
}

AugmentationSpec variant_from_json(const nlohmann::json& doc, std::uint64_t seed) {
    if (doc.is_string()) {
        return variant_from_name(doc.get<std::string>(), seed);
    }
    const auto type = doc.at("type").get<std::string>();
    const auto label = doc.at("label").get<std::string>();
    if (type == "identity") {
        return {Identity{}, label};
    }
    if (type == "rotate") {
        return {Rotate{doc.at("degrees").get<double>()}, label};
    }
    if (type == "noise") {
        return {Noise{doc.at("sigma").get<double>(), doc.value("seed", seed)}, label};
    }
    throw ConfigError("unknown augmentation type '" + type + "'");
}

std::vector<std::string> encode_window(const Window& window) {
    std::vector<std::string> images;
    images.reserve(window.frames.size());
    for (const auto& frame : window.frames) {
        images.push_back(encode_png(frame.image));
    }
    return images;
}

NormalizedAnswer normalize_for_vote(const std::string& text, QAStage stage) {
    try {
        return normalize_answer(text, stage);
    } catch (const UnparsableRisk&) {
        return normalize_answer(text, QAStage::Scene);
    }
}

}  // namespace

std::string_view strategy_kind_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::SlidingWindow: return "sliding_window";
        case StrategyKind::TextualContext: return "textual_context";
        case StrategyKind::FullVideo: return "full_video";
    }
    return "unknown";
}

std::optional<StrategyKind> parse_strategy_kind(std::string_view name) {
    for (auto kind : {StrategyKind::SlidingWindow, StrategyKind::TextualContext, StrategyKind::FullVideo}) {
        if (strategy_kind_name(kind) == name) {
            return kind;
        }
    }
    return std::nullopt;
}

void validate(const StrategyConfig& config) {
    if (config.n < 1) {
        throw ConfigError("window length n must be >= 1");
    }
    if (config.k < 1) {
        throw ConfigError("vote k must be >= 1");
    }
    if (config.stages.empty()) {
        throw ConfigError("at least one stage must be selected");
    }
    if (std::set<QAStage>(config.stages.begin(), config.stages.end()).size() != config.stages.size()) {
        throw ConfigError("stages must not repeat");
    }
    if (config.variants.empty()) {
        throw ConfigError("at least one augmentation variant is required");
    }
    std::set<std::string> labels;
    for (const auto& spec : config.variants) {
        if (!labels.insert(spec.label).second) {
            throw ConfigError("duplicate augmentation label '" + spec.label + "'");
        }
        try {
            validate(spec);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    }
    if (!(config.sampling.interval_s > 0.0)) {
        throw ConfigError("sampling interval_s must be > 0");
    }
    if (config.sampling.max_frames && *config.sampling.max_frames < 1) {
        throw ConfigError("sampling max_frames must be >= 1");
    }
}

std::vector<QAStage> canonical_stages(const std::vector<QAStage>& stages) {
    std::vector<QAStage> out(stages.begin(), stages.end());
    std::sort(out.begin(), out.end(), [](QAStage a, QAStage b) { return stage_order(a) < stage_order(b); });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

nlohmann::json to_json(const StrategyConfig& config) {
    nlohmann::json stages = nlohmann::json::array();
    for (QAStage stage : canonical_stages(config.stages)) {
        stages.push_back(stage_key(stage));
    }
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& spec : config.variants) {
        variants.push_back(variant_to_json(spec));
    }
    nlohmann::json sampling = {{"interval_s", config.sampling.interval_s}, {"max_frames", nullptr}};
    if (config.sampling.max_frames) {
        sampling["max_frames"] = *config.sampling.max_frames;
    }
    return {
        {"kind", strategy_kind_name(config.kind)},
        {"n", config.n},
        {"gate_on_risk", config.gate_on_risk},
        {"thread_prior", config.thread_prior},
        {"stages", stages},
        {"variants", variants},
        {"k", config.k},
        {"sampling", sampling},
    };
}

StrategyConfig strategy_config_from_json(const nlohmann::json& doc, std::uint64_t seed) {
    StrategyConfig config;
    try {
        if (doc.contains("kind")) {
            const auto name = doc["kind"].get<std::string>();
            auto kind = parse_strategy_kind(name);
            if (!kind) {
                throw ConfigError("unknown strategy kind '" + name + "'");
            }
            config.kind = *kind;
        }
        config.n = doc.value("n", config.n);
        config.gate_on_risk = doc.value("gate_on_risk", config.gate_on_risk);
        config.thread_prior = doc.value("thread_prior", config.thread_prior);
        config.k = doc.value("k", config.k);
        if (doc.contains("stages")) {
            config.stages.clear();
            for (const auto& item : doc["stages"]) {
                const auto key = item.get<std::string>();
                auto stage = parse_stage_key(key);
                if (!stage) {
                    throw ConfigError("unknown stage '" + key + "'");
                }
                config.stages.push_back(*stage);
            }
        }
        if (doc.contains("variants")) {
            config.variants.clear();
            for (const auto& item : doc["variants"]) {
                config.variants.push_back(variant_from_json(item, seed));
            }
        }
        if (doc.contains("sampling")) {
            const auto& s = doc["sampling"];
            config.sampling.interval_s = s.value("interval_s", config.sampling.interval_s);
            if (s.contains("max_frames") && !s["max_frames"].is_null()) {
                config.sampling.max_frames = s["max_frames"].get<int>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad strategy config: ") + e.what());
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return config;
}

std::string strategy_digest(const StrategyConfig& config, const PromptTemplates& templates) {
    Sha256 hasher;
    hasher.field("hazardqa-strategy-v1");
    hasher.field(to_json(config).dump());
    hasher.field(templates.digest());
    hasher.field(Stopwords::builtin().digest());
    return hasher.hex_digest();
}

ContextText summarize_context(ModelClient& client, const PromptTemplates& templates,
                              const std::vector<Frame>& frames) {
    if (frames.empty()) {
        throw InvalidArgument("context summarisation needs at least one frame");
    }
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].index != frames[i - 1].index + 1) {
            throw InvalidArgument("context frames must be consecutive");
        }
    }
    const auto prompt = render_context_prompt(templates, static_cast<int>(frames.size()));
    ModelRequest request;
    request.prompt_text = prompt.text;
    for (const auto& frame : frames) {
        request.images.push_back(encode_png(frame.image));
    }
    request.generation = client.config().generation;
    request.backend_name = client.config().name;
    request.meta = RequestMeta{frames.front().scenario_id, std::string(kContextStage), "raw"};

    const auto response = client.query(request);
    return ContextText{response.text, frames.front().index, frames.back().index};
}

StageAnswer predict_stage(ModelClient& client, const PromptTemplates& templates, QAStage stage,
                          const Window& window, const std::optional<ContextText>& context,
                          const std::map<QAStage, std::string>& prior, const std::string& variant_label) {
    if (window.frames.empty() || static_cast<int>(window.frames.size()) != window.length) {
        throw InvalidArgument("prediction window is empty or inconsistent");
    }
    std::optional<std::string> context_text;
    if (context) {
        context_text = context->text;
    }
    const auto prompt =
        render_stage_prompt(templates, stage, prior, context_text, static_cast<int>(window.frames.size()));
    ModelRequest request;
    request.prompt_text = prompt.text;
    request.images = encode_window(window);
    request.generation = client.config().generation;
    request.backend_name = client.config().name;
    request.meta = RequestMeta{window.frames.front().scenario_id, std::string(stage_key(stage)), variant_label};

    const auto response = client.query(request);
    return StageAnswer{stage, response.text, variant_label, false};
}

ScenarioResult run_scenario(const ScenarioRecord& scenario, const StrategyConfig& config, ModelClient& client,
                            const PromptTemplates& templates) {
    validate(config);
    const FrameSequence seq = sample_frames(scenario.id, scenario.source, config.sampling);
    const int len = static_cast<int>(seq.size());

    ScenarioResult result;
    result.scenario_id = scenario.id;
    result.strategy_digest = strategy_digest(config, templates);

    Window window;
    std::optional<ContextText> context;
    switch (config.kind) {
        case StrategyKind::SlidingWindow:
            if (len < config.n) {
                throw ScenarioTooShort("scenario '" + scenario.id + "' has " + std::to_string(len) +
                                       " frames; sliding_window needs n = " + std::to_string(config.n));
            }
            window = make_window(seq, len - config.n, config.n);
            break;
        case StrategyKind::TextualContext: {
            if (len < 2 * config.n) {
                throw ScenarioTooShort("scenario '" + scenario.id + "' has " + std::to_string(len) +
                                       " frames; textual_context needs 2n = " + std::to_string(2 * config.n));
            }
            const int t_i = len - config.n;
            window = make_window(seq, t_i, config.n);
            const Window before = make_window(seq, t_i - config.n, config.n);
            try {
                context = summarize_context(client, templates, before.frames);
            } catch (const Error& e) {
                result.window_indices = window.indices();
                result.errors[std::string(kContextStage)] = e.kind() + ": " + e.what();
                return result;
            }
            break;
        }
        case StrategyKind::FullVideo:
            window = make_window(seq, 0, len);
            break;
    }
    result.window_indices = window.indices();
    result.context = context;

    const auto variants = make_variant_windows(window, config.variants);
    const bool risk_requested =
        std::find(config.stages.begin(), config.stages.end(), QAStage::Risk) != config.stages.end();
    bool gated = false;
    std::map<QAStage, std::string> voted;

    for (QAStage stage : canonical_stages(config.stages)) {
        const bool object_level = stage != QAStage::Risk && stage != QAStage::Scene;
        if (gated && object_level) {
            for (const auto& [spec, unused] : variants) {
                result.per_variant.push_back(StageAnswer{stage, {}, spec.label, true});
            }
            continue;
        }

        std::map<QAStage, std::string> prior;
        if (config.thread_prior) {
            prior = voted;
        }
        std::vector<CandidateAnswer> candidates;
        try {
            for (std::size_t v = 0; v < variants.size(); ++v) {
                const auto& [spec, variant_window] = variants[v];
                auto answer = predict_stage(client, templates, stage, variant_window, context, prior, spec.label);
                candidates.push_back(CandidateAnswer{spec.label, answer.raw_text,
                                                     normalize_for_vote(answer.raw_text, stage), static_cast<int>(v)});
                result.per_variant.push_back(std::move(answer));
            }
        } catch (const Error& e) {
            result.errors[std::string(stage_key(stage))] = e.kind() + ": " + e.what();
            return result;
        }

        const auto vote = plurality_vote(candidates, config.k);
        voted[stage] = vote.winner.raw_text;
        result.answers[stage] = vote.winner.raw_text;

        if (stage == QAStage::Risk && risk_requested && config.gate_on_risk) {
            try {
                gated = parse_risk(vote.winner.raw_text) == RiskLabel::No;
            } catch (const UnparsableRisk&) {
                gated = false;
            }
        }
    }
    return result;
}

}  // namespace hazardqa
