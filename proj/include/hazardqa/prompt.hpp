#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "hazardqa/stage.hpp"

namespace hazardqa {

inline constexpr std::string_view kContextMarker = "PRIOR CONTEXT:";
inline constexpr std::string_view kKnownMarker = "KNOWN SO FAR:";

struct RenderedPrompt {
    std::optional<QAStage> stage;  // absent for context summarization
    std::string text;
    int image_slots = 0;
    std::optional<std::string> context_text;
};

/// Parsed template file: one `[name]` header per template. Required
/// sections are `preamble`, `context` and one per stage key.
class PromptTemplates {
public:
    static PromptTemplates parse(std::string_view text);
    static PromptTemplates load(const std::filesystem::path& path);
    static const PromptTemplates& builtin();

    const std::string& section(std::string_view name) const;

    /// SHA-256 of the source text; part of every run's config digest.
    const std::string& digest() const { return digest_; }

private:
    std::map<std::string, std::string, std::less<>> sections_;
    std::string digest_;
};

/// Renders a stage question. Prior answers appear in canonical order under
/// "KNOWN SO FAR:" and the context under "PRIOR CONTEXT:".
/// Throws ForwardReference if `prior_answers` holds this or a later stage.
RenderedPrompt render_stage_prompt(const PromptTemplates& templates, QAStage stage,
                                   const std::map<QAStage, std::string>& prior_answers,
                                   const std::optional<std::string>& context_text, int image_count);

RenderedPrompt render_context_prompt(const PromptTemplates& templates, int frame_count);

}  // namespace hazardqa
