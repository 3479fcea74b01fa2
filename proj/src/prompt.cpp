#include "hazardqa/prompt.hpp"

#include <sstream>
#include <vector>

#include "hazardqa/assets.hpp"
#include "hazardqa/digest.hpp"
#include "hazardqa/errors.hpp"
#include "hazardqa/files.hpp"

namespace hazardqa {

namespace {

std::string trim_blank_lines(const std::string& s) {
    const auto first = s.find_first_not_of("\n\r \t");
    if (first == std::string::npos) {
        return {};
    }
    const auto last = s.find_last_not_of("\n\r \t");
    return s.substr(first, last - first + 1);
}

std::string replace_all(std::string text, std::string_view needle, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
    return text;
}

}  // namespace

PromptTemplates PromptTemplates::parse(std::string_view text) {
    PromptTemplates out;
    std::istringstream in{std::string(text)};
    std::string line;
    std::string current;
    std::string body;
    bool in_section = false;
    const auto flush = [&] {
        if (in_section) {
            out.sections_[current] = trim_blank_lines(body);
        }
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
            flush();
            current = line.substr(1, line.size() - 2);
            if (out.sections_.count(current) != 0) {
                throw TemplateError("duplicate template section [" + current + "]");
            }
            body.clear();
            in_section = true;
            continue;
        }
        if (!in_section) {
            continue;  // header comments
        }
        body += line;
        body += '\n';
    }
    flush();

    std::vector<std::string> required = {"preamble", "context"};
    for (QAStage stage : kAllStages) {
        required.emplace_back(stage_key(stage));
    }
    for (const auto& name : required) {
        auto it = out.sections_.find(name);
        if (it == out.sections_.end() || it->second.empty()) {
            throw TemplateError("template section [" + name + "] is missing or empty");
        }
    }
    out.digest_ = sha256_hex(text);
    return out;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& path) {
    return parse(read_file(path));
}

const PromptTemplates& PromptTemplates::builtin() {
    static const PromptTemplates templates = parse(assets::default_templates());
    return templates;
}

const std::string& PromptTemplates::section(std::string_view name) const {
    auto it = sections_.find(name);
    if (it == sections_.end()) {
        throw TemplateError("no template section [" + std::string(name) + "]");
    }
    return it->second;
}

RenderedPrompt render_stage_prompt(const PromptTemplates& templates, QAStage stage,
                                   const std::map<QAStage, std::string>& prior_answers,
                                   const std::optional<std::string>& context_text, int image_count) {
    if (image_count < 1) {
        throw InvalidArgument("a stage prompt needs at least one image");
    }
    for (const auto& [earlier, answer] : prior_answers) {
        if (stage_order(earlier) >= stage_order(stage)) {
            throw ForwardReference("prior answers for stage '" + std::string(stage_key(stage)) +
                                   "' include '" + std::string(stage_key(earlier)) + "'");
        }
    }

    std::string text = replace_all(templates.section("preamble"), "{{image_count}}", std::to_string(image_count));
    text += "\n\n";
    if (context_text) {
        text += kContextMarker;
        text += '\n';
        text += *context_text;
        text += "\n\n";
    }
    if (!prior_answers.empty()) {
        text += kKnownMarker;
        text += '\n';
        for (const auto& [earlier, answer] : prior_answers) {
            text += "- ";
            text += stage_label(earlier);
            text += ": ";
            text += answer;
            text += '\n';
        }
        text += '\n';
    }
    text += templates.section(stage_key(stage));
    return RenderedPrompt{stage, std::move(text), image_count, context_text};
}

RenderedPrompt render_context_prompt(const PromptTemplates& templates, int frame_count) {
    if (frame_count < 1) {
        throw InvalidArgument("a context prompt needs at least one frame");
    }
    auto text = replace_all(templates.section("context"), "{{frame_count}}", std::to_string(frame_count));
    return RenderedPrompt{std::nullopt, std::move(text), frame_count, std::nullopt};
}

}  // namespace hazardqa
