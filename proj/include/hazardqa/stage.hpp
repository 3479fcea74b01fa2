#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace hazardqa {

/// The six question-answer stages, declared in canonical order. The
/// numeric value is the position in that order.
enum class QAStage : int {
    Risk = 0,
    Scene = 1,
    What = 2,
    Which = 3,
    Where = 4,
    ProposedAction = 5,
};

inline constexpr std::array<QAStage, 6> kAllStages = {
    QAStage::Risk, QAStage::Scene, QAStage::What,
    QAStage::Which, QAStage::Where, QAStage::ProposedAction,
};

/// Lowercase snake-case key used in manifests, templates and request metadata.
std::string_view stage_key(QAStage stage);

/// Display label as printed in reports ("Proposed Action").
std::string_view stage_label(QAStage stage);

std::optional<QAStage> parse_stage_key(std::string_view key);

inline constexpr int stage_order(QAStage stage) { return static_cast<int>(stage); }

}  // namespace hazardqa
