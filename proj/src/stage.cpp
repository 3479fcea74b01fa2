#include "hazardqa/stage.hpp"

namespace hazardqa {

std::string_view stage_key(QAStage stage) {
    switch (stage) {
        case QAStage::Risk: return "risk";
        case QAStage::Scene: return "scene";
        case QAStage::What: return "what";
        case QAStage::Which: return "which";
        case QAStage::Where: return "where";
        case QAStage::ProposedAction: return "proposed_action";
    }
    return "unknown";
}

std::string_view stage_label(QAStage stage) {
    switch (stage) {
        case QAStage::Risk: return "Risk";
        case QAStage::Scene: return "Scene";
        case QAStage::What: return "What";
        case QAStage::Which: return "Which";
        case QAStage::Where: return "Where";
        case QAStage::ProposedAction: return "Proposed Action";
    }
    return "Unknown";
}

std::optional<QAStage> parse_stage_key(std::string_view key) {
    for (QAStage stage : kAllStages) {
        if (stage_key(stage) == key) {
            return stage;
        }
    }
    return std::nullopt;
}

}  // namespace hazardqa
