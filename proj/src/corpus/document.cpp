#include "refinery/corpus/document.hpp"

#include <array>
#include <cmath>

namespace refinery::corpus {

namespace {
constexpr std::array<std::string_view, 5> kStageNames = {"raw", "clean", "dedup", "safe", "high_quality"};
}

std::string_view to_string(Stage stage) noexcept { return kStageNames[static_cast<std::size_t>(stage)]; }

std::optional<Stage> parse_stage(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kStageNames.size(); ++i) {
        if (kStageNames[i] == name) return static_cast<Stage>(i);
    }
    return std::nullopt;
}

nlohmann::ordered_json to_json(const FilterOutcome& outcome) {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    j["kept"] = outcome.kept;
    j["rule_id"] = outcome.rule_id ? nlohmann::ordered_json(*outcome.rule_id) : nlohmann::ordered_json(nullptr);
    nlohmann::ordered_json diag = nlohmann::ordered_json::object();
    for (const auto& [k, v] : outcome.diagnostics) {
        // JSON has no infinity; an unbounded ratio is written as null.
        diag[k] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
    }
    j["diagnostics"] = std::move(diag);
    return j;
}

void attach_outcome(Document& doc, const FilterOutcome& outcome, std::string_view stage_name) {
    auto j = to_json(outcome);
    j["stage"] = std::string(stage_name);
    doc.extra["outcome"] = std::move(j);
}

}  // namespace refinery::corpus
