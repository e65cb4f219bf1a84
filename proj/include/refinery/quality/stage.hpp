#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "refinery/quality/labels.hpp"
#include "refinery/quality/selection.hpp"

namespace refinery::quality {

struct QualityStageOptions {
    std::uint64_t token_budget = 0;
    RankWeights rank;
    FluencyWeights fluency_weights;
    double ad_threshold = kDefaultAdThreshold;
    // Optional hard gates applied before ranking.
    bool exclude_ads = false;                // drop is_ad documents
    bool require_good_fluency = false;       // drop fluency <= 0.5
    std::size_t workers = 1;
    std::optional<std::filesystem::path> rejects;
};

struct QualityCounters {
    std::size_t documents = 0;
    std::size_t scorer_failures = 0;  // documents left unscored, never selected
    std::size_t ads = 0;
    std::size_t good_fluency = 0;
    std::size_t gated = 0;  // removed by a hard gate
    std::size_t selected = 0;
    std::uint64_t candidate_tokens = 0;
    std::uint64_t selected_tokens = 0;
    bool budget_exceeds_corpus = false;

    nlohmann::ordered_json to_json() const;
};

// Scores every document, ranks each input file as a run, merges the runs and
// selects the token-budgeted prefix. Selected documents are written in input
// order with stage "high_quality"; the rest go to `rejects` with rule
// "budget", "scorer_failure", "ad" or "fluency".
QualityCounters run_quality_stage(const std::vector<std::filesystem::path>& inputs,
                                  const std::filesystem::path& output, const safety::Scorer& ad_scorer,
                                  const safety::Scorer& fluency_scorer, const QualityStageOptions& options);

}  // namespace refinery::quality
