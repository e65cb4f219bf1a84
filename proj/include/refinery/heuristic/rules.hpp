#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "refinery/corpus/document.hpp"
#include "refinery/heuristic/config.hpp"
#include "refinery/heuristic/metrics.hpp"

namespace refinery::heuristic {

inline constexpr int kRuleCount = 18;

// "R1".."R18"
std::string rule_id(int rule);

// Evaluates a single drop rule in isolation. Rules 11, 12, 14, 17 and 18 read
// the text directly; the rest compare metrics against the configuration.
bool rule_fails(int rule, const DocMetrics& metrics, std::string_view text, const HeuristicConfig& config = {});

// Every failing (enabled) rule, ascending.
std::vector<int> failing_rules(const DocMetrics& metrics, std::string_view text, const HeuristicConfig& config = {});

// Evaluates R1..R18 in order; the first failure decides rule_id. Diagnostics
// always carry the compared values.
corpus::FilterOutcome apply_drop_rules(const DocMetrics& metrics, std::string_view text,
                                       const HeuristicConfig& config = {});

struct CleanResult {
    std::string text;  // text after normalisation, trimming and scrubbing
    DocMetrics metrics;
    corpus::FilterOutcome outcome;
};

// normalize_characters -> trim_effective_lines -> scrub_lines ->
// compute_metrics -> apply_drop_rules.
CleanResult clean_document(std::string_view text, const HeuristicConfig& config = {});

// Text-level predicates behind rules 11, 12, 14, 17 and 18.
bool only_separators(std::string_view text) noexcept;
std::size_t longest_run(std::string_view text, char c) noexcept;
bool has_decoding_damage(std::string_view text) noexcept;
bool ends_with_colon(std::string_view text) noexcept;
bool is_url_token(std::string_view word) noexcept;
bool has_image_url(std::string_view text, const std::vector<std::string>& extensions);
bool is_url_only(std::string_view text);

}  // namespace refinery::heuristic
