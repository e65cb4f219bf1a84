#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace refinery::corpus {

// Processing stage of a record. Transitions only move forward.
enum class Stage { raw, clean, dedup, safe, high_quality };

std::string_view to_string(Stage stage) noexcept;
std::optional<Stage> parse_stage(std::string_view name) noexcept;

struct BlockwordHit {
    std::string word;
    std::size_t offset = 0;  // byte offset into the text
    bool operator==(const BlockwordHit&) const = default;
};

// Half-open byte range [start, end) in the unmasked text.
struct PiiSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string type;
    bool operator==(const PiiSpan&) const = default;
};

struct SafetyAnnotations {
    bool domain_blocked = false;
    std::vector<BlockwordHit> blockword_hits;
    std::optional<double> toxicity;
    std::optional<double> pornography;
    std::vector<PiiSpan> pii_spans;
    bool discard = false;
    bool operator==(const SafetyAnnotations&) const = default;
};

struct QualityAnnotations {
    std::optional<double> ad_score;
    std::optional<double> fluency_score;
    std::optional<std::map<std::string, double>> fluency_dims;
    bool selected = false;
    bool operator==(const QualityAnnotations&) const = default;
};

struct Document {
    std::string id;
    std::string dump_id;  // "YYYY-WW"; lexicographic order is recency order
    std::string url;
    std::string fetched_at;  // ISO-8601 UTC
    std::string language;
    std::string text;
    Stage stage = Stage::raw;
    std::optional<SafetyAnnotations> safety;
    std::optional<QualityAnnotations> quality;
    // Fields not part of the model, preserved verbatim on round-trip.
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    bool operator==(const Document&) const = default;
};

// Keep/drop verdict of a filter. kept == !rule_id.has_value().
struct FilterOutcome {
    bool kept = true;
    std::optional<std::string> rule_id;
    std::map<std::string, double> diagnostics;

    static FilterOutcome keep() { return {}; }
    static FilterOutcome drop(std::string rule) {
        FilterOutcome o;
        o.kept = false;
        o.rule_id = std::move(rule);
        return o;
    }
    bool operator==(const FilterOutcome&) const = default;
};

nlohmann::ordered_json to_json(const FilterOutcome& outcome);

// Attaches `outcome` to a rejected record under the "outcome" field.
void attach_outcome(Document& doc, const FilterOutcome& outcome, std::string_view stage_name);

}  // namespace refinery::corpus
