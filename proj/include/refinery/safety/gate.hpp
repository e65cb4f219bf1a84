#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "refinery/corpus/document.hpp"
#include "refinery/safety/blockwords.hpp"
#include "refinery/safety/domains.hpp"
#include "refinery/safety/pii.hpp"
#include "refinery/safety/scorer.hpp"

namespace refinery::safety {

struct SafetyThresholds {
    double toxicity = 0.2;     // flagged when score > threshold
    double pornography = 0.2;
    bool fail_closed = false;  // a scorer failure discards the document
};

// Shared, read-only after construction. Scorers may be null (not run).
struct SafetyResources {
    DomainBlocklist domains;
    BlockwordMatcher blockwords;
    const Scorer* toxicity = nullptr;
    const Scorer* pornography = nullptr;
    const PiiRegistry* pii = &PiiRegistry::defaults();
};

struct SafetyCounters {
    std::size_t documents = 0;
    std::size_t domain_flagged = 0;
    std::size_t blockword_flagged = 0;
    std::size_t toxicity_flagged = 0;
    std::size_t pornography_flagged = 0;
    std::size_t discarded = 0;
    std::size_t kept = 0;
    std::size_t unparseable_urls = 0;
    std::size_t scorer_failures = 0;
    std::size_t pii_pattern_errors = 0;
    std::size_t pii_documents = 0;  // kept documents with at least one span
    std::map<std::string, std::size_t> pii_spans_by_type;
    std::map<std::string, std::size_t> discard_rule;  // first failing check

    SafetyCounters& operator+=(const SafetyCounters& o);
    double flagged_fraction(std::size_t flagged) const {
        return documents == 0 ? 0.0 : static_cast<double>(flagged) / static_cast<double>(documents);
    }
    nlohmann::ordered_json to_json() const;
};

struct GateResult {
    corpus::Document doc;  // annotated; masked and stage "safe" when kept
    corpus::FilterOutcome outcome;
};

// Checks run in the order domain, blockwords, toxicity, pornography and all
// of them always run, so rejected documents carry complete annotations.
// discard is their disjunction; the outcome names the first that failed.
// PII masking is applied to kept documents only.
GateResult safety_gate(corpus::Document doc, const SafetyResources& resources,
                       const SafetyThresholds& thresholds, SafetyCounters& counters);

struct SafetyStageOptions {
    std::size_t workers = 1;
    std::optional<std::filesystem::path> rejects;
};

struct SafetyStageResult {
    SafetyCounters counters;
    std::size_t malformed = 0;
};

SafetyStageResult run_safety_stage(const std::vector<std::filesystem::path>& inputs,
                                   const std::filesystem::path& output, const SafetyResources& resources,
                                   const SafetyThresholds& thresholds, const SafetyStageOptions& options = {});

}  // namespace refinery::safety
