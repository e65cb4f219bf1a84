#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "refinery/corpus/document.hpp"
#include "refinery/heuristic/config.hpp"

namespace refinery::metrics {

// Constants behind the machine-computed signals. None of these come with
// published values; they are defaults meant to be overridden.
struct SignalConfig {
    double garbled_nonprintable_fraction = 0.01;
    double max_space_fraction = 0.3;
    std::size_t newline_run = 8;
    std::size_t no_punctuation_block = 256;
    double security_threshold = 0.2;
    std::vector<std::string> markup_tokens = {"&nbsp;", "&amp;", "&lt;", "&gt;", "&quot;", "&#",
                                              "<br",    "<div",  "<span", "<p>",  "</",     "[url",
                                              "[img",   "{{"};
    std::vector<std::string> anti_scraping_phrases = {
        "captcha",          "are you a robot",      "i'm not a robot",        "verify you are human",
        "unusual traffic",  "checking your browser", "enable javascript and cookies", "access denied"};
    // Sub-metrics read from the annotation file; listed ones that are missing
    // there are reported as unavailable.
    std::vector<std::string> sampled_metrics = {"relevance.irrelevant_content", "fluency.incoherent_text"};
    heuristic::HeuristicConfig repetition;  // R9 thresholds for in-document duplication
};

// Applies overrides from a parsed key/value tree; unknown keys throw.
void apply_overrides(SignalConfig& config, const nlohmann::ordered_json& values);

enum class Provenance { machine, sampled };

struct SignalEntry {
    std::string family;
    std::string metric;
    Provenance provenance = Provenance::machine;
    std::uint64_t numerator = 0;    // A or A'
    std::uint64_t denominator = 0;  // B or B'
    std::optional<double> ratio;    // none when unavailable
};

struct QualitySignalReport {
    std::vector<SignalEntry> entries;  // grouped by family in fixed order
    const SignalEntry* find(std::string_view family, std::string_view metric) const;
};

// Per-document machine flags; kept separate so counting can be sharded.
struct DocSignals {
    bool empty = false;
    bool garbled = false;
    bool ends_with_colon = false;
    bool unbalanced = false;
    bool format_error = false;
    bool special_chars = false;
    bool in_doc_duplication = false;
    bool no_punctuation_block = false;
    bool anti_scraping = false;
};

DocSignals doc_signals(std::string_view text, const SignalConfig& config = {});
bool has_unbalanced_pairs(std::string_view text) noexcept;

// Sampled counts keyed "family.metric". File format: a JSON object of
// families, each mapping metric names to {"a": A', "b": B'}.
using SampledCounts = std::map<std::string, std::pair<std::uint64_t, std::uint64_t>>;
SampledCounts load_sampled_annotations(const std::filesystem::path& path);
SampledCounts parse_sampled_annotations(const nlohmann::ordered_json& j);

// Streaming counter. Partial counters over shards merge into the same totals
// regardless of how the corpus was split.
class SignalCounter {
public:
    explicit SignalCounter(SignalConfig config = {});
    void add(const corpus::Document& doc);
    void merge(const SignalCounter& other);
    QualitySignalReport report(const std::optional<SampledCounts>& sampled = std::nullopt) const;

private:
    SignalConfig config_;
    std::uint64_t documents_ = 0;
    std::map<std::string, std::uint64_t> flagged_;
    std::map<std::string, std::uint64_t> text_copies_;  // sha256 -> occurrences
    std::uint64_t toxicity_scored_ = 0, toxicity_flagged_ = 0;
    std::uint64_t pornography_scored_ = 0, pornography_flagged_ = 0;
};

QualitySignalReport quality_signals(const std::vector<corpus::Document>& docs,
                                    const std::optional<SampledCounts>& sampled = std::nullopt,
                                    const SignalConfig& config = {});

nlohmann::ordered_json to_json(const QualitySignalReport& report);
std::string format_table(const QualitySignalReport& report);

}  // namespace refinery::metrics
