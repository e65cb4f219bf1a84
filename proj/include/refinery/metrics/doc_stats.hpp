#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refinery/corpus/tokenizer.hpp"

namespace refinery::metrics {

// The nine per-document corpus statistics. Characters are code points; words,
// sentences, symbols and stop words follow text/lexical.hpp so the numbers
// agree with what the heuristic filter compares against.
struct DocStatVector {
    double content_length = 0;  // code points
    double line_number = 0;     // non-blank lines
    double token_length = 0;
    double non_alpha_fraction = 0;
    double unique_words_fraction = 0;  // distinct normalized words / words
    double mean_word_length = 0;
    double sentence_number = 0;
    double stop_word_fraction = 0;
    double symbol_to_word_ratio = 0;

    bool operator==(const DocStatVector&) const = default;
};

inline constexpr std::array<std::string_view, 9> kDocStatNames = {
    "content_length",        "line_number",      "token_length",
    "non_alpha_fraction",    "unique_words_fraction", "mean_word_length",
    "sentence_number",       "stop_word_fraction",    "symbol_to_word_ratio"};

// Metrics whose histograms are truncated at the 99th percentile by default.
bool is_long_tailed(std::string_view stat_name) noexcept;

DocStatVector doc_stats(std::string_view text, const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());

double stat_value(const DocStatVector& stats, std::string_view name);  // throws std::invalid_argument
nlohmann::ordered_json to_json(const DocStatVector& stats);

// Per-metric value columns over a corpus; summarised as mean/min/max plus a
// histogram (99th-percentile truncation for long-tailed metrics).
class CorpusStats {
public:
    void add(const DocStatVector& stats);
    void merge(const CorpusStats& other);
    std::size_t documents() const noexcept { return columns_[0].size(); }
    const std::vector<double>& column(std::size_t metric) const { return columns_.at(metric); }

    nlohmann::ordered_json to_json(std::size_t bins) const;
    std::string format_table() const;

private:
    std::array<std::vector<double>, kDocStatNames.size()> columns_;
};

}  // namespace refinery::metrics
