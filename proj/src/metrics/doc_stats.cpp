#include "refinery/metrics/doc_stats.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "refinery/metrics/distribution.hpp"
#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::metrics {

bool is_long_tailed(std::string_view stat_name) noexcept {
    return stat_name == "content_length" || stat_name == "line_number" || stat_name == "token_length" ||
           stat_name == "sentence_number" || stat_name == "mean_word_length" || stat_name == "symbol_to_word_ratio";
}

DocStatVector doc_stats(std::string_view text, const corpus::Tokenizer& tokenizer) {
    DocStatVector s;
    std::size_t chars = 0;
    std::size_t non_alpha = 0;
    text::for_each_cp(text, [&](char32_t cp, std::size_t, std::size_t) {
        ++chars;
        if (!text::is_letter(cp)) ++non_alpha;
    });
    s.content_length = static_cast<double>(chars);
    if (chars > 0) s.non_alpha_fraction = static_cast<double>(non_alpha) / static_cast<double>(chars);

    for (auto line : text::split_lines(text)) {
        if (!text::is_blank(line)) s.line_number += 1;
    }
    s.token_length = static_cast<double>(tokenizer.count_tokens(text));

    const auto words = text::split_words(text);
    if (words.empty()) return s;
    const auto n = static_cast<double>(words.size());

    const auto& stop = text::default_stopwords();
    const std::unordered_set<std::string> stopwords(stop.begin(), stop.end());
    std::unordered_set<std::string> distinct;
    std::size_t letters_in_words = 0;
    std::size_t stop_hits = 0;
    for (auto w : words) {
        auto norm = text::normalize_word(w);
        if (stopwords.count(norm)) ++stop_hits;
        distinct.insert(std::move(norm));
        letters_in_words += text::length(w);
    }
    s.unique_words_fraction = static_cast<double>(distinct.size()) / n;
    s.mean_word_length = static_cast<double>(letters_in_words) / n;
    s.sentence_number = static_cast<double>(text::sentence_word_counts(words).size());
    s.stop_word_fraction = static_cast<double>(stop_hits) / n;
    s.symbol_to_word_ratio = static_cast<double>(text::count_symbols(text)) / n;
    return s;
}

double stat_value(const DocStatVector& s, std::string_view name) {
    if (name == "content_length") return s.content_length;
    if (name == "line_number") return s.line_number;
    if (name == "token_length") return s.token_length;
    if (name == "non_alpha_fraction") return s.non_alpha_fraction;
    if (name == "unique_words_fraction") return s.unique_words_fraction;
    if (name == "mean_word_length") return s.mean_word_length;
    if (name == "sentence_number") return s.sentence_number;
    if (name == "stop_word_fraction") return s.stop_word_fraction;
    if (name == "symbol_to_word_ratio") return s.symbol_to_word_ratio;
    throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

nlohmann::ordered_json to_json(const DocStatVector& s) {
    nlohmann::ordered_json j;
    for (auto name : kDocStatNames) j[std::string(name)] = stat_value(s, name);
    return j;
}

void CorpusStats::add(const DocStatVector& stats) {
    for (std::size_t i = 0; i < columns_.size(); ++i) columns_[i].push_back(stat_value(stats, kDocStatNames[i]));
}

void CorpusStats::merge(const CorpusStats& other) {
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        columns_[i].insert(columns_[i].end(), other.columns_[i].begin(), other.columns_[i].end());
    }
}

namespace {

struct Summary {
    double mean = 0, min = 0, max = 0;
};

Summary summarise(const std::vector<double>& v) {
    if (v.empty()) return {};
    return {std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()),
            *std::min_element(v.begin(), v.end()), *std::max_element(v.begin(), v.end())};
}

}  // namespace

nlohmann::ordered_json CorpusStats::to_json(std::size_t bins) const {
    nlohmann::ordered_json j;
    j["documents"] = documents();
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        const std::string name(kDocStatNames[i]);
        BinSpec spec{bins, std::nullopt};
        if (is_long_tailed(name)) spec.truncation_quantile = 0.99;
        auto s = summarise(columns_[i]);
        j["metrics"][name] = {{"mean", s.mean}, {"min", s.min}, {"max", s.max},
                              {"histogram", metrics::to_json(histogram(columns_[i], spec))}};
    }
    return j;
}

std::string CorpusStats::format_table() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-24s %12s %12s %12s\n", "metric", "mean", "min", "max");
    os << buf;
    for (std::size_t i = 0; i < columns_.size(); ++i) {
        auto s = summarise(columns_[i]);
        std::snprintf(buf, sizeof buf, "%-24s %12.4f %12.4f %12.4f\n", std::string(kDocStatNames[i]).c_str(), s.mean,
                      s.min, s.max);
        os << buf;
    }
    os << "documents: " << documents() << "\n";
    return os.str();
}

}  // namespace refinery::metrics
