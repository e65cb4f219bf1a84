#include "refinery/heuristic/metrics.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::heuristic {
namespace {

struct NgramEntry {
    std::size_t count = 0;
    std::vector<std::size_t> starts;  // ascending
};

std::string ngram_key(const std::vector<std::uint32_t>& ids, std::size_t start, std::size_t n) {
    return std::string(reinterpret_cast<const char*>(ids.data() + start), n * sizeof(std::uint32_t));
}

// Characters covered by the union of word windows [s, s + n).
std::size_t union_chars(const std::vector<std::size_t>& starts, std::size_t n, const std::vector<std::size_t>& prefix) {
    std::size_t chars = 0;
    std::size_t covered_to = 0;
    for (auto s : starts) {
        std::size_t from = std::max(s, covered_to);
        std::size_t to = s + n;
        if (to > from) chars += prefix[to] - prefix[from];
        covered_to = std::max(covered_to, to);
    }
    return chars;
}

void ngram_stats(const std::vector<std::uint32_t>& ids, const std::vector<std::size_t>& lengths,
                 std::size_t total_word_chars, DocMetrics& m) {
    const std::size_t w = ids.size();
    std::vector<std::size_t> prefix(w + 1, 0);
    for (std::size_t i = 0; i < w; ++i) prefix[i + 1] = prefix[i] + lengths[i];
    const auto fraction = [&](std::size_t chars) {
        return total_word_chars == 0 ? 0.0 : static_cast<double>(chars) / static_cast<double>(total_word_chars);
    };

    for (std::size_t n = 2; n <= 10; ++n) {
        double& slot = m.ngram_fraction[n - 2];
        slot = 0.0;
        if (w < n) continue;
        std::unordered_map<std::string, NgramEntry> table;
        table.reserve(w);
        for (std::size_t i = 0; i + n <= w; ++i) {
            auto& e = table[ngram_key(ids, i, n)];
            ++e.count;
            e.starts.push_back(i);
        }
        if (n <= 4) {
            // Most frequent n-gram (needs at least two occurrences); ties go
            // to the larger coverage.
            std::size_t best_count = 1;
            std::size_t best_chars = 0;
            for (const auto& [key, e] : table) {
                if (e.count < best_count || e.count < 2) continue;
                std::size_t chars = union_chars(e.starts, n, prefix);
                if (e.count > best_count || chars > best_chars) {
                    best_count = e.count;
                    best_chars = chars;
                }
            }
            slot = fraction(best_chars);
        } else {
            std::vector<std::size_t> starts;
            for (const auto& [key, e] : table) {
                if (e.count >= 2) starts.insert(starts.end(), e.starts.begin(), e.starts.end());
            }
            std::sort(starts.begin(), starts.end());
            slot = fraction(union_chars(starts, n, prefix));
        }
    }
}

// Character share of segments that repeat an earlier identical segment.
double duplicate_fraction(const std::vector<std::string_view>& segments) {
    std::unordered_set<std::string_view> seen;
    std::size_t total = 0;
    std::size_t dup = 0;
    for (auto s : segments) {
        std::size_t len = text::length(s);
        total += len;
        if (!seen.insert(s).second) dup += len;
    }
    return total == 0 ? 0.0 : static_cast<double>(dup) / static_cast<double>(total);
}

// Paragraphs are separated by runs of two or more '\n'; a lone trailing
// newline is not part of the paragraph.
std::vector<std::string_view> paragraphs(std::string_view text) {
    std::vector<std::string_view> out;
    const auto push = [&](std::string_view para) {
        while (!para.empty() && para.front() == '\n') para.remove_prefix(1);
        while (!para.empty() && para.back() == '\n') para.remove_suffix(1);
        if (!text::is_blank(para)) out.push_back(para);
    };
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '\n') {
            std::size_t j = i;
            while (j < text.size() && text[j] == '\n') ++j;
            if (j - i >= 2) {
                push(text.substr(start, i - start));
                start = j;
            }
            i = j;
        } else {
            ++i;
        }
    }
    push(text.substr(start));
    return out;
}

}  // namespace

DocMetrics compute_metrics(std::string_view text, const HeuristicConfig& config) {
    DocMetrics m;

    // Character-level counts.
    std::unordered_map<char32_t, std::size_t> char_counts;
    std::size_t newlines = 0;
    text::for_each_cp(text, [&](char32_t cp, std::size_t, std::size_t) {
        ++m.total_chars;
        if (cp == '\n') ++newlines;
        if (text::is_letter(cp)) ++m.letter_chars;
        if (text::is_digit(cp)) ++m.digit_chars;
        if (!text::is_space(cp)) ++char_counts[cp];
    });
    for (const auto& [cp, count] : char_counts) {
        if (count > m.most_common_char_count || (count == m.most_common_char_count && cp < m.most_common_char)) {
            m.most_common_char = cp;
            m.most_common_char_count = count;
        }
    }
    if (m.total_chars > 0) m.newline_fraction = static_cast<double>(newlines) / static_cast<double>(m.total_chars);

    // Word-level counts.
    auto words = text::split_words(text);
    m.word_count = words.size();
    std::unordered_set<std::string> stop(config.stopwords.begin(), config.stopwords.end());
    std::unordered_map<std::string, std::uint32_t> vocab;
    std::vector<std::uint32_t> ids;
    std::vector<std::size_t> lengths;
    std::vector<std::size_t> freq;
    ids.reserve(words.size());
    lengths.reserve(words.size());
    std::size_t with_letter = 0;
    std::size_t total_word_chars = 0;
    for (auto w : words) {
        std::size_t len = 0;
        bool has_letter = false;
        text::for_each_cp(w, [&](char32_t cp, std::size_t, std::size_t) {
            ++len;
            if (text::is_letter(cp)) has_letter = true;
        });
        lengths.push_back(len);
        total_word_chars += len;
        m.max_word_len = std::max(m.max_word_len, len);
        if (has_letter) ++with_letter;
        std::string key = text::normalize_word(w);
        if (stop.count(key)) ++m.stopword_count;
        auto [it, inserted] = vocab.try_emplace(std::move(key), static_cast<std::uint32_t>(vocab.size()));
        if (inserted) freq.push_back(0);
        ++freq[it->second];
        ids.push_back(it->second);
    }
    if (m.word_count > 0) {
        const double wc = static_cast<double>(m.word_count);
        m.top_word_fraction = static_cast<double>(*std::max_element(freq.begin(), freq.end())) / wc;
        m.words_with_letter_fraction = static_cast<double>(with_letter) / wc;
        m.mean_word_length = static_cast<double>(total_word_chars) / wc;
    }
    for (auto count : text::sentence_word_counts(words)) m.max_sentence_words = std::max(m.max_sentence_words, count);
    m.symbol_count = text::count_symbols(text);
    if (m.word_count > 0) m.symbol_to_word_ratio = static_cast<double>(m.symbol_count) / static_cast<double>(m.word_count);

    ngram_stats(ids, lengths, total_word_chars, m);

    // Line-level counts.
    std::vector<std::string_view> lines;
    std::vector<std::size_t> line_lengths;
    for (auto line : text::split_lines(text)) {
        if (text::is_blank(line)) continue;
        lines.push_back(line);
        line_lengths.push_back(text::length(line));
    }
    m.line_count = lines.size();
    if (line_lengths.size() >= 3) {
        std::nth_element(line_lengths.begin(), line_lengths.begin() + 2, line_lengths.end(), std::greater<>());
        m.third_longest_line_len = line_lengths[2];
    }
    m.dup_line_fraction = duplicate_fraction(lines);
    m.dup_para_fraction = duplicate_fraction(paragraphs(text));
    return m;
}

}  // namespace refinery::heuristic
