#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "refinery/heuristic/config.hpp"

namespace refinery::heuristic {

// Per-document measurements compared by the drop rules. Characters are
// Unicode code points. Words are maximal non-whitespace runs; word identity
// (top word, stop words, n-grams) uses text::normalize_word.
struct DocMetrics {
    std::size_t word_count = 0;
    std::size_t letter_chars = 0;
    std::size_t digit_chars = 0;
    std::size_t total_chars = 0;
    // Most frequent non-whitespace character (ties: smallest code point);
    // count 0 when the text has none.
    char32_t most_common_char = 0;
    std::size_t most_common_char_count = 0;
    double top_word_fraction = 0.0;
    double words_with_letter_fraction = 0.0;
    std::size_t stopword_count = 0;
    double mean_word_length = 0.0;
    std::size_t line_count = 0;  // non-blank lines
    std::size_t third_longest_line_len = 0;
    double newline_fraction = 0.0;
    std::size_t max_word_len = 0;
    std::size_t max_sentence_words = 0;
    std::size_t symbol_count = 0;
    double symbol_to_word_ratio = 0.0;
    // ngram_fraction[n - 2] for n = 2..10: top-n-gram coverage for n <= 4,
    // coverage of all repeated n-grams for n >= 5.
    std::array<double, 9> ngram_fraction{};
    double dup_line_fraction = 0.0;
    double dup_para_fraction = 0.0;

    double ngram(std::size_t n) const { return ngram_fraction.at(n - 2); }
};

DocMetrics compute_metrics(std::string_view text, const HeuristicConfig& config = {});

}  // namespace refinery::heuristic
