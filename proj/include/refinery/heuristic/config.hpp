#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace refinery::heuristic {

// How R10 reads "character count to word count": `symbols` counts '#' and
// ellipses (the statistic reported as symbol-to-word ratio); `characters`
// is the literal reading, total characters per word.
enum class SymbolRatioMode { symbols, characters };

// Every threshold, pattern list and word list used by cleaning and the
// eighteen drop rules. Defaults are the production values.
struct HeuristicConfig {
    // Content-modifying rules.
    std::vector<std::string> remove_patterns = {"cookie policy", "use of cookies"};
    std::vector<std::string> line_drop_patterns = {"lorem ipsum", "javascript", "{"};
    std::vector<std::string> stopwords = {"the", "be", "to", "of", "and", "that", "have", "with"};

    // R2
    double min_letter_digit_ratio = 0.46;
    // R3
    double max_top_word_fraction = 0.075;
    double max_top_word_fraction_short = 0.30;
    std::size_t short_doc_max_words = 500;
    // R4
    std::size_t min_words = 50;
    std::size_t max_words = 100000;
    // R5
    double min_words_with_letter_fraction = 0.80;
    // R6
    std::size_t min_stopwords = 2;
    // R7
    double min_mean_word_length = 3.0;
    double max_mean_word_length = 10.0;
    // R8
    std::size_t min_lines = 3;
    std::size_t min_third_longest_line = 20;
    // R9 (repetition thresholds, n = 2..4 and n = 5..10)
    double max_dup_line_fraction = 0.30;
    double max_dup_para_fraction = 0.30;
    std::array<double, 3> max_top_ngram_fraction = {0.20, 0.18, 0.16};
    std::array<double, 6> max_dup_ngram_fraction = {0.15, 0.14, 0.13, 0.12, 0.11, 0.10};
    // R10
    double max_symbol_word_ratio = 1.2;
    SymbolRatioMode symbol_ratio_mode = SymbolRatioMode::symbols;
    // R12: a run of at least this many is dropped.
    std::size_t space_run_limit = 500;
    std::size_t newline_run_limit = 8;
    // R13
    double max_newline_fraction = 0.25;
    // R15
    std::size_t max_word_length = 45;
    // R16
    std::size_t max_sentence_words = 56;
    // R18
    std::vector<std::string> image_extensions = {"png", "jpg", "jpeg", "gif", "webp", "svg"};

    // Rules listed here (1..18) are skipped.
    std::set<int> disabled_rules;
};

// Applies overrides from a parsed key/value tree. Unknown keys throw
// std::invalid_argument so typos do not silently fall back to defaults.
void apply_overrides(HeuristicConfig& config, const nlohmann::ordered_json& values);

// Reads a TOML-syntax key/value file on top of the defaults.
HeuristicConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const HeuristicConfig& config);

}  // namespace refinery::heuristic
