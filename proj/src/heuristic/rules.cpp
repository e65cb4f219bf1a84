#include "refinery/heuristic/rules.hpp"

#include <limits>

#include "refinery/heuristic/cleaning.hpp"
#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::heuristic {

std::string rule_id(int rule) { return "R" + std::to_string(rule); }

bool only_separators(std::string_view text) noexcept {
    for (char c : text) {
        if (c != ' ' && c != '\t' && c != '\r' && c != '\n') return false;
    }
    return true;
}

std::size_t longest_run(std::string_view text, char c) noexcept {
    std::size_t best = 0;
    std::size_t run = 0;
    for (char x : text) {
        run = x == c ? run + 1 : 0;
        if (run > best) best = run;
    }
    return best;
}

bool has_decoding_damage(std::string_view text) noexcept {
    bool damaged = false;
    text::for_each_cp(text, [&](char32_t cp, std::size_t, std::size_t) {
        if (cp == text::kReplacementChar || text::is_c1_control(cp)) damaged = true;
    });
    return damaged;
}

bool ends_with_colon(std::string_view text) noexcept {
    std::u32string cps = text::to_u32(text);
    for (auto it = cps.rbegin(); it != cps.rend(); ++it) {
        if (text::is_space(*it)) continue;
        return *it == ':';
    }
    return false;
}

namespace {

std::string_view strip_wrapping(std::string_view w) {
    const std::string_view wrap = "()[]<>{}\"'.,;:!?";
    while (!w.empty() && wrap.find(w.front()) != std::string_view::npos) w.remove_prefix(1);
    while (!w.empty() && wrap.find(w.back()) != std::string_view::npos) w.remove_suffix(1);
    return w;
}

bool starts_with_folded(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    return text::ascii_lower(s.substr(0, prefix.size())) == prefix;
}

}  // namespace

bool is_url_token(std::string_view word) noexcept {
    word = strip_wrapping(word);
    return (starts_with_folded(word, "http://") && word.size() > 7) ||
           (starts_with_folded(word, "https://") && word.size() > 8) ||
           (starts_with_folded(word, "www.") && word.size() > 4);
}

bool has_image_url(std::string_view text, const std::vector<std::string>& extensions) {
    for (auto raw : text::split_words(text)) {
        if (!is_url_token(raw)) continue;
        auto w = strip_wrapping(raw);
        auto cut = w.find_first_of("?#");
        auto path = text::ascii_lower(w.substr(0, cut));
        auto dot = path.rfind('.');
        auto slash = path.rfind('/');
        if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) continue;
        auto ext = std::string_view(path).substr(dot + 1);
        for (const auto& e : extensions) {
            if (ext == text::ascii_lower(e)) return true;
        }
    }
    return false;
}

bool is_url_only(std::string_view text) {
    auto words = text::split_words(text);
    if (words.empty()) return false;
    for (auto w : words) {
        if (!is_url_token(w)) return false;
    }
    return true;
}

bool rule_fails(int rule, const DocMetrics& m, std::string_view text, const HeuristicConfig& c) {
    const double words = static_cast<double>(m.word_count);
    switch (rule) {
        case 1:
            return m.most_common_char_count > 0 && !text::is_letter(m.most_common_char);
        case 2:
            return m.digit_chars > 0 &&
                   static_cast<double>(m.letter_chars) / static_cast<double>(m.digit_chars) < c.min_letter_digit_ratio;
        case 3: {
            double limit = m.word_count <= c.short_doc_max_words ? c.max_top_word_fraction_short : c.max_top_word_fraction;
            return m.top_word_fraction > limit;
        }
        case 4:
            return m.word_count < c.min_words || m.word_count > c.max_words;
        case 5:
            return m.words_with_letter_fraction < c.min_words_with_letter_fraction;
        case 6:
            return m.stopword_count < c.min_stopwords;
        case 7:
            return m.mean_word_length < c.min_mean_word_length || m.mean_word_length > c.max_mean_word_length;
        case 8:
            return m.line_count < c.min_lines || m.third_longest_line_len < c.min_third_longest_line;
        case 9: {
            if (m.dup_line_fraction > c.max_dup_line_fraction) return true;
            if (m.dup_para_fraction > c.max_dup_para_fraction) return true;
            for (std::size_t n = 2; n <= 4; ++n) {
                if (m.ngram(n) > c.max_top_ngram_fraction[n - 2]) return true;
            }
            for (std::size_t n = 5; n <= 10; ++n) {
                if (m.ngram(n) > c.max_dup_ngram_fraction[n - 5]) return true;
            }
            return false;
        }
        case 10: {
            if (m.word_count == 0) return false;
            double numerator = c.symbol_ratio_mode == SymbolRatioMode::symbols ? static_cast<double>(m.symbol_count)
                                                                               : static_cast<double>(m.total_chars);
            return numerator / words > c.max_symbol_word_ratio;
        }
        case 11:
            return only_separators(text);
        case 12:
            return longest_run(text, ' ') >= c.space_run_limit || longest_run(text, '\n') >= c.newline_run_limit;
        case 13:
            return m.newline_fraction > c.max_newline_fraction;
        case 14:
            return has_decoding_damage(text);
        case 15:
            return m.max_word_len > c.max_word_length;
        case 16:
            return m.max_sentence_words > c.max_sentence_words;
        case 17:
            return ends_with_colon(text);
        case 18:
            return has_image_url(text, c.image_extensions) || is_url_only(text);
        default:
            throw std::out_of_range("no such rule: " + std::to_string(rule));
    }
}

std::vector<int> failing_rules(const DocMetrics& metrics, std::string_view text, const HeuristicConfig& config) {
    std::vector<int> out;
    for (int r = 1; r <= kRuleCount; ++r) {
        if (config.disabled_rules.count(r)) continue;
        if (rule_fails(r, metrics, text, config)) out.push_back(r);
    }
    return out;
}

namespace {

void fill_diagnostics(corpus::FilterOutcome& o, const DocMetrics& m, std::string_view text) {
    auto& d = o.diagnostics;
    const auto num = [](auto v) { return static_cast<double>(v); };
    d["most_common_char"] = num(m.most_common_char);
    d["most_common_char_is_letter"] = m.most_common_char_count > 0 && text::is_letter(m.most_common_char) ? 1.0 : 0.0;
    d["letter_chars"] = num(m.letter_chars);
    d["digit_chars"] = num(m.digit_chars);
    d["letter_digit_ratio"] = m.digit_chars == 0 ? std::numeric_limits<double>::infinity()
                                                 : num(m.letter_chars) / num(m.digit_chars);
    d["top_word_fraction"] = m.top_word_fraction;
    d["word_count"] = num(m.word_count);
    d["words_with_letter_fraction"] = m.words_with_letter_fraction;
    d["stopword_count"] = num(m.stopword_count);
    d["mean_word_length"] = m.mean_word_length;
    d["line_count"] = num(m.line_count);
    d["third_longest_line_len"] = num(m.third_longest_line_len);
    d["dup_line_fraction"] = m.dup_line_fraction;
    d["dup_para_fraction"] = m.dup_para_fraction;
    for (std::size_t n = 2; n <= 10; ++n) {
        d[(n <= 4 ? "top_" : "dup_") + std::to_string(n) + "gram_fraction"] = m.ngram(n);
    }
    d["symbol_to_word_ratio"] = m.symbol_to_word_ratio;
    d["chars_per_word"] = m.word_count == 0 ? 0.0 : num(m.total_chars) / num(m.word_count);
    d["max_space_run"] = num(longest_run(text, ' '));
    d["max_newline_run"] = num(longest_run(text, '\n'));
    d["newline_fraction"] = m.newline_fraction;
    d["max_word_len"] = num(m.max_word_len);
    d["max_sentence_words"] = num(m.max_sentence_words);
}

}  // namespace

corpus::FilterOutcome apply_drop_rules(const DocMetrics& metrics, std::string_view text, const HeuristicConfig& config) {
    corpus::FilterOutcome outcome = corpus::FilterOutcome::keep();
    for (int r = 1; r <= kRuleCount; ++r) {
        if (config.disabled_rules.count(r)) continue;
        if (rule_fails(r, metrics, text, config)) {
            outcome = corpus::FilterOutcome::drop(rule_id(r));
            break;
        }
    }
    fill_diagnostics(outcome, metrics, text);
    return outcome;
}

CleanResult clean_document(std::string_view text, const HeuristicConfig& config) {
    CleanResult r;
    r.text = scrub_lines(trim_effective_lines(normalize_characters(text)), config);
    r.metrics = compute_metrics(r.text, config);
    r.outcome = apply_drop_rules(r.metrics, r.text, config);
    return r;
}

}  // namespace refinery::heuristic
