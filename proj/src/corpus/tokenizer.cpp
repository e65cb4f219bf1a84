#include "refinery/corpus/tokenizer.hpp"

#include <array>

#include "refinery/corpus/stage_stats.hpp"
#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::corpus {

std::size_t WhitespaceTokenizer::count_tokens(std::string_view text) const {
    std::size_t count = 0;
    bool in_word = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[pos]);
        char32_t cp;
        if (c < 0x80) {
            cp = c;
            ++pos;
        } else {
            cp = text::decode_next(text, pos);
        }
        bool space = text::is_space(cp);
        if (!space && !in_word) ++count;
        in_word = !space;
    }
    return count;
}

const Tokenizer& default_tokenizer() {
    static const WhitespaceTokenizer kTokenizer;
    return kTokenizer;
}

namespace {
constexpr std::array<std::string_view, 6> kPhaseNames = {"crawl", "raw", "clean", "dedup", "safe", "high_quality"};
}

std::string_view to_string(Phase phase) noexcept { return kPhaseNames[static_cast<std::size_t>(phase)]; }

std::optional<Phase> parse_phase(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
        if (kPhaseNames[i] == name) return static_cast<Phase>(i);
    }
    return std::nullopt;
}

}  // namespace refinery::corpus
