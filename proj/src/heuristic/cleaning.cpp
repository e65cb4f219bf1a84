#include "refinery/heuristic/cleaning.hpp"

#include <vector>

#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::heuristic {

std::string normalize_characters(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        unsigned char c = static_cast<unsigned char>(text[pos]);
        if (c < 0x80) {
            out += static_cast<char>(c);
            ++pos;
            continue;
        }
        std::size_t start = pos;
        char32_t cp = text::decode_next(text, pos);
        if (cp == 0x00A0 || cp == 0x3000) {
            out += ' ';
        } else if (!text::is_invisible(cp)) {
            out.append(text.substr(start, pos - start));
        }
    }
    return out;
}

namespace {

bool has_punctuation(std::string_view line) {
    std::size_t pos = 0;
    while (pos < line.size()) {
        if (text::is_punctuation(text::decode_next(line, pos))) return true;
    }
    return false;
}

}  // namespace

std::string trim_effective_lines(std::string_view text) {
    auto lines = text::split_lines(text);
    std::size_t first = lines.size();
    std::size_t last = lines.size();
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (has_punctuation(lines[i])) {
            if (first == lines.size()) first = i;
            last = i;
        }
    }
    bool keep_head = !lines.empty() && text::split_words(lines[0]).size() > 3;
    if (keep_head) {
        first = 0;
        if (last == lines.size()) last = 0;
    }
    if (first == lines.size()) return {};
    std::vector<std::string_view> kept(lines.begin() + static_cast<std::ptrdiff_t>(first),
                                       lines.begin() + static_cast<std::ptrdiff_t>(last) + 1);
    return text::join_lines(kept);
}

namespace {

// Removes every ASCII-case-insensitive occurrence of each pattern until no
// occurrence remains.
std::string remove_phrases(std::string line, const std::vector<std::string>& patterns) {
    std::vector<std::string> lowered;
    lowered.reserve(patterns.size());
    for (const auto& p : patterns) {
        if (!p.empty()) lowered.push_back(text::ascii_lower(p));
    }
    bool changed = true;
    while (changed) {
        changed = false;
        std::string folded = text::ascii_lower(line);
        for (const auto& p : lowered) {
            std::size_t at = folded.find(p);
            if (at == std::string::npos) continue;
            std::string rebuilt;
            std::size_t from = 0;
            while (at != std::string::npos) {
                rebuilt.append(line, from, at - from);
                from = at + p.size();
                at = folded.find(p, from);
            }
            rebuilt.append(line, from, std::string::npos);
            line = std::move(rebuilt);
            folded = text::ascii_lower(line);
            changed = true;
        }
    }
    return line;
}

bool contains_folded(std::string_view line, const std::vector<std::string>& patterns) {
    std::string folded = text::ascii_lower(line);
    for (const auto& p : patterns) {
        if (!p.empty() && folded.find(text::ascii_lower(p)) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

std::string scrub_lines(std::string_view text, const HeuristicConfig& config) {
    std::vector<std::string> kept;
    for (auto line : text::split_lines(text)) {
        std::string cleaned = remove_phrases(std::string(line), config.remove_patterns);
        if (!cleaned.empty() && text::is_blank(cleaned)) continue;
        if (contains_folded(cleaned, config.line_drop_patterns)) continue;
        kept.push_back(std::move(cleaned));
    }
    return text::join_lines(kept);
}

}  // namespace refinery::heuristic
