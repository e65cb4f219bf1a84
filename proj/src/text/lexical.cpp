#include "refinery/text/lexical.hpp"

#include "refinery/text/utf8.hpp"

#include <unicode/uchar.h>

namespace refinery::text {

bool is_letter(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    return u_isalpha(static_cast<UChar32>(cp));
}

bool is_digit(char32_t cp) noexcept {
    if (cp < 0x80) return cp >= '0' && cp <= '9';
    return u_isdigit(static_cast<UChar32>(cp));
}

bool is_punctuation(char32_t cp) noexcept { return u_ispunct(static_cast<UChar32>(cp)); }

bool is_space(char32_t cp) noexcept {
    if (cp < 0x80) return cp == ' ' || (cp >= 0x09 && cp <= 0x0D);
    return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool is_word_char(char32_t cp) noexcept { return cp == '_' || is_letter(cp) || is_digit(cp); }

bool is_invisible(char32_t cp) noexcept {
    switch (cp) {
        case 0x200B:
        case 0x200C:
        case 0x200D:
        case 0x2060:
        case 0xFEFF:
            return true;
        default:
            break;
    }
    if (cp < 0x80) return false;
    return u_charType(static_cast<UChar32>(cp)) == U_FORMAT_CHAR;
}

bool is_c1_control(char32_t cp) noexcept { return cp >= 0x80 && cp <= 0x9F; }

bool is_printable(char32_t cp) noexcept {
    if (cp == '\n' || cp == '\t' || cp == '\r') return true;
    if (cp < 0x20 || cp == 0x7F) return false;
    if (cp < 0x80) return true;
    switch (u_charType(static_cast<UChar32>(cp))) {
        case U_CONTROL_CHAR:
        case U_FORMAT_CHAR:
        case U_UNASSIGNED:
        case U_PRIVATE_USE_CHAR:
        case U_SURROGATE:
            return false;
        default:
            return cp != kReplacementChar;
    }
}

char32_t to_lower(char32_t cp) noexcept {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
    return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}

std::string to_lower(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        unsigned char c = static_cast<unsigned char>(s[pos]);
        if (c < 0x80) {
            out += static_cast<char>((c >= 'A' && c <= 'Z') ? c + 32 : c);
            ++pos;
            continue;
        }
        append_utf8(out, to_lower(decode_next(s, pos)));
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return out;
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> words;
    std::size_t pos = 0;
    std::size_t start = std::string_view::npos;
    while (pos < s.size()) {
        std::size_t at = pos;
        unsigned char c = static_cast<unsigned char>(s[pos]);
        char32_t cp;
        if (c < 0x80) {
            cp = c;
            ++pos;
        } else {
            cp = decode_next(s, pos);
        }
        if (is_space(cp)) {
            if (start != std::string_view::npos) {
                words.push_back(s.substr(start, at - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = at;
        }
    }
    if (start != std::string_view::npos) words.push_back(s.substr(start));
    return words;
}

std::vector<std::string_view> split_lines(std::string_view s) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (true) {
        std::size_t nl = s.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.push_back(s.substr(start));
            return lines;
        }
        lines.push_back(s.substr(start, nl - start));
        start = nl + 1;
    }
}

std::string join_lines(const std::vector<std::string_view>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out.append(lines[i]);
    }
    return out;
}

std::string join_lines(const std::vector<std::string>& lines) {
    std::string out;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i) out += '\n';
        out.append(lines[i]);
    }
    return out;
}

bool is_blank(std::string_view s) noexcept {
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (!is_space(decode_next(s, pos))) return false;
    }
    return true;
}

std::string normalize_word(std::string_view word) {
    std::u32string cps = to_u32(word);
    std::size_t b = 0;
    std::size_t e = cps.size();
    while (b < e && is_punctuation(cps[b])) ++b;
    while (e > b && is_punctuation(cps[e - 1])) --e;
    if (b == e) {
        b = 0;
        e = cps.size();
    }
    std::string out;
    out.reserve(word.size());
    for (std::size_t i = b; i < e; ++i) append_utf8(out, to_lower(cps[i]));
    return out;
}

const std::vector<std::string>& default_stopwords() {
    static const std::vector<std::string> kStopwords = {"the", "be", "to", "of", "and", "that", "have", "with"};
    return kStopwords;
}

std::vector<std::size_t> sentence_word_counts(const std::vector<std::string_view>& words) {
    std::vector<std::size_t> counts;
    std::size_t current = 0;
    for (auto w : words) {
        ++current;
        char last = w.back();
        if (last == '.' || last == '!' || last == '?') {
            counts.push_back(current);
            current = 0;
        }
    }
    if (current > 0) counts.push_back(current);
    return counts;
}

std::size_t count_symbols(std::string_view s) noexcept {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '#') {
            ++n;
            ++i;
        } else if (s.compare(i, 3, "...") == 0) {
            ++n;
            i += 3;
        } else if (s.compare(i, 3, "\xE2\x80\xA6") == 0) {
            ++n;
            i += 3;
        } else {
            ++i;
        }
    }
    return n;
}

}  // namespace refinery::text
