#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace refinery::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes the code point starting at `pos` and advances `pos`. Ill-formed
// sequences (overlong, surrogate, truncated, > U+10FFFF) decode to U+FFFD and
// consume exactly one byte.
char32_t decode_next(std::string_view s, std::size_t& pos) noexcept;

void append_utf8(std::string& out, char32_t cp);

std::u32string to_u32(std::string_view s);
std::string to_utf8(std::u32string_view s);

bool is_valid_utf8(std::string_view s) noexcept;

// Replaces every ill-formed sequence with U+FFFD.
std::string sanitize_utf8(std::string_view bytes);

// Number of code points.
std::size_t length(std::string_view s) noexcept;

// Calls f(cp, byte_offset, byte_length) for each code point.
template <typename F>
void for_each_cp(std::string_view s, F&& f) {
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t start = pos;
        char32_t cp = decode_next(s, pos);
        f(cp, start, pos - start);
    }
}

}  // namespace refinery::text
