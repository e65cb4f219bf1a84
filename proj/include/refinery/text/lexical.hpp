#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Lexical definitions shared by heuristic filtering and corpus statistics, so
// that "word", "sentence", "symbol" and "stop word" mean the same thing in
// both places.
namespace refinery::text {

// Unicode property helpers (ICU backed).
bool is_letter(char32_t cp) noexcept;      // general category L*
bool is_digit(char32_t cp) noexcept;       // Nd
bool is_punctuation(char32_t cp) noexcept; // P*
bool is_space(char32_t cp) noexcept;       // White_Space property
bool is_word_char(char32_t cp) noexcept;   // letter, digit or '_'
bool is_invisible(char32_t cp) noexcept;   // Cf plus explicit zero-width set
bool is_c1_control(char32_t cp) noexcept;  // U+0080..U+009F
bool is_printable(char32_t cp) noexcept;   // not a control/format/unassigned/private-use char (\n \t \r allowed)
char32_t to_lower(char32_t cp) noexcept;

std::string to_lower(std::string_view s);

// ASCII-only case folding; non-ASCII bytes are left untouched. Used for
// pattern matching where byte offsets must be preserved.
std::string ascii_lower(std::string_view s);

// Maximal runs of non-whitespace.
std::vector<std::string_view> split_words(std::string_view s);

// Splits on '\n'. "a\nb" -> {"a","b"}; "a\n" -> {"a",""}; "" -> {""}.
std::vector<std::string_view> split_lines(std::string_view s);

std::string join_lines(const std::vector<std::string_view>& lines);
std::string join_lines(const std::vector<std::string>& lines);

bool is_blank(std::string_view s) noexcept;

// Lowercased word with leading/trailing punctuation removed. Falls back to
// the lowercased word when stripping leaves nothing.
std::string normalize_word(std::string_view word);

// {the, be, to, of, and, that, have, with}
const std::vector<std::string>& default_stopwords();

// A sentence ends at a word whose final character is one of . ! ? (that is,
// terminal punctuation followed by whitespace or end of text). Returns the
// number of words in each sentence; a trailing unterminated run counts as a
// sentence.
std::vector<std::size_t> sentence_word_counts(const std::vector<std::string_view>& words);

// Symbols are '#', U+2026 and the three-dot sequence "..." (each counted once;
// "......" is two).
std::size_t count_symbols(std::string_view s) noexcept;

}  // namespace refinery::text
