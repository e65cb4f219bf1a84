#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "refinery/corpus/document.hpp"

namespace refinery::safety {

// Lowercases each code point whose lowercase form has the same UTF-8 length,
// so byte offsets into the result are offsets into `text`.
std::string fold_case_in_place(std::string_view text);

// Aho-Corasick automaton over a word/phrase lexicon. A hit must not touch a
// word character (letter, digit or '_') on either side. Matching is
// case-insensitive for every character that folds without changing length.
class BlockwordMatcher {
public:
    BlockwordMatcher() = default;
    explicit BlockwordMatcher(const std::vector<std::string>& lexicon);
    // One entry per line; blank lines and '#' comments are ignored.
    static BlockwordMatcher load(const std::filesystem::path& path);

    std::size_t size() const noexcept { return patterns_.size(); }
    bool empty() const noexcept { return patterns_.empty(); }
    const std::vector<std::string>& patterns() const noexcept { return patterns_; }

    // Every bounded occurrence of every entry, ordered by offset then word.
    std::vector<corpus::BlockwordHit> find_all(std::string_view text) const;
    std::size_t count(std::string_view text) const { return find_all(text).size(); }

private:
    struct Node {
        std::vector<std::pair<unsigned char, std::uint32_t>> next;  // sorted by byte
        std::uint32_t fail = 0;
        std::uint32_t output_link = 0;  // nearest proper suffix node ending a pattern; 0 if none
        std::int32_t pattern = -1;       // pattern ending exactly here
    };

    std::uint32_t child(std::uint32_t node, unsigned char c) const;
    void build();

    std::vector<std::string> patterns_;
    std::vector<Node> nodes_;
};

std::vector<corpus::BlockwordHit> match_blockwords(std::string_view text, const BlockwordMatcher& lexicon);

}  // namespace refinery::safety
