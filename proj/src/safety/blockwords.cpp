#include "refinery/safety/blockwords.hpp"

#include <algorithm>
#include <queue>

#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"
#include "refinery/util/io.hpp"

namespace refinery::safety {
namespace {

constexpr std::uint32_t kNone = UINT32_MAX;

// Code point ending just before byte `pos`.
char32_t code_point_before(std::string_view s, std::size_t pos) {
    if (pos == 0) return 0;
    std::size_t start = pos - 1;
    while (start > 0 && pos - start < 4 && (static_cast<unsigned char>(s[start]) & 0xC0) == 0x80) --start;
    std::size_t p = start;
    char32_t cp = text::decode_next(s, p);
    return p == pos ? cp : 0xFFFD;
}

char32_t code_point_at(std::string_view s, std::size_t pos) {
    if (pos >= s.size()) return 0;
    return text::decode_next(s, pos);
}

std::string normalize_entry(std::string_view entry) {
    while (!entry.empty() && (entry.front() == ' ' || entry.front() == '\t')) entry.remove_prefix(1);
    while (!entry.empty() && (entry.back() == ' ' || entry.back() == '\t' || entry.back() == '\r'))
        entry.remove_suffix(1);
    return fold_case_in_place(entry);
}

}  // namespace

std::string fold_case_in_place(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    text::for_each_cp(text, [&](char32_t cp, std::size_t offset, std::size_t len) {
        std::size_t before = out.size();
        text::append_utf8(out, text::to_lower(cp));
        if (out.size() - before != len) {
            out.resize(before);
            out.append(text.substr(offset, len));
        }
    });
    return out;
}

BlockwordMatcher::BlockwordMatcher(const std::vector<std::string>& lexicon) {
    for (const auto& entry : lexicon) {
        auto norm = normalize_entry(entry);
        if (!norm.empty()) patterns_.push_back(std::move(norm));
    }
    std::sort(patterns_.begin(), patterns_.end());
    patterns_.erase(std::unique(patterns_.begin(), patterns_.end()), patterns_.end());
    build();
}

BlockwordMatcher BlockwordMatcher::load(const std::filesystem::path& path) {
    std::vector<std::string> entries;
    util::InputFile in(path);
    while (auto line = in.read_line()) {
        if (line->empty() || (*line)[0] == '#') continue;
        entries.push_back(*line);
    }
    return BlockwordMatcher(entries);
}

std::uint32_t BlockwordMatcher::child(std::uint32_t node, unsigned char c) const {
    const auto& next = nodes_[node].next;
    auto it = std::lower_bound(next.begin(), next.end(), c,
                               [](const std::pair<unsigned char, std::uint32_t>& e, unsigned char b) {
                                   return e.first < b;
                               });
    return it != next.end() && it->first == c ? it->second : kNone;
}

void BlockwordMatcher::build() {
    nodes_.assign(1, Node{});
    for (std::size_t p = 0; p < patterns_.size(); ++p) {
        std::uint32_t node = 0;
        for (unsigned char c : patterns_[p]) {
            std::uint32_t nxt = child(node, c);
            if (nxt == kNone) {
                nxt = static_cast<std::uint32_t>(nodes_.size());
                auto& edges = nodes_[node].next;
                auto it = std::lower_bound(edges.begin(), edges.end(), c,
                                           [](const auto& e, unsigned char b) { return e.first < b; });
                edges.insert(it, {c, nxt});
                nodes_.emplace_back();
            }
            node = nxt;
        }
        nodes_[node].pattern = static_cast<std::int32_t>(p);
    }
    std::queue<std::uint32_t> queue;
    for (auto [c, n] : nodes_[0].next) {
        nodes_[n].fail = 0;
        queue.push(n);
    }
    while (!queue.empty()) {
        std::uint32_t node = queue.front();
        queue.pop();
        for (auto [c, n] : nodes_[node].next) {
            std::uint32_t f = nodes_[node].fail;
            while (f != 0 && child(f, c) == kNone) f = nodes_[f].fail;
            std::uint32_t target = child(f, c);
            nodes_[n].fail = target != kNone && target != n ? target : 0;
            std::uint32_t fl = nodes_[n].fail;
            nodes_[n].output_link = nodes_[fl].pattern >= 0 ? fl : nodes_[fl].output_link;
            queue.push(n);
        }
    }
}

std::vector<corpus::BlockwordHit> BlockwordMatcher::find_all(std::string_view text) const {
    std::vector<corpus::BlockwordHit> hits;
    if (patterns_.empty()) return hits;
    std::string folded = fold_case_in_place(text);
    auto report = [&](std::int32_t p, std::size_t end) {
        const auto& word = patterns_[static_cast<std::size_t>(p)];
        std::size_t start = end - word.size();
        if (text::is_word_char(code_point_before(folded, start)) || text::is_word_char(code_point_at(folded, end)))
            return;
        hits.push_back({word, start});
    };
    std::uint32_t node = 0;
    for (std::size_t i = 0; i < folded.size(); ++i) {
        auto c = static_cast<unsigned char>(folded[i]);
        std::uint32_t nxt;
        while ((nxt = child(node, c)) == kNone && node != 0) node = nodes_[node].fail;
        node = nxt == kNone ? 0 : nxt;
        if (nodes_[node].pattern >= 0) report(nodes_[node].pattern, i + 1);
        for (std::uint32_t o = nodes_[node].output_link; o != 0; o = nodes_[o].output_link)
            report(nodes_[o].pattern, i + 1);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        return a.offset != b.offset ? a.offset < b.offset : a.word < b.word;
    });
    return hits;
}

std::vector<corpus::BlockwordHit> match_blockwords(std::string_view text, const BlockwordMatcher& lexicon) {
    return lexicon.find_all(text);
}

}  // namespace refinery::safety
