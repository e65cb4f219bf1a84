#pragma once

#include <charconv>
#include <cstdlib>
#include <string>
#include <vector>

#include "refinery/corpus/document.hpp"
#include "refinery/safety/scorer.hpp"
#include "refinery/util/random.hpp"

// A synthetic corpus with a planted number of violations per safety check.
namespace refinery::testing {

struct PlantedCounts {
    std::size_t total = 1000;
    std::size_t blocked_domains = 50;  // 5%
    std::size_t blockwords = 30;       // 3%
    std::size_t toxic = 40;            // 4%
};

inline const std::vector<std::string>& planted_blocked_domains() {
    static const std::vector<std::string> domains{"bad.example", "casino.test", "spam.invalid"};
    return domains;
}

inline const std::vector<std::string>& planted_blockwords() {
    static const std::vector<std::string> words{"blockedterm", "forbidden phrase", "nastyword"};
    return words;
}

// Reads the number after "tox=" in the text; 0 when absent.
inline double marker_score(std::string_view text) {
    auto pos = text.find("tox=");
    if (pos == std::string_view::npos) return 0.0;
    return std::strtod(std::string(text.substr(pos + 4, 16)).c_str(), nullptr);
}

inline safety::FunctionScorer marker_scorer(std::string name = "toxicity") {
    return safety::FunctionScorer(std::move(name), [](std::string_view t) { return marker_score(t); });
}

// Violations go to disjoint documents. Clean documents include near misses:
// scores exactly at 0.2, subdomain-like hosts that are not subdomains, and
// blockwords glued to other letters.
inline std::vector<corpus::Document> planted_safety_corpus(std::uint64_t seed, const PlantedCounts& counts = {}) {
    util::Rng rng(seed);
    std::vector<std::size_t> kind(counts.total, 0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < counts.blocked_domains; ++i) kind[k++] = 1;
    for (std::size_t i = 0; i < counts.blockwords; ++i) kind[k++] = 2;
    for (std::size_t i = 0; i < counts.toxic; ++i) kind[k++] = 3;
    rng.shuffle(kind);
    static const char* filler[] = {"the river", "a quiet town", "old bridges", "market day", "early trains",
                                   "a long winter", "the harbour", "fresh bread"};
    std::vector<corpus::Document> docs;
    for (std::size_t i = 0; i < counts.total; ++i) {
        corpus::Document d;
        d.id = "s" + std::to_string(100000 + i);
        d.dump_id = "2023-06";
        d.stage = corpus::Stage::dedup;
        std::string body;
        for (int w = 0; w < 12; ++w) {
            body += filler[rng.below(8)];
            body += w % 4 == 3 ? ". " : " ";
        }
        std::string host = "site" + std::to_string(i) + ".example.org";
        switch (kind[i]) {
        case 1: {
            const auto& dom = planted_blocked_domains()[rng.below(3)];
            host = rng.below(2) ? dom : "www." + dom;
            break;
        }
        case 2:
            body += " " + planted_blockwords()[rng.below(3)] + " appears here.";
            break;
        case 3:
            body += rng.below(2) ? " tox=0.21" : " tox=0.9";
            break;
        default:
            switch (rng.below(4)) {
            case 0: body += " tox=0.2"; break;
            case 1: host = "notbad.example"; break;
            case 2: body += " nastywordy and blockedterms."; break;
            default: break;
            }
        }
        d.url = "https://" + host + "/page/" + std::to_string(i);
        d.text = body;
        docs.push_back(std::move(d));
    }
    return docs;
}

}  // namespace refinery::testing
