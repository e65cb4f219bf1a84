#include "refinery/warc/language.hpp"

#include <cmath>
#include <unordered_map>
#include <utility>

#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::warc {
namespace {

struct Sample {
    const char* tag;
    const char* text;
};

constexpr Sample kSamples[] = {
#include "language_samples.inc"
};

using Counts = std::unordered_map<std::u32string, double>;

// Lowercased letters; every other run of characters becomes one space, and
// the text is padded so word boundaries form trigrams too.
Counts trigram_counts(std::string_view text) {
    std::u32string norm = U" ";
    std::size_t letters = 0;
    text::for_each_cp(text, [&](char32_t cp, std::size_t, std::size_t) {
        if (text::is_letter(cp)) {
            norm += text::to_lower(cp);
            ++letters;
        } else if (norm.back() != U' ') {
            norm += U' ';
        }
    });
    if (norm.back() != U' ') norm += U' ';
    Counts counts;
    if (letters == 0) return counts;
    for (std::size_t i = 0; i + 3 <= norm.size(); ++i) counts[norm.substr(i, 3)] += 1.0;
    return counts;
}

double norm_of(const Counts& c) {
    double s = 0;
    for (const auto& [k, v] : c) s += v * v;
    return std::sqrt(s);
}

}  // namespace

struct LanguageDetector::Profile {
    std::string tag;
    Counts counts;
    double norm = 0.0;
};

LanguageDetector::LanguageDetector() {
    for (const auto& s : kSamples) {
        Profile p;
        p.tag = s.tag;
        p.counts = trigram_counts(s.text);
        p.norm = norm_of(p.counts);
        profiles_.push_back(std::move(p));
    }
}

std::vector<std::string> LanguageDetector::languages() const {
    std::vector<std::string> out;
    for (const auto& p : profiles_) out.push_back(p.tag);
    return out;
}

LanguageVerdict LanguageDetector::detect(std::string_view text) const {
    if (text::length(text) < kMinChars) return {"und", 0.0};
    Counts input = trigram_counts(text);
    double input_norm = norm_of(input);
    if (input_norm == 0.0) return {"und", 0.0};
    double best = 0.0, second = 0.0;
    const Profile* winner = nullptr;
    for (const auto& p : profiles_) {
        double dot = 0.0;
        for (const auto& [gram, n] : input) {
            auto it = p.counts.find(gram);
            if (it != p.counts.end()) dot += n * it->second;
        }
        double sim = dot / (input_norm * p.norm);
        if (sim > best) {
            second = best;
            best = sim;
            winner = &p;
        } else if (sim > second) {
            second = sim;
        }
    }
    if (!winner || best <= 0.0) return {"und", 0.0};
    return {winner->tag, (best - second) / best};
}

const LanguageDetector& default_language_detector() {
    static const LanguageDetector detector;
    return detector;
}

}  // namespace refinery::warc
