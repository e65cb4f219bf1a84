#include "refinery/quality/labels.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_set>

#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"

namespace refinery::quality {

FluencyWeights::FluencyWeights() {
    for (auto d : kFluencyDimensions) weights_[std::string(d)] = 1.0 / kFluencyDimensions.size();
}

FluencyWeights::FluencyWeights(const std::map<std::string, double>& raw) {
    double sum = 0.0;
    for (const auto& [k, v] : raw) {
        if (std::find(kFluencyDimensions.begin(), kFluencyDimensions.end(), k) == kFluencyDimensions.end())
            throw QualityConfigError("unknown fluency dimension: " + k);
        if (!(v >= 0.0) || !std::isfinite(v)) throw QualityConfigError("fluency weight must be >= 0: " + k);
        sum += v;
    }
    for (auto d : kFluencyDimensions)
        if (!raw.count(std::string(d))) throw QualityConfigError("missing fluency weight: " + std::string(d));
    if (sum <= 0.0) throw QualityConfigError("fluency weights sum to zero");
    for (const auto& [k, v] : raw) weights_[k] = v / sum;
}

double FluencyWeights::weight(std::string_view dim) const {
    auto it = weights_.find(std::string(dim));
    return it == weights_.end() ? 0.0 : it->second;
}

FluencyLabel fluency_label(const std::map<std::string, double>& dims, const FluencyWeights& weights) {
    double score = 0.0;
    for (auto d : kFluencyDimensions) {
        auto it = dims.find(std::string(d));
        if (it == dims.end()) throw QualityConfigError("missing fluency dimension: " + std::string(d));
        if (!(it->second >= 0.0 && it->second <= 1.0))
            throw QualityConfigError("fluency dimension out of range: " + std::string(d));
        score += weights.weight(d) * it->second;
    }
    score = std::clamp(score, 0.0, 1.0);
    return {score, score > kGoodFluency};
}

AdLabel ad_label(std::string_view text, const safety::Scorer& scorer, double threshold) {
    AdLabel label;
    try {
        label.score = scorer.score(text).value;
    } catch (const safety::ScorerError&) {
        return label;
    }
    label.is_ad = *label.score > threshold;
    return label;
}

FluencyResult score_fluency(std::string_view text, const safety::Scorer& scorer, const FluencyWeights& weights) {
    auto s = scorer.score(text);
    if (!s.dims) return {s.value, std::nullopt};
    try {
        return {fluency_label(*s.dims, weights).score, s.dims};
    } catch (const QualityConfigError& e) {
        throw safety::ScorerError(scorer.name() + ": " + e.what());
    }
}

const std::vector<std::string>& default_promo_phrases() {
    static const std::vector<std::string> phrases{
        "buy now",        "limited offer", "click here",   "order now",   "free shipping", "discount",
        "best price",     "sale",          "special offer", "act now",     "coupon",        "subscribe now",
        "shop now",       "hot deal",      "percent off",  "cheap",       "promo code",    "money back",
        "call now",       "lowest price",  "add to cart",  "sign up today", "bestseller",
    };
    return phrases;
}

safety::LexiconScorer baseline_ad_scorer() {
    return safety::LexiconScorer("ad", safety::BlockwordMatcher(default_promo_phrases()), safety::kAdLexiconWeight);
}

safety::Score BaselineFluencyScorer::score(std::string_view body) const {
    std::map<std::string, double> dims;

    auto lines = text::split_lines(body);
    std::unordered_set<std::string_view> seen;
    std::size_t nonblank = 0, repeated = 0;
    for (auto line : lines) {
        if (text::is_blank(line)) continue;
        ++nonblank;
        if (!seen.insert(line).second) ++repeated;
    }
    dims["consistency"] = nonblank == 0 ? 0.0 : 1.0 - static_cast<double>(repeated) / static_cast<double>(nonblank);

    std::size_t chars = 0, noise = 0;
    static const std::u32string kCommon = U".,;:!?'\"()-–—…%&/";
    text::for_each_cp(body, [&](char32_t cp, std::size_t, std::size_t) {
        ++chars;
        if (text::is_letter(cp) || text::is_digit(cp) || text::is_space(cp)) return;
        if (kCommon.find(cp) != std::u32string::npos) return;
        ++noise;
    });
    dims["noisy"] = chars == 0 ? 0.0 : std::max(0.0, 1.0 - 2.0 * static_cast<double>(noise) / chars);

    auto words = text::split_words(body);
    std::set<std::string> distinct;
    for (auto w : words) distinct.insert(text::normalize_word(w));
    dims["information"] = words.empty() ? 0.0 : static_cast<double>(distinct.size()) / words.size();

    std::size_t sentences = 0, well_formed = 0, start = 0;
    for (auto count : text::sentence_word_counts(words)) {
        if (count == 0) continue;
        ++sentences;
        auto first = words[start];
        auto last = words[start + count - 1];
        std::size_t pos = 0;
        char32_t lead = text::decode_next(first, pos);
        char tail = last.back();
        bool upper = text::to_lower(lead) != lead;
        if (upper && (tail == '.' || tail == '!' || tail == '?')) ++well_formed;
        start += count;
    }
    dims["grammar"] = sentences == 0 ? 0.0 : static_cast<double>(well_formed) / sentences;

    double mean = 0.0;
    for (const auto& [k, v] : dims) mean += v / dims.size();
    return {mean, dims};
}

}  // namespace refinery::quality
