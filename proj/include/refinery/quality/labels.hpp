#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "refinery/safety/scorer.hpp"

namespace refinery::quality {

class QualityConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::array<std::string_view, 4> kFluencyDimensions{"consistency", "noisy", "information",
                                                                    "grammar"};

// Non-negative weights over the four fluency dimensions, normalised to sum 1.
class FluencyWeights {
public:
    FluencyWeights();  // uniform
    // Throws QualityConfigError on an unknown or missing dimension, a negative
    // weight or an all-zero map.
    explicit FluencyWeights(const std::map<std::string, double>& raw);

    double weight(std::string_view dim) const;
    const std::map<std::string, double>& normalized() const noexcept { return weights_; }

private:
    std::map<std::string, double> weights_;
};

struct FluencyLabel {
    double score = 0.0;
    bool good = false;  // score > 0.5
};

// Throws QualityConfigError when a dimension is missing or outside [0, 1].
FluencyLabel fluency_label(const std::map<std::string, double>& dims, const FluencyWeights& weights = {});

inline constexpr double kGoodFluency = 0.5;
inline constexpr double kDefaultAdThreshold = 0.5;

struct AdLabel {
    std::optional<double> score;  // none when the scorer failed
    bool is_ad = false;           // score > threshold
};

AdLabel ad_label(std::string_view text, const safety::Scorer& scorer, double threshold = kDefaultAdThreshold);

// A fluency scorer reply is either one score or the four dimensions; the
// latter are combined with `weights`. Throws ScorerError on failure.
struct FluencyResult {
    double score = 0.0;
    std::optional<std::map<std::string, double>> dims;
};
FluencyResult score_fluency(std::string_view text, const safety::Scorer& scorer, const FluencyWeights& weights);

// Promotional phrases for the baseline ad scorer, min(1, 20 * hits / words).
const std::vector<std::string>& default_promo_phrases();
safety::LexiconScorer baseline_ad_scorer();

// Text-statistics stand-in for a fluency classifier, returning all four
// dimensions:
//   consistency  1 - share of lines that repeat an earlier line
//   noisy        1 - 2 * share of characters that are neither letters,
//                digits, whitespace nor common punctuation (floored at 0)
//   information  distinct lowercased words / words
//   grammar      share of sentences that start uppercase and end in . ! ?
class BaselineFluencyScorer final : public safety::Scorer {
public:
    const std::string& name() const override { return name_; }
    safety::Score score(std::string_view text) const override;

private:
    std::string name_ = "fluency";
};

}  // namespace refinery::quality
