#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "refinery/safety/blockwords.hpp"
#include "refinery/util/subprocess.hpp"

namespace refinery::safety {

class ScorerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Score {
    double value = 0.0;  // in [0, 1]
    std::optional<std::map<std::string, double>> dims;
};

// A text classifier returning a score in [0, 1]. Implementations must be
// safe to call from several threads and deterministic for fixed state.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual const std::string& name() const = 0;
    // Throws ScorerError on failure or an out-of-range score.
    virtual Score score(std::string_view text) const = 0;
};

class FunctionScorer final : public Scorer {
public:
    using Fn = std::function<double(std::string_view)>;
    FunctionScorer(std::string name, Fn fn) : name_(std::move(name)), fn_(std::move(fn)) {}
    const std::string& name() const override { return name_; }
    Score score(std::string_view text) const override;

private:
    std::string name_;
    Fn fn_;
};

// min(1, weight * lexicon hits / words); 0 for a text without words.
class LexiconScorer final : public Scorer {
public:
    LexiconScorer(std::string name, BlockwordMatcher lexicon, double weight)
        : name_(std::move(name)), lexicon_(std::move(lexicon)), weight_(weight) {}
    const std::string& name() const override { return name_; }
    Score score(std::string_view text) const override;

private:
    std::string name_;
    BlockwordMatcher lexicon_;
    double weight_;
};

inline constexpr double kToxicityLexiconWeight = 10.0;
inline constexpr double kAdLexiconWeight = 20.0;

// Child-process scorer. Each request is one JSON line {"text": ...}; the
// reply is one line holding either a bare number or {"score": x, "dims":
// {...}}. Requests are serialised; the child is restarted after a failure.
class CommandScorer final : public Scorer {
public:
    CommandScorer(std::string name, std::string command);
    ~CommandScorer() override;
    const std::string& name() const override { return name_; }
    Score score(std::string_view text) const override;

private:
    std::string name_;
    std::string command_;
    mutable std::mutex mutex_;
    mutable std::unique_ptr<util::LineProcess> process_;
};

// Parses one scorer reply line; throws ScorerError.
Score parse_score_reply(std::string_view line);

}  // namespace refinery::safety
