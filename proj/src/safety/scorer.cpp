#include "refinery/safety/scorer.hpp"

#include <cmath>

#include <json.hpp>

#include "refinery/text/lexical.hpp"

namespace refinery::safety {
namespace {

double checked(double v, const std::string& name) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0)
        throw ScorerError(name + ": score out of range: " + std::to_string(v));
    return v;
}

}  // namespace

Score FunctionScorer::score(std::string_view text) const {
    double v;
    try {
        v = fn_(text);
    } catch (const ScorerError&) {
        throw;
    } catch (const std::exception& e) {
        throw ScorerError(name_ + ": " + e.what());
    }
    return {checked(v, name_), std::nullopt};
}

Score LexiconScorer::score(std::string_view text) const {
    auto words = text::split_words(text).size();
    if (words == 0) return {0.0, std::nullopt};
    double hits = static_cast<double>(lexicon_.count(text));
    return {std::min(1.0, weight_ * hits / static_cast<double>(words)), std::nullopt};
}

Score parse_score_reply(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ScorerError(std::string("unparseable scorer reply: ") + e.what());
    }
    Score s;
    if (j.is_number()) {
        s.value = j.get<double>();
    } else if (j.is_object() && j.contains("score") && j["score"].is_number()) {
        s.value = j["score"].get<double>();
        if (j.contains("dims")) {
            if (!j["dims"].is_object()) throw ScorerError("scorer reply dims must be an object");
            std::map<std::string, double> dims;
            for (auto& [k, v] : j["dims"].items()) {
                if (!v.is_number()) throw ScorerError("scorer reply dim " + k + " is not a number");
                dims[k] = v.get<double>();
            }
            s.dims = std::move(dims);
        }
    } else {
        throw ScorerError("scorer reply has no score");
    }
    return s;
}

CommandScorer::CommandScorer(std::string name, std::string command)
    : name_(std::move(name)), command_(std::move(command)) {}

CommandScorer::~CommandScorer() = default;

Score CommandScorer::score(std::string_view text) const {
    nlohmann::json request{{"text", std::string(text)}};
    std::string line = request.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    std::lock_guard lock(mutex_);
    try {
        if (!process_) process_ = std::make_unique<util::LineProcess>(command_);
        Score s = parse_score_reply(process_->request(line));
        s.value = checked(s.value, name_);
        return s;
    } catch (const util::SubprocessError& e) {
        process_.reset();
        throw ScorerError(name_ + ": " + e.what());
    } catch (const ScorerError& e) {
        process_.reset();
        throw ScorerError(name_ + ": " + e.what());
    }
}

}  // namespace refinery::safety
