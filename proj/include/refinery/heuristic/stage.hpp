#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "refinery/heuristic/config.hpp"

namespace refinery::heuristic {

struct CleanStageOptions {
    std::size_t workers = 1;
    std::optional<std::filesystem::path> rejects;
};

struct CleanStageResult {
    std::size_t documents = 0;
    std::size_t kept = 0;
    std::size_t dropped = 0;
    std::size_t malformed = 0;
    std::map<std::string, std::size_t> dropped_by_rule;
    nlohmann::ordered_json to_json() const;
};

// Runs clean_document over every record. Kept records carry the cleaned text
// and stage "clean"; dropped ones keep their original text and go to
// `rejects` with the outcome attached. Output order is input order.
CleanStageResult run_clean_stage(const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& output, const HeuristicConfig& config,
                                 const CleanStageOptions& options = {});

}  // namespace refinery::heuristic
