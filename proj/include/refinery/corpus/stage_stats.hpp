#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace refinery::corpus {

// Checkpoints at which the pipeline counts documents: the crawled pages
// plus the output of each of the five stages.
enum class Phase { crawl, raw, clean, dedup, safe, high_quality };

std::string_view to_string(Phase phase) noexcept;
std::optional<Phase> parse_phase(std::string_view name) noexcept;

struct StageStats {
    Phase phase = Phase::crawl;
    std::uint64_t documents = 0;
    std::uint64_t bytes = 0;
    std::uint64_t tokens = 0;
    double relative_removal_rate = 0.0;    // 1 - N_k / N_{k-1}
    double absolute_retention_rate = 1.0;  // N_k / N_0

    bool operator==(const StageStats&) const = default;
};

}  // namespace refinery::corpus
