#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "refinery/dedup/cluster.hpp"

namespace refinery::dedup {

struct DedupStageOptions {
    double threshold = 0.7;
    std::size_t num_perm = kDefaultNumPerm;
    std::uint64_t seed = kDefaultSeed;
    std::size_t shingle_size = kDefaultShingleSize;
    std::size_t workers = 1;
    // Fixed (bands, rows) instead of the optimised plan; bands * rows must not
    // exceed num_perm.
    std::optional<std::pair<std::size_t, std::size_t>> bands_rows;
    std::optional<std::filesystem::path> signature_cache;  // read if it matches, then rewritten
    std::optional<std::filesystem::path> rejects;           // removed duplicates, with "duplicate_of"
    std::optional<std::filesystem::path> clusters;          // one JSON line per cluster
};

struct DedupStageResult {
    BandingPlan plan;
    DedupStats stats;
    std::size_t malformed = 0;
    std::size_t cache_hits = 0;
    std::size_t kept = 0;
    std::size_t removed = 0;
};

// Two passes over the inputs: signatures first, then the survivors are
// streamed to `output` in input order with stage "dedup".
DedupStageResult run_dedup_stage(const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& output, const DedupStageOptions& options);

nlohmann::ordered_json to_json(const DupCluster& cluster);

}  // namespace refinery::dedup
