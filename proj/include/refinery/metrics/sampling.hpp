#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace refinery::metrics {

struct ScalarRecord {
    std::string id;
    double value = 0;
};

// JSONL of {"id": ..., "value": number}.
std::vector<ScalarRecord> load_scalar_file(const std::filesystem::path& path);

struct StratifiedSample {
    // Low, middle and high terciles of the value distribution.
    std::array<std::vector<ScalarRecord>, 3> strata;
    std::array<std::size_t, 3> population{};
};

// Records are ordered by (value, id) and cut into three equal-count strata;
// each stratum is sampled without replacement. A stratum smaller than its
// quota is taken whole. Output within a stratum keeps the sorted order.
StratifiedSample stratified_sample(std::vector<ScalarRecord> records,
                                   std::array<std::size_t, 3> quotas = {2000, 1000, 2000},
                                   std::uint64_t seed = 1);

}  // namespace refinery::metrics
