#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace refinery::quality {

struct RankWeights {
    double fluency = 0.5;
    double ad = 0.5;
};

// w_flu * fluency + w_ad * (1 - ad).
double combined_score(double fluency, double ad, const RankWeights& weights = {});

struct Candidate {
    std::string id;
    std::uint64_t tokens = 0;
    double combined = 0.0;
    std::size_t index = 0;  // caller's position, carried through
};

// Combined descending, then id ascending.
bool ranks_before(const Candidate& a, const Candidate& b);

// Merges runs that are each sorted by ranks_before into one ranked list.
std::vector<Candidate> merge_ranked_runs(std::vector<std::vector<Candidate>> runs);

struct Selection {
    std::vector<std::size_t> selected;  // Candidate::index values, in rank order
    std::uint64_t tokens = 0;
    bool budget_exceeds_corpus = false;  // everything was selected
};

// The longest rank-order prefix whose token total stays within budget.
Selection select_prefix(const std::vector<Candidate>& ranked, std::uint64_t token_budget);

// Ranks `candidates` (any order) and selects. Equivalent to sorting the
// whole set, for any split into runs.
Selection select_high_quality(std::vector<Candidate> candidates, std::uint64_t token_budget);

}  // namespace refinery::quality
