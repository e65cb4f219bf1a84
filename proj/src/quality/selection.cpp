#include "refinery/quality/selection.hpp"

#include <algorithm>
#include <queue>

namespace refinery::quality {

double combined_score(double fluency, double ad, const RankWeights& weights) {
    return weights.fluency * fluency + weights.ad * (1.0 - ad);
}

bool ranks_before(const Candidate& a, const Candidate& b) {
    return a.combined != b.combined ? a.combined > b.combined : a.id < b.id;
}

std::vector<Candidate> merge_ranked_runs(std::vector<std::vector<Candidate>> runs) {
    using Head = std::pair<std::size_t, std::size_t>;  // run, position
    auto later = [&](const Head& x, const Head& y) {
        return ranks_before(runs[y.first][y.second], runs[x.first][x.second]);
    };
    std::priority_queue<Head, std::vector<Head>, decltype(later)> heads(later);
    std::size_t total = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        total += runs[r].size();
        if (!runs[r].empty()) heads.push({r, 0});
    }
    std::vector<Candidate> out;
    out.reserve(total);
    while (!heads.empty()) {
        auto [r, pos] = heads.top();
        heads.pop();
        out.push_back(std::move(runs[r][pos]));
        if (pos + 1 < runs[r].size()) heads.push({r, pos + 1});
    }
    return out;
}

Selection select_prefix(const std::vector<Candidate>& ranked, std::uint64_t token_budget) {
    Selection sel;
    std::uint64_t total = 0;
    for (const auto& c : ranked) total += c.tokens;
    sel.budget_exceeds_corpus = total <= token_budget;
    for (const auto& c : ranked) {
        if (sel.tokens + c.tokens > token_budget) break;
        sel.tokens += c.tokens;
        sel.selected.push_back(c.index);
    }
    return sel;
}

Selection select_high_quality(std::vector<Candidate> candidates, std::uint64_t token_budget) {
    std::sort(candidates.begin(), candidates.end(), ranks_before);
    return select_prefix(candidates, token_budget);
}

}  // namespace refinery::quality
