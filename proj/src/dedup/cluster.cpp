#include "refinery/dedup/cluster.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "refinery/util/digest.hpp"

namespace refinery::dedup {
namespace {

using Pair = std::pair<std::uint32_t, std::uint32_t>;

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
        std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
    }
    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }
    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint8_t> rank_;
};

std::uint64_t band_key(const MinHashSignature& sig, std::size_t band, std::size_t rows) {
    std::uint64_t h = util::mix64(band);
    for (std::size_t k = band * rows; k < (band + 1) * rows; ++k) h = util::mix64(h ^ sig.values[k]);
    return h;
}

// Candidate pairs from one band. Documents with identical full signatures
// are interchangeable for verification, so each such group is reported as a
// chain and only one representative pairs with the rest of the bucket.
void band_candidates(const std::vector<SignedDocument>& docs, std::size_t band, std::size_t rows,
                     std::vector<Pair>& out) {
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    for (std::uint32_t i = 0; i < docs.size(); ++i) buckets[band_key(docs[i].signature, band, rows)].push_back(i);
    for (auto& [key, members] : buckets) {
        if (members.size() < 2) continue;
        std::sort(members.begin(), members.end(), [&](std::uint32_t x, std::uint32_t y) {
            const auto& vx = docs[x].signature.values;
            const auto& vy = docs[y].signature.values;
            return vx != vy ? vx < vy : x < y;
        });
        std::vector<std::uint32_t> reps;
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (k > 0 && docs[members[k]].signature == docs[members[k - 1]].signature) {
                out.emplace_back(std::min(members[k - 1], members[k]), std::max(members[k - 1], members[k]));
            } else {
                reps.push_back(members[k]);
            }
        }
        for (std::size_t x = 0; x < reps.size(); ++x)
            for (std::size_t y = x + 1; y < reps.size(); ++y)
                out.emplace_back(std::min(reps[x], reps[y]), std::max(reps[x], reps[y]));
    }
}

bool newer(const SignedDocument& a, const SignedDocument& b) {
    return a.dump_id != b.dump_id ? a.dump_id > b.dump_id : a.id > b.id;
}

}  // namespace

std::vector<std::size_t> find_survivors(const std::vector<SignedDocument>& docs, const DedupOptions& options,
                                        DedupStats* stats) {
    const auto& plan = options.plan;
    if (plan.bands == 0 || plan.rows == 0) throw std::invalid_argument("banding plan needs bands and rows >= 1");
    if (docs.size() > UINT32_MAX) throw std::length_error("too many documents for one dedup pass");
    for (const auto& d : docs) {
        if (d.signature.num_perm() < plan.bands * plan.rows)
            throw std::invalid_argument("signature of " + d.id + " is shorter than bands * rows");
        if (d.signature.num_perm() != docs.front().signature.num_perm())
            throw std::invalid_argument("signatures differ in num_perm");
    }

    std::size_t workers = std::max<std::size_t>(1, std::min(options.workers, plan.bands));
    std::vector<std::vector<Pair>> per_worker(workers);
    auto run = [&](std::size_t w) {
        for (std::size_t band = w; band < plan.bands; band += workers)
            band_candidates(docs, band, plan.rows, per_worker[w]);
    };
    if (workers == 1) {
        run(0);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(run, w);
        for (auto& t : threads) t.join();
    }

    std::vector<Pair> pairs;
    for (auto& v : per_worker) pairs.insert(pairs.end(), v.begin(), v.end());
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    DisjointSets sets(docs.size());
    std::size_t merges = 0;
    for (auto [x, y] : pairs) {
        if (sets.find(x) == sets.find(y)) continue;
        if (estimate_jaccard(docs[x].signature, docs[y].signature) >= plan.threshold) {
            sets.unite(x, y);
            ++merges;
        }
    }

    std::unordered_map<std::uint32_t, std::uint32_t> best_of_root;
    for (std::uint32_t i = 0; i < docs.size(); ++i) {
        auto [it, fresh] = best_of_root.try_emplace(sets.find(i), i);
        if (!fresh && newer(docs[i], docs[it->second])) it->second = i;
    }
    std::vector<std::size_t> survivor(docs.size());
    for (std::uint32_t i = 0; i < docs.size(); ++i) survivor[i] = best_of_root[sets.find(i)];

    if (stats) {
        stats->documents = docs.size();
        stats->candidate_pairs = pairs.size();
        stats->merges = merges;
        stats->clusters = best_of_root.size();
        stats->duplicates = docs.size() - best_of_root.size();
    }
    return survivor;
}

std::vector<DupCluster> group_clusters(const std::vector<SignedDocument>& docs,
                                       const std::vector<std::size_t>& survivor) {
    std::unordered_map<std::size_t, DupCluster> by_survivor;
    for (std::size_t i = 0; i < docs.size(); ++i) {
        auto& c = by_survivor[survivor[i]];
        c.member_ids.push_back(docs[i].id);
    }
    std::vector<DupCluster> clusters;
    clusters.reserve(by_survivor.size());
    for (auto& [s, c] : by_survivor) {
        std::sort(c.member_ids.begin(), c.member_ids.end());
        c.survivor_id = docs[s].id;
        c.survivor_dump_id = docs[s].dump_id;
        clusters.push_back(std::move(c));
    }
    std::sort(clusters.begin(), clusters.end(), [](const DupCluster& a, const DupCluster& b) {
        return a.survivor_id != b.survivor_id ? a.survivor_id < b.survivor_id : a.member_ids < b.member_ids;
    });
    return clusters;
}

std::vector<DupCluster> cluster_duplicates(const std::vector<SignedDocument>& docs, const DedupOptions& options,
                                           DedupStats* stats) {
    return group_clusters(docs, find_survivors(docs, options, stats));
}

}  // namespace refinery::dedup
