#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "refinery/dedup/banding.hpp"
#include "refinery/dedup/minhash.hpp"

namespace refinery::dedup {

struct SignedDocument {
    std::string id;
    std::string dump_id;
    MinHashSignature signature;
};

struct DupCluster {
    std::vector<std::string> member_ids;  // sorted
    std::string survivor_id;
    std::string survivor_dump_id;
    bool operator==(const DupCluster&) const = default;
};

struct DedupOptions {
    BandingPlan plan{14, 9, 0.7};
    std::size_t workers = 1;  // band-parallel bucketing
};

struct DedupStats {
    std::size_t documents = 0;
    std::size_t candidate_pairs = 0;  // distinct pairs sharing a band bucket
    std::size_t merges = 0;           // verified candidates that joined two clusters
    std::size_t clusters = 0;
    std::size_t duplicates = 0;  // documents that are not survivors
};

// For each document, the index of its cluster's survivor (itself when it
// survives). Same clustering as cluster_duplicates.
std::vector<std::size_t> find_survivors(const std::vector<SignedDocument>& docs, const DedupOptions& options = {},
                                        DedupStats* stats = nullptr);

// Groups documents by the survivor index from find_survivors.
std::vector<DupCluster> group_clusters(const std::vector<SignedDocument>& docs,
                                       const std::vector<std::size_t>& survivor);

// Clusters documents whose verified estimate reaches plan.threshold,
// closed transitively. Every document lands in exactly one cluster
// (singletons included). The survivor has the greatest dump_id, then the
// greatest id. Clusters are ordered by survivor id. The result does not
// depend on input order or worker count.
std::vector<DupCluster> cluster_duplicates(const std::vector<SignedDocument>& docs, const DedupOptions& options = {},
                                           DedupStats* stats = nullptr);

}  // namespace refinery::dedup
