#include "refinery/dedup/stage.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>
#include <unordered_map>

#include "refinery/corpus/record_io.hpp"
#include "refinery/dedup/signature_cache.hpp"
#include "refinery/util/io.hpp"

namespace refinery::dedup {
namespace {

constexpr std::size_t kBatch = 2048;

void sign_batch(const MinHasher& hasher, std::size_t shingle_size, std::vector<corpus::Document>& batch,
                std::vector<SignedDocument>& out, std::size_t workers) {
    std::size_t base = out.size();
    out.resize(base + batch.size());
    auto work = [&](std::size_t w) {
        for (std::size_t i = w; i < batch.size(); i += workers) {
            auto& d = batch[i];
            out[base + i] = {d.id, d.dump_id, hasher.signature_of_text(d.text, shingle_size)};
        }
    };
    if (workers <= 1 || batch.size() < 64) {
        workers = 1;
        work(0);
    } else {
        std::vector<std::thread> threads;
        for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(work, w);
        for (auto& t : threads) t.join();
    }
    batch.clear();
}

}  // namespace

nlohmann::ordered_json to_json(const DupCluster& cluster) {
    nlohmann::ordered_json j;
    j["survivor_id"] = cluster.survivor_id;
    j["survivor_dump_id"] = cluster.survivor_dump_id;
    j["size"] = cluster.member_ids.size();
    j["member_ids"] = cluster.member_ids;
    return j;
}

DedupStageResult run_dedup_stage(const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& output, const DedupStageOptions& options) {
    DedupStageResult result;
    if (options.bands_rows) {
        auto [b, r] = *options.bands_rows;
        if (b == 0 || r == 0 || b * r > options.num_perm) {
            throw std::invalid_argument("bands * rows must be positive and at most num_perm");
        }
        result.plan = BandingPlan{b, r, options.threshold};
    } else {
        result.plan = optimal_bands(options.num_perm, options.threshold);
    }
    MinHasher hasher(options.num_perm, options.seed);

    std::unordered_map<std::string, MinHashSignature> cached;
    if (options.signature_cache) {
        if (auto cache = load_matching_cache(*options.signature_cache, static_cast<std::uint32_t>(options.num_perm),
                                             options.seed))
            cached = cache->by_id();
    }

    std::vector<SignedDocument> signed_docs;
    std::vector<corpus::Document> batch;
    for (const auto& path : inputs) {
        corpus::RecordReader reader(path);
        while (auto item = reader.next()) {
            if (std::holds_alternative<corpus::RecordError>(*item)) {
                ++result.malformed;
                continue;
            }
            auto& doc = std::get<corpus::Document>(*item);
            if (auto it = cached.find(doc.id); it != cached.end()) {
                sign_batch(hasher, options.shingle_size, batch, signed_docs, options.workers);
                signed_docs.push_back({doc.id, doc.dump_id, it->second});
                ++result.cache_hits;
                continue;
            }
            batch.push_back(std::move(doc));
            if (batch.size() == kBatch) sign_batch(hasher, options.shingle_size, batch, signed_docs, options.workers);
        }
    }
    sign_batch(hasher, options.shingle_size, batch, signed_docs, options.workers);

    if (options.signature_cache) {
        SignatureCache cache;
        cache.num_perm = static_cast<std::uint32_t>(options.num_perm);
        cache.seed = options.seed;
        for (const auto& d : signed_docs) cache.entries.emplace_back(d.id, d.signature);
        cache.write(*options.signature_cache);
    }

    DedupOptions dopts{result.plan, options.workers};
    auto survivor = find_survivors(signed_docs, dopts, &result.stats);

    corpus::RecordWriter kept(output);
    std::optional<corpus::RecordWriter> rejected;
    if (options.rejects) rejected.emplace(*options.rejects);
    std::size_t index = 0;
    for (const auto& path : inputs) {
        corpus::RecordReader reader(path);
        while (auto item = reader.next()) {
            if (std::holds_alternative<corpus::RecordError>(*item)) continue;
            auto& doc = std::get<corpus::Document>(*item);
            std::size_t s = survivor[index++];
            if (s == index - 1) {
                doc.stage = corpus::Stage::dedup;
                kept.write(doc);
                ++result.kept;
            } else {
                ++result.removed;
                if (rejected) {
                    corpus::FilterOutcome outcome = corpus::FilterOutcome::drop("duplicate");
                    outcome.diagnostics["estimated_jaccard"] =
                        estimate_jaccard(signed_docs[index - 1].signature, signed_docs[s].signature);
                    corpus::attach_outcome(doc, outcome, "dedup");
                    doc.extra["duplicate_of"] = signed_docs[s].id;
                    rejected->write(doc);
                }
            }
        }
    }
    if (index != signed_docs.size()) throw util::IoError("dedup input changed between passes");

    if (options.clusters) {
        util::AtomicWriter out(*options.clusters);
        for (const auto& c : group_clusters(signed_docs, survivor)) out.write(to_json(c).dump() + "\n");
        out.commit();
    }
    kept.commit();
    if (rejected) rejected->commit();
    return result;
}

}  // namespace refinery::dedup
