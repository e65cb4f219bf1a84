#include "refinery/heuristic/stage.hpp"

#include <variant>

#include "refinery/corpus/record_io.hpp"
#include "refinery/heuristic/rules.hpp"
#include "refinery/util/parallel.hpp"

namespace refinery::heuristic {

namespace {
constexpr std::size_t kBatch = 1024;
}

nlohmann::ordered_json CleanStageResult::to_json() const {
    nlohmann::ordered_json j;
    j["documents"] = documents;
    j["kept"] = kept;
    j["dropped"] = dropped;
    j["malformed"] = malformed;
    j["dropped_by_rule"] = dropped_by_rule;
    return j;
}

CleanStageResult run_clean_stage(const std::vector<std::filesystem::path>& inputs,
                                 const std::filesystem::path& output, const HeuristicConfig& config,
                                 const CleanStageOptions& options) {
    CleanStageResult result;
    corpus::RecordWriter kept(output);
    std::optional<corpus::RecordWriter> rejected;
    if (options.rejects) rejected.emplace(*options.rejects);

    std::vector<corpus::Document> batch;
    auto flush = [&] {
        std::vector<CleanResult> cleaned(batch.size());
        util::parallel_for(batch.size(), options.workers,
                           [&](std::size_t i) { cleaned[i] = clean_document(batch[i].text, config); });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            ++result.documents;
            auto& doc = batch[i];
            const auto& c = cleaned[i];
            if (c.outcome.kept) {
                ++result.kept;
                doc.text = c.text;
                doc.stage = corpus::Stage::clean;
                kept.write(doc);
            } else {
                ++result.dropped;
                ++result.dropped_by_rule[*c.outcome.rule_id];
                if (rejected) {
                    corpus::attach_outcome(doc, c.outcome, "clean");
                    rejected->write(doc);
                }
            }
        }
        batch.clear();
    };
    for (const auto& path : inputs) {
        corpus::RecordReader reader(path);
        while (auto item = reader.next()) {
            if (std::holds_alternative<corpus::RecordError>(*item)) {
                ++result.malformed;
                continue;
            }
            batch.push_back(std::move(std::get<corpus::Document>(*item)));
            if (batch.size() == kBatch) flush();
        }
    }
    flush();
    kept.commit();
    if (rejected) rejected->commit();
    return result;
}

}  // namespace refinery::heuristic
