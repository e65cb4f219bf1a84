#include "refinery/quality/stage.hpp"

#include <algorithm>

#include "refinery/corpus/record_io.hpp"
#include "refinery/corpus/tokenizer.hpp"
#include "refinery/util/parallel.hpp"

namespace refinery::quality {
namespace {

struct Scored {
    std::optional<double> ad;
    std::optional<FluencyResult> fluency;
    std::uint64_t tokens = 0;
    std::optional<std::string> drop_rule;
};

Scored score_document(const corpus::Document& doc, const safety::Scorer& ad_scorer,
                      const safety::Scorer& fluency_scorer, const QualityStageOptions& options) {
    Scored s;
    s.tokens = corpus::default_tokenizer().count_tokens(doc.text);
    s.ad = ad_label(doc.text, ad_scorer, options.ad_threshold).score;
    try {
        s.fluency = score_fluency(doc.text, fluency_scorer, options.fluency_weights);
    } catch (const safety::ScorerError&) {
    }
    if (!s.ad || !s.fluency) {
        s.drop_rule = "scorer_failure";
    } else if (options.exclude_ads && *s.ad > options.ad_threshold) {
        s.drop_rule = "ad";
    } else if (options.require_good_fluency && !(s.fluency->score > kGoodFluency)) {
        s.drop_rule = "fluency";
    }
    return s;
}

}  // namespace

nlohmann::ordered_json QualityCounters::to_json() const {
    nlohmann::ordered_json j;
    j["documents"] = documents;
    j["scorer_failures"] = scorer_failures;
    j["ads"] = ads;
    j["good_fluency"] = good_fluency;
    j["gated"] = gated;
    j["selected"] = selected;
    j["candidate_tokens"] = candidate_tokens;
    j["selected_tokens"] = selected_tokens;
    j["budget_exceeds_corpus"] = budget_exceeds_corpus;
    return j;
}

QualityCounters run_quality_stage(const std::vector<std::filesystem::path>& inputs,
                                  const std::filesystem::path& output, const safety::Scorer& ad_scorer,
                                  const safety::Scorer& fluency_scorer, const QualityStageOptions& options) {
    QualityCounters counters;
    std::vector<Scored> scored;
    std::vector<std::vector<Candidate>> runs;
    for (const auto& path : inputs) {
        auto docs = corpus::read_records(path).documents;
        std::vector<Scored> local(docs.size());
        util::parallel_for(docs.size(), options.workers, [&](std::size_t i) {
            local[i] = score_document(docs[i], ad_scorer, fluency_scorer, options);
        });
        std::vector<Candidate> run;
        for (std::size_t i = 0; i < docs.size(); ++i) {
            const auto& s = local[i];
            if (!s.ad || !s.fluency) {
                ++counters.scorer_failures;
            } else {
                counters.ads += *s.ad > options.ad_threshold;
                counters.good_fluency += s.fluency->score > kGoodFluency;
            }
            if (s.drop_rule && *s.drop_rule != "scorer_failure") ++counters.gated;
            if (!s.drop_rule) {
                run.push_back({docs[i].id, s.tokens, combined_score(s.fluency->score, *s.ad, options.rank),
                               scored.size() + i});
                counters.candidate_tokens += s.tokens;
            }
        }
        std::sort(run.begin(), run.end(), ranks_before);
        runs.push_back(std::move(run));
        scored.insert(scored.end(), std::make_move_iterator(local.begin()), std::make_move_iterator(local.end()));
    }
    counters.documents = scored.size();

    auto selection = select_prefix(merge_ranked_runs(std::move(runs)), options.token_budget);
    counters.selected = selection.selected.size();
    counters.selected_tokens = selection.tokens;
    counters.budget_exceeds_corpus = selection.budget_exceeds_corpus;
    std::vector<bool> chosen(scored.size(), false);
    for (auto i : selection.selected) chosen[i] = true;

    corpus::RecordWriter kept(output);
    std::optional<corpus::RecordWriter> rejected;
    if (options.rejects) rejected.emplace(*options.rejects);
    std::size_t index = 0;
    for (const auto& path : inputs) {
        corpus::RecordReader reader(path);
        while (auto item = reader.next()) {
            if (std::holds_alternative<corpus::RecordError>(*item)) continue;
            auto& doc = std::get<corpus::Document>(*item);
            const auto& s = scored.at(index);
            corpus::QualityAnnotations notes;
            notes.ad_score = s.ad;
            if (s.fluency) {
                notes.fluency_score = s.fluency->score;
                notes.fluency_dims = s.fluency->dims;
            }
            notes.selected = chosen[index];
            doc.quality = std::move(notes);
            if (chosen[index]) {
                doc.stage = corpus::Stage::high_quality;
                kept.write(doc);
            } else if (rejected) {
                auto outcome = corpus::FilterOutcome::drop(s.drop_rule.value_or("budget"));
                if (s.ad) outcome.diagnostics["ad_score"] = *s.ad;
                if (s.fluency) outcome.diagnostics["fluency_score"] = s.fluency->score;
                corpus::attach_outcome(doc, outcome, "quality");
                rejected->write(doc);
            }
            ++index;
        }
    }
    kept.commit();
    if (rejected) rejected->commit();
    return counters;
}

}  // namespace refinery::quality
