#include "refinery/safety/gate.hpp"

#include "refinery/corpus/record_io.hpp"
#include "refinery/util/parallel.hpp"

namespace refinery::safety {
namespace {

constexpr std::size_t kBatch = 1024;

// nullopt when the scorer is absent or failed.
std::optional<double> run_scorer(const Scorer* scorer, std::string_view text, SafetyCounters& counters,
                                 bool& failed) {
    if (!scorer) return std::nullopt;
    try {
        return scorer->score(text).value;
    } catch (const ScorerError&) {
        ++counters.scorer_failures;
        failed = true;
        return std::nullopt;
    }
}

}  // namespace

SafetyCounters& SafetyCounters::operator+=(const SafetyCounters& o) {
    documents += o.documents;
    domain_flagged += o.domain_flagged;
    blockword_flagged += o.blockword_flagged;
    toxicity_flagged += o.toxicity_flagged;
    pornography_flagged += o.pornography_flagged;
    discarded += o.discarded;
    kept += o.kept;
    unparseable_urls += o.unparseable_urls;
    scorer_failures += o.scorer_failures;
    pii_pattern_errors += o.pii_pattern_errors;
    pii_documents += o.pii_documents;
    for (const auto& [k, v] : o.pii_spans_by_type) pii_spans_by_type[k] += v;
    for (const auto& [k, v] : o.discard_rule) discard_rule[k] += v;
    return *this;
}

nlohmann::ordered_json SafetyCounters::to_json() const {
    nlohmann::ordered_json j;
    j["documents"] = documents;
    j["kept"] = kept;
    j["discarded"] = discarded;
    j["flagged"] = {{"domain", domain_flagged},
                    {"blockwords", blockword_flagged},
                    {"toxicity", toxicity_flagged},
                    {"pornography", pornography_flagged}};
    j["flagged_fraction"] = {{"domain", flagged_fraction(domain_flagged)},
                             {"blockwords", flagged_fraction(blockword_flagged)},
                             {"toxicity", flagged_fraction(toxicity_flagged)},
                             {"pornography", flagged_fraction(pornography_flagged)}};
    j["discard_rule"] = discard_rule;
    j["pii_documents"] = pii_documents;
    j["pii_spans_by_type"] = pii_spans_by_type;
    j["errors"] = {{"unparseable_urls", unparseable_urls},
                   {"scorer_failures", scorer_failures},
                   {"pii_pattern_errors", pii_pattern_errors}};
    return j;
}

GateResult safety_gate(corpus::Document doc, const SafetyResources& resources,
                       const SafetyThresholds& thresholds, SafetyCounters& counters) {
    ++counters.documents;
    corpus::SafetyAnnotations notes;

    auto domain = resources.domains.match(doc.url);
    if (domain == DomainMatch::unparseable) ++counters.unparseable_urls;
    notes.domain_blocked = domain == DomainMatch::blocked;
    notes.blockword_hits = resources.blockwords.find_all(doc.text);
    bool scorer_failed = false;
    notes.toxicity = run_scorer(resources.toxicity, doc.text, counters, scorer_failed);
    notes.pornography = run_scorer(resources.pornography, doc.text, counters, scorer_failed);

    bool toxic = notes.toxicity && *notes.toxicity > thresholds.toxicity;
    bool porn = notes.pornography && *notes.pornography > thresholds.pornography;
    counters.domain_flagged += notes.domain_blocked;
    counters.blockword_flagged += !notes.blockword_hits.empty();
    counters.toxicity_flagged += toxic;
    counters.pornography_flagged += porn;

    GateResult result;
    std::optional<std::string> rule;
    if (notes.domain_blocked) {
        rule = "domain";
    } else if (!notes.blockword_hits.empty()) {
        rule = "blockwords";
    } else if (toxic) {
        rule = "toxicity";
    } else if (porn) {
        rule = "pornography";
    } else if (scorer_failed && thresholds.fail_closed) {
        rule = "scorer_failure";
    }
    notes.discard = rule.has_value();

    if (rule) {
        ++counters.discarded;
        ++counters.discard_rule[*rule];
        result.outcome = corpus::FilterOutcome::drop(*rule);
        if (notes.toxicity) result.outcome.diagnostics["toxicity"] = *notes.toxicity;
        if (notes.pornography) result.outcome.diagnostics["pornography"] = *notes.pornography;
        result.outcome.diagnostics["blockword_hits"] = static_cast<double>(notes.blockword_hits.size());
    } else {
        ++counters.kept;
        if (resources.pii) {
            auto masked = resources.pii->mask(doc.text);
            counters.pii_pattern_errors += masked.pattern_errors;
            if (!masked.spans.empty()) ++counters.pii_documents;
            for (const auto& s : masked.spans) ++counters.pii_spans_by_type[s.type];
            doc.text = std::move(masked.masked);
            notes.pii_spans = std::move(masked.spans);
        }
        doc.stage = corpus::Stage::safe;
    }
    doc.safety = std::move(notes);
    result.doc = std::move(doc);
    return result;
}

SafetyStageResult run_safety_stage(const std::vector<std::filesystem::path>& inputs,
                                   const std::filesystem::path& output, const SafetyResources& resources,
                                   const SafetyThresholds& thresholds, const SafetyStageOptions& options) {
    SafetyStageResult result;
    corpus::RecordWriter kept(output);
    std::optional<corpus::RecordWriter> rejected;
    if (options.rejects) rejected.emplace(*options.rejects);

    std::vector<corpus::Document> batch;
    auto flush = [&] {
        std::vector<GateResult> results(batch.size());
        std::vector<SafetyCounters> partial(batch.size());
        util::parallel_for(batch.size(), options.workers, [&](std::size_t i) {
            results[i] = safety_gate(std::move(batch[i]), resources, thresholds, partial[i]);
        });
        for (std::size_t i = 0; i < results.size(); ++i) {
            result.counters += partial[i];
            auto& r = results[i];
            if (r.outcome.kept) {
                kept.write(r.doc);
            } else if (rejected) {
                corpus::attach_outcome(r.doc, r.outcome, "safety");
                rejected->write(r.doc);
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

}  // namespace refinery::safety
