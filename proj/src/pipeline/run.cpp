#include "refinery/pipeline/run.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <numeric>
#include <variant>

#include "refinery/corpus/record_io.hpp"
#include "refinery/dedup/stage.hpp"
#include "refinery/heuristic/stage.hpp"
#include "refinery/metrics/distribution.hpp"
#include "refinery/metrics/doc_stats.hpp"
#include "refinery/metrics/retention.hpp"
#include "refinery/metrics/signals.hpp"
#include "refinery/quality/labels.hpp"
#include "refinery/quality/stage.hpp"
#include "refinery/safety/gate.hpp"
#include "refinery/util/digest.hpp"
#include "refinery/util/io.hpp"
#include "refinery/util/parallel.hpp"
#include "refinery/warc/extract.hpp"

namespace refinery::pipeline {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

corpus::Phase output_phase(StageName stage) noexcept {
    switch (stage) {
        case StageName::extract: return corpus::Phase::raw;
        case StageName::clean: return corpus::Phase::clean;
        case StageName::dedup: return corpus::Phase::dedup;
        case StageName::safety: return corpus::Phase::safe;
        case StageName::quality: return corpus::Phase::high_quality;
    }
    return corpus::Phase::raw;
}

fs::path RunLayout::output(StageName stage) const {
    return dir / (std::string(corpus::to_string(output_phase(stage))) + ".jsonl");
}

fs::path RunLayout::rejects(StageName stage) const { return dir / "rejects" / (std::string(to_string(stage)) + ".jsonl"); }

const StageRecord* RunManifest::find(StageName stage) const {
    for (const auto& s : stages) {
        if (s.stage == stage) return &s;
    }
    return nullptr;
}

namespace {

ojson stats_json(const corpus::StageStats& s) {
    return {{"phase", corpus::to_string(s.phase)}, {"documents", s.documents}, {"bytes", s.bytes}, {"tokens", s.tokens}};
}

corpus::StageStats stats_from_json(const ojson& j) {
    corpus::StageStats s;
    s.phase = corpus::parse_phase(j.at("phase").get<std::string>()).value_or(corpus::Phase::raw);
    s.documents = j.at("documents").get<std::uint64_t>();
    s.bytes = j.at("bytes").get<std::uint64_t>();
    s.tokens = j.at("tokens").get<std::uint64_t>();
    return s;
}

}  // namespace

ojson to_json(const RunManifest& m) {
    ojson j;
    j["run_id"] = m.run_id;
    j["status"] = m.status;
    j["failed_stage"] = m.failed_stage ? ojson(*m.failed_stage) : ojson(nullptr);
    j["error"] = m.error;
    ojson stages = ojson::array();
    for (const auto& s : m.stages) {
        ojson r;
        r["stage"] = to_string(s.stage);
        r["status"] = s.status;
        r["input_digest"] = s.input_digest;
        r["output_digest"] = s.output_digest;
        r["rejects_digest"] = s.rejects_digest;
        r["inputs"] = s.inputs;
        r["outputs"] = s.outputs;
        r["rejects"] = s.rejects;
        r["seconds"] = s.seconds;
        r["reused"] = s.reused;
        r["output_stats"] = stats_json(s.output_stats);
        if (s.crawl_stats) r["crawl_stats"] = stats_json(*s.crawl_stats);
        r["counters"] = s.counters;
        stages.push_back(std::move(r));
    }
    j["stages"] = std::move(stages);
    j["stage_stats"] = metrics::to_json(metrics::RetentionReport{m.stage_stats, {}})["stages"];
    j["config"] = m.config;
    return j;
}

RunManifest manifest_from_json(const ojson& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.status = j.at("status").get<std::string>();
    if (j.contains("failed_stage") && j["failed_stage"].is_string()) m.failed_stage = j["failed_stage"].get<std::string>();
    m.error = j.value("error", "");
    for (const auto& r : j.at("stages")) {
        StageRecord s;
        auto stage = parse_stage_name(r.at("stage").get<std::string>());
        if (!stage) throw ConfigError("manifest names unknown stage " + r.at("stage").dump());
        s.stage = *stage;
        s.status = r.at("status").get<std::string>();
        s.input_digest = r.value("input_digest", "");
        s.output_digest = r.value("output_digest", "");
        s.rejects_digest = r.value("rejects_digest", "");
        s.inputs = r.value("inputs", std::uint64_t{0});
        s.outputs = r.value("outputs", std::uint64_t{0});
        s.rejects = r.value("rejects", std::uint64_t{0});
        s.seconds = r.value("seconds", 0.0);
        s.reused = r.value("reused", false);
        if (r.contains("output_stats")) s.output_stats = stats_from_json(r["output_stats"]);
        if (r.contains("crawl_stats")) s.crawl_stats = stats_from_json(r["crawl_stats"]);
        s.counters = r.value("counters", ojson::object());
        m.stages.push_back(std::move(s));
    }
    if (j.contains("stage_stats")) {
        auto rep = metrics::retention_report(metrics::stage_stats_from_json(j["stage_stats"]));
        m.stage_stats = rep.stages;
    }
    m.config = j.value("config", ojson::object());
    return m;
}

RunManifest read_manifest(const fs::path& run_dir) {
    auto path = RunLayout{run_dir}.manifest();
    if (!fs::exists(path)) throw ConfigError("no manifest in " + run_dir.string());
    try {
        return manifest_from_json(ojson::parse(util::read_file(path)));
    } catch (const ojson::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

ReportBlock report_block_from_snapshot(const ojson& snapshot) {
    ReportBlock r;
    if (!snapshot.contains("report")) return r;
    const auto& j = snapshot["report"];
    r.histogram_bins = j.value("histogram_bins", r.histogram_bins);
    if (j.contains("annotations") && j["annotations"].is_string()) r.annotations = j["annotations"].get<std::string>();
    if (j.contains("signals")) {
        r.signal_overrides = j["signals"];
        metrics::apply_overrides(r.signals, r.signal_overrides);
    }
    return r;
}

namespace {

struct FileScan {
    std::uint64_t documents = 0;
    std::uint64_t bytes = 0;
    std::uint64_t tokens = 0;
    std::uint64_t malformed = 0;
};

FileScan scan_records(const std::vector<fs::path>& paths) {
    FileScan s;
    const auto& tok = corpus::default_tokenizer();
    for (const auto& p : paths) {
        corpus::RecordReader reader(p);
        while (auto item = reader.next()) {
            if (std::holds_alternative<corpus::RecordError>(*item)) {
                ++s.malformed;
                continue;
            }
            const auto& d = std::get<corpus::Document>(*item);
            ++s.documents;
            s.bytes += d.text.size();
            s.tokens += tok.count_tokens(d.text);
        }
    }
    return s;
}

// Adds integer leaves of `b` into `a`; other leaves keep a's value.
void json_sum(ojson& a, const ojson& b) {
    if (a.is_object() && b.is_object()) {
        for (auto it = b.begin(); it != b.end(); ++it) {
            if (!a.contains(it.key())) {
                a[it.key()] = *it;
            } else {
                json_sum(a[it.key()], *it);
            }
        }
    } else if (a.is_number_integer() && b.is_number_integer()) {
        a = a.get<std::uint64_t>() + b.get<std::uint64_t>();
    } else if (a.is_boolean() && b.is_boolean()) {
        a = a.get<bool>() || b.get<bool>();
    }
}

ojson to_json(const warc::ExtractCounters& c) {
    return {{"records", c.records},       {"errors", c.errors},       {"responses", c.responses},
            {"non_html", c.non_html},     {"html_pages", c.html_pages}, {"crawl_bytes", c.crawl_bytes},
            {"crawl_tokens", c.crawl_tokens}, {"empty", c.empty},     {"wrong_language", c.wrong_language},
            {"kept", c.kept}};
}

std::string section_key(StageName stage) { return std::string(to_string(stage)); }

std::string input_digest(StageName stage, const ojson& stage_config, const std::vector<fs::path>& inputs) {
    std::string material = section_key(stage) + "\n" + stage_config.dump() + "\n";
    for (const auto& in : inputs) material += util::file_sha256(in) + "\n";
    return util::sha256_hex(material);
}

std::string digest_or_empty(const fs::path& p) { return fs::exists(p) ? util::file_sha256(p) : std::string(); }

void concat_files(const std::vector<fs::path>& parts, const fs::path& dest) {
    util::AtomicWriter out(dest);
    for (const auto& p : parts) out.write(util::read_file(p));
    out.commit();
}

// Splits the records of `inputs` into `shards` contiguous line ranges.
std::vector<fs::path> split_records(const std::vector<fs::path>& inputs, std::size_t shards, const fs::path& dir) {
    std::uint64_t total = 0;
    for (const auto& p : inputs) {
        util::InputFile in(p);
        while (auto line = in.read_line()) {
            if (line->find_first_not_of(" \t\r") != std::string::npos) ++total;
        }
    }
    std::vector<fs::path> parts;
    std::vector<std::uint64_t> bounds;
    for (std::size_t k = 0; k <= shards; ++k) bounds.push_back(total * k / shards);
    std::size_t k = 0;
    std::uint64_t index = 0;
    auto open = [&](std::size_t shard) {
        char name[32];
        std::snprintf(name, sizeof name, "in-%04zu.jsonl", shard);
        parts.push_back(dir / name);
        return std::make_unique<util::AtomicWriter>(parts.back());
    };
    auto writer = open(0);
    for (const auto& p : inputs) {
        util::InputFile in(p);
        while (auto line = in.read_line()) {
            if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
            while (index >= bounds[k + 1] && k + 1 < shards) {
                writer->commit();
                writer = open(++k);
            }
            writer->write(*line);
            writer->write("\n");
            ++index;
        }
    }
    writer->commit();
    while (parts.size() < shards) open(parts.size())->commit();
    return parts;
}

using ShardFn = std::function<ojson(const std::vector<fs::path>& inputs, const fs::path& output,
                                    const fs::path& rejects, std::size_t workers)>;

// Runs `fn` once per shard and merges outputs in shard order. A shard whose
// done-marker matches the stage input digest is not recomputed.
ojson run_sharded(const fs::path& dir, const std::vector<std::vector<fs::path>>& shard_inputs, std::size_t workers,
                  const std::string& digest, const fs::path& output, const fs::path& rejects, const ShardFn& fn) {
    if (shard_inputs.size() == 1) return fn(shard_inputs[0], output, rejects, workers);
    const std::size_t n = shard_inputs.size();
    std::vector<fs::path> outs(n), rejs(n), dones(n);
    std::vector<ojson> counters(n);
    for (std::size_t k = 0; k < n; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "%04zu", k);
        outs[k] = dir / (std::string("out-") + name + ".jsonl");
        rejs[k] = dir / (std::string("rejects-") + name + ".jsonl");
        dones[k] = dir / (std::string("done-") + name + ".json");
    }
    util::parallel_for(n, workers, [&](std::size_t k) {
        if (fs::exists(dones[k]) && fs::exists(outs[k]) && fs::exists(rejs[k])) {
            auto done = ojson::parse(util::read_file(dones[k]));
            if (done.value("input_digest", "") == digest && done.value("shards", std::size_t{0}) == n) {
                counters[k] = done["counters"];
                return;
            }
        }
        counters[k] = fn(shard_inputs[k], outs[k], rejs[k], 1);
        ojson done{{"input_digest", digest}, {"shards", n}, {"counters", counters[k]}};
        util::write_file_atomic(dones[k], done.dump(2));
    });
    ojson merged = counters[0];
    for (std::size_t k = 1; k < n; ++k) json_sum(merged, counters[k]);
    concat_files(outs, output);
    concat_files(rejs, rejects);
    return merged;
}

struct Scorers {
    std::unique_ptr<safety::Scorer> toxicity;
    std::unique_ptr<safety::Scorer> pornography;
    std::unique_ptr<safety::Scorer> ad;
    std::unique_ptr<safety::Scorer> fluency;
};

std::unique_ptr<safety::Scorer> safety_scorer(const std::string& name, const std::optional<std::string>& cmd,
                                              const std::optional<fs::path>& lexicon) {
    if (cmd) return std::make_unique<safety::CommandScorer>(name, *cmd);
    if (lexicon) {
        return std::make_unique<safety::LexiconScorer>(name, safety::BlockwordMatcher::load(*lexicon),
                                                       safety::kToxicityLexiconWeight);
    }
    return nullptr;
}

class Runner {
public:
    Runner(const PipelineConfig& config, const RunOptions& options, RunLayout layout, RunManifest previous)
        : config_(config), options_(options), layout_(std::move(layout)), previous_(std::move(previous)) {
        shards_ = options.shards.value_or(config.shards);
        snapshot_ = to_json(config);
    }

    RunManifest run() {
        manifest_.run_id = previous_.run_id;
        manifest_.config = snapshot_;
        manifest_.status = "running";
        std::vector<fs::path> inputs = config_.inputs;
        for (auto stage : kStageOrder) {
            if (!config_.enabled(stage)) continue;
            run_stage(stage, inputs);
            inputs = {layout_.output(stage)};
            if (options_.stop_after == stage) {
                manifest_.status = "partial";
                save();
                return manifest_;
            }
        }
        finish();
        return manifest_;
    }

private:
    void log(const std::string& line) const {
        if (options_.log) *options_.log << line << "\n";
    }

    void save() const {
        fs::create_directories(layout_.dir);
        util::write_file_atomic(layout_.manifest(), to_json(manifest_).dump(2) + "\n");
    }

    [[noreturn]] void fail(StageName stage, const std::string& what, StageRecord record) {
        record.status = "failed";
        manifest_.stages.push_back(std::move(record));
        manifest_.status = "failed";
        manifest_.failed_stage = std::string(to_string(stage));
        manifest_.error = what;
        save();
        throw StageFailure(stage, what);
    }

    bool reusable(const StageRecord& prev, const std::string& digest, StageName stage) const {
        if (!options_.resume || prev.status != "completed" || prev.input_digest != digest) return false;
        return fs::exists(layout_.output(stage)) && util::file_sha256(layout_.output(stage)) == prev.output_digest &&
               digest_or_empty(layout_.rejects(stage)) == prev.rejects_digest;
    }

    void run_stage(StageName stage, const std::vector<fs::path>& inputs) {
        const std::string key = section_key(stage);
        StageRecord record;
        record.stage = stage;
        record.input_digest = input_digest(stage, snapshot_.at(key), inputs);

        if (const auto* prev = previous_.find(stage); prev && reusable(*prev, record.input_digest, stage)) {
            StageRecord reused = *prev;
            reused.reused = true;
            manifest_.stages.push_back(std::move(reused));
            save();
            log(key + ": reused");
            return;
        }
        if (options_.fail_at == stage) fail(stage, "injected failure", std::move(record));

        log(key + ": running");
        const auto start = std::chrono::steady_clock::now();
        try {
            fs::create_directories(layout_.rejects(stage).parent_path());
            record.counters = execute(stage, inputs, record.input_digest);

            const FileScan out = scan_records({layout_.output(stage)});
            const FileScan rej = scan_records({layout_.rejects(stage)});
            record.outputs = out.documents;
            record.rejects = rej.documents;
            if (stage == StageName::extract) {
                record.inputs = record.counters.at("html_pages").get<std::uint64_t>();
                record.crawl_stats = corpus::StageStats{corpus::Phase::crawl, record.inputs,
                                                        record.counters.at("crawl_bytes").get<std::uint64_t>(),
                                                        record.counters.at("crawl_tokens").get<std::uint64_t>()};
            } else {
                const FileScan in = scan_records(inputs);
                record.inputs = in.documents;
                if (stage == first_enabled()) {
                    first_input_stats_ = corpus::StageStats{corpus::Phase::raw, in.documents, in.bytes, in.tokens};
                }
            }
            if (out.malformed + rej.malformed > 0) throw std::runtime_error("stage wrote malformed records");
            if (record.inputs != record.outputs + record.rejects) {
                throw std::runtime_error("conservation violated: " + std::to_string(record.inputs) + " in, " +
                                         std::to_string(record.outputs) + " out, " + std::to_string(record.rejects) +
                                         " rejected");
            }
            record.output_stats = corpus::StageStats{output_phase(stage), out.documents, out.bytes, out.tokens};
            record.output_digest = util::file_sha256(layout_.output(stage));
            record.rejects_digest = digest_or_empty(layout_.rejects(stage));
        } catch (const StageFailure&) {
            throw;
        } catch (const std::exception& e) {
            fail(stage, e.what(), std::move(record));
        }
        record.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        record.status = "completed";
        fs::remove_all(layout_.shards(stage));
        manifest_.stages.push_back(std::move(record));
        save();
        log(key + ": completed");
    }

    StageName first_enabled() const {
        for (auto s : kStageOrder) {
            if (config_.enabled(s)) return s;
        }
        return StageName::extract;
    }

    std::vector<std::vector<fs::path>> shard_inputs(StageName stage, const std::vector<fs::path>& inputs) {
        std::vector<std::vector<fs::path>> out;
        if (shards_ <= 1) return {inputs};
        if (stage == StageName::extract) {
            // WARC inputs are sharded by file; a shard may be empty.
            for (std::size_t k = 0; k < shards_; ++k) {
                out.emplace_back(inputs.begin() + static_cast<std::ptrdiff_t>(inputs.size() * k / shards_),
                                 inputs.begin() + static_cast<std::ptrdiff_t>(inputs.size() * (k + 1) / shards_));
            }
            return out;
        }
        fs::create_directories(layout_.shards(stage));
        for (const auto& part : split_records(inputs, shards_, layout_.shards(stage))) out.push_back({part});
        return out;
    }

    ojson execute(StageName stage, const std::vector<fs::path>& inputs, const std::string& digest) {
        const auto output = layout_.output(stage);
        const auto rejects = layout_.rejects(stage);
        const std::size_t workers = config_.workers;
        if (shards_ > 1) fs::create_directories(layout_.shards(stage));
        switch (stage) {
            case StageName::extract: {
                warc::ExtractOptions opts;
                opts.language = config_.extract.language;
                opts.dump_override = config_.extract.dump;
                return run_sharded(layout_.shards(stage), shard_inputs(stage, inputs), workers, digest, output, rejects,
                                   [opts](const std::vector<fs::path>& in, const fs::path& out, const fs::path& rej,
                                          std::size_t) {
                                       warc::Extractor extractor(opts);
                                       warc::ExtractCounters counters;
                                       corpus::RecordWriter kept(out), rejected(rej);
                                       for (const auto& p : in) {
                                           extractor.process_file(
                                               p, [&](const corpus::Document& d) { kept.write(d); },
                                               [&](const corpus::Document& d) { rejected.write(d); }, counters);
                                       }
                                       kept.commit();
                                       rejected.commit();
                                       return to_json(counters);
                                   });
            }
            case StageName::clean: {
                const auto& rules = config_.clean.rules;
                return run_sharded(layout_.shards(stage), shard_inputs(stage, inputs), workers, digest, output, rejects,
                                   [&rules](const std::vector<fs::path>& in, const fs::path& out, const fs::path& rej,
                                            std::size_t w) {
                                       return heuristic::run_clean_stage(in, out, rules, {w, rej}).to_json();
                                   });
            }
            case StageName::dedup: {
                dedup::DedupStageOptions opts;
                opts.threshold = config_.dedup.threshold;
                opts.num_perm = config_.dedup.num_perm;
                opts.seed = config_.dedup_seed();
                opts.shingle_size = config_.dedup.shingle_size;
                opts.workers = workers;
                if (config_.dedup.bands && config_.dedup.rows) opts.bands_rows = {*config_.dedup.bands, *config_.dedup.rows};
                if (config_.dedup.signature_cache) {
                    fs::create_directories(layout_.signature_cache().parent_path());
                    opts.signature_cache = layout_.signature_cache();
                }
                opts.rejects = rejects;
                opts.clusters = layout_.clusters();
                auto r = dedup::run_dedup_stage(inputs, output, opts);
                return {{"bands", r.plan.bands},
                        {"rows", r.plan.rows},
                        {"documents", r.stats.documents},
                        {"candidate_pairs", r.stats.candidate_pairs},
                        {"merges", r.stats.merges},
                        {"clusters", r.stats.clusters},
                        {"duplicates", r.stats.duplicates},
                        {"kept", r.kept},
                        {"removed", r.removed},
                        {"malformed", r.malformed}};
            }
            case StageName::safety: {
                auto resources = std::make_shared<safety::SafetyResources>();
                const auto& sc = config_.safety;
                if (sc.domains) resources->domains = safety::DomainBlocklist::load(*sc.domains);
                if (sc.words) resources->blockwords = safety::BlockwordMatcher::load(*sc.words);
                std::optional<safety::PiiRegistry> pii;
                if (sc.pii) {
                    pii = safety::PiiRegistry::load(*sc.pii);
                    resources->pii = &*pii;
                }
                scorers_.toxicity = safety_scorer("toxicity", sc.toxicity_cmd, sc.toxicity_lexicon);
                scorers_.pornography = safety_scorer("pornography", sc.porn_cmd, sc.porn_lexicon);
                resources->toxicity = scorers_.toxicity.get();
                resources->pornography = scorers_.pornography.get();
                safety::SafetyThresholds thresholds{sc.toxicity_threshold, sc.porn_threshold, sc.fail_closed};
                auto merged = run_sharded(
                    layout_.shards(stage), shard_inputs(stage, inputs), workers, digest, output, rejects,
                    [&](const std::vector<fs::path>& in, const fs::path& out, const fs::path& rej, std::size_t w) {
                        auto r = safety::run_safety_stage(in, out, *resources, thresholds, {w, rej});
                        auto j = r.counters.to_json();
                        j["malformed"] = r.malformed;
                        return j;
                    });
                // Fractions do not add across shards; recompute from the totals.
                const double docs = merged.at("documents").get<double>();
                for (auto it = merged["flagged"].begin(); it != merged["flagged"].end(); ++it) {
                    merged["flagged_fraction"][it.key()] = docs == 0 ? 0.0 : it->get<double>() / docs;
                }
                return merged;
            }
            case StageName::quality: {
                const auto& qc = config_.quality;
                scorers_.ad = qc.ad_cmd ? std::unique_ptr<safety::Scorer>(std::make_unique<safety::CommandScorer>("ad", *qc.ad_cmd))
                                        : std::make_unique<safety::LexiconScorer>(quality::baseline_ad_scorer());
                scorers_.fluency = qc.fluency_cmd
                                       ? std::unique_ptr<safety::Scorer>(std::make_unique<safety::CommandScorer>("fluency", *qc.fluency_cmd))
                                       : std::make_unique<quality::BaselineFluencyScorer>();
                quality::QualityStageOptions opts;
                opts.token_budget = qc.budget_tokens;
                opts.rank = {qc.w_flu, qc.w_ad};
                if (!qc.fluency_weights.empty()) opts.fluency_weights = quality::FluencyWeights(qc.fluency_weights);
                opts.ad_threshold = qc.ad_threshold;
                opts.exclude_ads = qc.exclude_ads;
                opts.require_good_fluency = qc.require_good_fluency;
                opts.workers = workers;
                opts.rejects = rejects;
                return quality::run_quality_stage(inputs, output, *scorers_.ad, *scorers_.fluency, opts).to_json();
            }
        }
        return ojson::object();
    }

    void finish() {
        std::vector<corpus::StageStats> chain;
        for (const auto& r : manifest_.stages) {
            if (r.crawl_stats) chain.push_back(*r.crawl_stats);
            if (chain.empty()) {
                if (first_input_stats_) {
                    chain.push_back(*first_input_stats_);
                } else {
                    const FileScan in = scan_records(config_.inputs);
                    chain.push_back(corpus::StageStats{corpus::Phase::raw, in.documents, in.bytes, in.tokens});
                }
            }
            chain.push_back(r.output_stats);
        }
        try {
            manifest_.stage_stats = metrics::retention_report(chain).stages;
        } catch (const metrics::RetentionError& e) {
            const auto stage = manifest_.stages.back().stage;
            manifest_.status = "failed";
            manifest_.failed_stage = std::string(to_string(stage));
            manifest_.error = e.what();
            save();
            throw StageFailure(stage, e.what());
        }
        manifest_.status = "completed";
        save();
        write_reports(layout_.dir, manifest_, config_.report);
    }

    const PipelineConfig& config_;
    const RunOptions& options_;
    RunLayout layout_;
    RunManifest previous_;
    RunManifest manifest_;
    ojson snapshot_;
    std::size_t shards_ = 1;
    Scorers scorers_;
    std::optional<corpus::StageStats> first_input_stats_;
};

std::string default_run_id() {
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "run-%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config, const RunOptions& options) {
    auto diagnostics = validate_config(config);
    for (const auto& d : diagnostics) {
        if (options.log && d.severity == Diagnostic::Severity::warning) *options.log << "warning: " << d.message << "\n";
    }
    if (has_errors(diagnostics)) {
        std::string msg = "invalid configuration:";
        for (const auto& d : diagnostics) {
            if (d.severity == Diagnostic::Severity::error) msg += "\n  " + d.message;
        }
        throw ConfigError(msg);
    }
    if (options.shards && *options.shards == 0) throw ConfigError("shards must be at least 1");

    const std::string run_id = options.run_id ? *options.run_id : config.run_id.value_or(default_run_id());
    if (run_id.empty() || run_id.find('/') != std::string::npos || run_id == "." || run_id == "..") {
        throw ConfigError("invalid run id '" + run_id + "'");
    }
    RunLayout layout{config.work_dir / run_id};
    RunManifest previous;
    if (options.resume) {
        previous = read_manifest(layout.dir);
    } else if (fs::exists(layout.manifest())) {
        throw ConfigError("run " + run_id + " already exists in " + config.work_dir.string() + "; use --resume");
    }
    previous.run_id = run_id;
    return Runner(config, options, layout, std::move(previous)).run();
}

void write_reports(const fs::path& run_dir, const RunManifest& manifest, const ReportBlock& report) {
    RunLayout layout{run_dir};
    const auto dir = layout.reports();
    fs::create_directories(dir);
    auto emit = [&](const std::string& name, const ojson& j, const std::string& table) {
        util::write_file_atomic(dir / (name + ".json"), j.dump(2) + "\n");
        util::write_file_atomic(dir / (name + ".txt"), table);
    };

    auto retention = metrics::retention_report(manifest.stage_stats);
    emit("retention", metrics::to_json(retention), metrics::format_table(retention));

    const StageRecord* last = nullptr;
    for (const auto& s : manifest.stages) {
        if (s.status == "completed") last = &s;
    }
    if (!last) return;
    const auto final_output = layout.output(last->stage);

    metrics::CorpusStats stats;
    metrics::SignalCounter signals(report.signals);
    metrics::YearVolumeCounter volumes;
    std::map<std::string, std::vector<double>> safety_scores;
    corpus::RecordReader reader(final_output);
    while (auto item = reader.next()) {
        if (!std::holds_alternative<corpus::Document>(*item)) continue;
        const auto& d = std::get<corpus::Document>(*item);
        stats.add(metrics::doc_stats(d.text));
        signals.add(d);
        volumes.add(d);
        if (d.safety) {
            if (d.safety->toxicity) safety_scores["toxicity"].push_back(*d.safety->toxicity);
            if (d.safety->pornography) safety_scores["pornography"].push_back(*d.safety->pornography);
        }
    }
    auto stats_json = stats.to_json(report.histogram_bins);
    stats_json["source"] = final_output.filename().string();
    emit("stats", stats_json, "source: " + final_output.filename().string() + "\n" + stats.format_table());

    std::optional<metrics::SampledCounts> sampled;
    if (report.annotations) sampled = metrics::load_sampled_annotations(*report.annotations);
    auto signal_report = signals.report(sampled);
    emit("signals", metrics::to_json(signal_report), metrics::format_table(signal_report));

    auto vols = volumes.volumes();
    emit("volumes", metrics::to_json(vols), metrics::format_table(vols));

    if (!safety_scores.empty()) {
        auto rows = metrics::auc_report(safety_scores);
        emit("auc", metrics::to_json(rows), metrics::format_table(rows));
    }
}

}  // namespace refinery::pipeline
