// refinery: command-line front end for the corpus pipeline and its stages.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>
#include <variant>

#include "refinery/corpus/record_io.hpp"
#include "refinery/dedup/stage.hpp"
#include "refinery/heuristic/stage.hpp"
#include "refinery/metrics/distribution.hpp"
#include "refinery/metrics/doc_stats.hpp"
#include "refinery/metrics/retention.hpp"
#include "refinery/metrics/sampling.hpp"
#include "refinery/metrics/signals.hpp"
#include "refinery/pipeline/config.hpp"
#include "refinery/pipeline/run.hpp"
#include "refinery/quality/labels.hpp"
#include "refinery/quality/stage.hpp"
#include "refinery/safety/gate.hpp"
#include "refinery/util/io.hpp"
#include "refinery/util/toml.hpp"
#include "refinery/warc/extract.hpp"

using namespace refinery;
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

// Thrown for bad arguments or unreadable inputs (exit code 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require_inputs(const std::vector<std::string>& inputs) {
    for (const auto& in : inputs) {
        if (!fs::exists(in)) throw UsageError("input " + in + " does not exist");
    }
}

std::vector<fs::path> paths(const std::vector<std::string>& in) { return {in.begin(), in.end()}; }

void emit_report(const std::string& report, const ojson& j, const std::string& table) {
    std::cout << table;
    if (!report.empty()) util::write_file_atomic(report, j.dump(2) + "\n");
}

void print_json(const ojson& j) { std::cerr << j.dump(2) << "\n"; }

std::unique_ptr<safety::Scorer> lexicon_or_command(const std::string& name, const std::string& cmd, const std::string& lexicon) {
    if (!cmd.empty()) return std::make_unique<safety::CommandScorer>(name, cmd);
    if (!lexicon.empty()) {
        return std::make_unique<safety::LexiconScorer>(name, safety::BlockwordMatcher::load(lexicon),
                                                       safety::kToxicityLexiconWeight);
    }
    return nullptr;
}

std::optional<pipeline::StageName> stage_flag(const std::string& value) {
    if (value.empty()) return std::nullopt;
    auto s = pipeline::parse_stage_name(value);
    if (!s) throw UsageError("unknown stage '" + value + "'");
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Web-text corpus refinement pipeline"};
    app.require_subcommand(1);
    std::function<int()> action;

    // extract
    std::vector<std::string> x_in;
    std::string x_out, x_rejects, x_lang = "en", x_dump;
    auto* extract = app.add_subcommand("extract", "WARC responses to raw text records");
    extract->add_option("--input", x_in, "WARC files (plain or per-record gzip)")->required();
    extract->add_option("--output", x_out, "Output record file")->required();
    extract->add_option("--lang", x_lang, "Language to keep; empty keeps all");
    extract->add_option("--rejects", x_rejects, "Rejected records (empty extraction, language)");
    extract->add_option("--dump", x_dump, "Dump id for every record, overriding file names and dates");
    extract->callback([&] {
        action = [&] {
            require_inputs(x_in);
            warc::ExtractOptions opts;
            opts.language = x_lang;
            if (!x_dump.empty()) opts.dump_override = x_dump;
            warc::Extractor extractor(opts);
            warc::ExtractCounters counters;
            corpus::RecordWriter kept(x_out);
            std::optional<corpus::RecordWriter> rejected;
            if (!x_rejects.empty()) rejected.emplace(x_rejects);
            for (const auto& in : x_in) {
                extractor.process_file(
                    in, [&](const corpus::Document& d) { kept.write(d); },
                    [&](const corpus::Document& d) {
                        if (rejected) rejected->write(d);
                    },
                    counters);
            }
            kept.commit();
            if (rejected) rejected->commit();
            std::fprintf(stderr, "records %zu, html pages %zu, kept %zu, empty %zu, other language %zu, errors %zu\n",
                         counters.records, counters.html_pages, counters.kept, counters.empty, counters.wrong_language,
                         counters.errors);
            return kExitOk;
        };
    });

    // clean
    std::vector<std::string> c_in;
    std::string c_out, c_rules, c_rejects;
    std::size_t c_workers = 1;
    auto* clean = app.add_subcommand("clean", "Normalise, scrub and apply the heuristic drop rules");
    clean->add_option("--input", c_in, "Record files")->required();
    clean->add_option("--output", c_out, "Output record file")->required();
    clean->add_option("--rules", c_rules, "Key-value file overriding thresholds, patterns and word lists");
    clean->add_option("--rejects", c_rejects, "Dropped records with their outcome");
    clean->add_option("--workers", c_workers, "Worker threads")->check(CLI::PositiveNumber);
    clean->callback([&] {
        action = [&] {
            require_inputs(c_in);
            heuristic::HeuristicConfig rules;
            try {
                if (!c_rules.empty()) rules = heuristic::load_config(c_rules);
            } catch (const std::exception& e) {
                throw UsageError(std::string("rules: ") + e.what());
            }
            heuristic::CleanStageOptions opts{c_workers, std::nullopt};
            if (!c_rejects.empty()) opts.rejects = c_rejects;
            print_json(heuristic::run_clean_stage(paths(c_in), c_out, rules, opts).to_json());
            return kExitOk;
        };
    });

    // dedup
    std::vector<std::string> d_in;
    std::string d_out, d_clusters, d_rejects, d_cache;
    double d_threshold = 0.7;
    std::size_t d_num_perm = dedup::kDefaultNumPerm, d_shingle = dedup::kDefaultShingleSize, d_workers = 1, d_bands = 0, d_rows = 0;
    std::uint64_t d_seed = dedup::kDefaultSeed;
    auto* dd = app.add_subcommand("dedup", "MinHash-LSH near-duplicate removal");
    dd->add_option("--input", d_in, "Record files")->required();
    dd->add_option("--output", d_out, "Output record file")->required();
    dd->add_option("--threshold", d_threshold, "Jaccard threshold")->check(CLI::Range(0.0, 1.0));
    dd->add_option("--num-perm", d_num_perm, "Signature length")->check(CLI::Range(2, 1 << 16));
    dd->add_option("--seed", d_seed, "Hash family seed");
    dd->add_option("--shingle", d_shingle, "Words per shingle")->check(CLI::PositiveNumber);
    dd->add_option("--bands", d_bands, "Fixed band count (with --rows)");
    dd->add_option("--rows", d_rows, "Fixed rows per band (with --bands)");
    dd->add_option("--clusters", d_clusters, "One JSON line per duplicate cluster");
    dd->add_option("--rejects", d_rejects, "Removed duplicates");
    dd->add_option("--signature-cache", d_cache, "Signature cache file, reused when num_perm and seed match");
    dd->add_option("--workers", d_workers, "Worker threads")->check(CLI::PositiveNumber);
    dd->callback([&] {
        action = [&] {
            require_inputs(d_in);
            dedup::DedupStageOptions opts;
            opts.threshold = d_threshold;
            opts.num_perm = d_num_perm;
            opts.seed = d_seed;
            opts.shingle_size = d_shingle;
            opts.workers = d_workers;
            if ((d_bands == 0) != (d_rows == 0)) throw UsageError("--bands and --rows go together");
            if (d_bands) {
                if (d_bands * d_rows > d_num_perm) throw UsageError("bands * rows exceeds num-perm");
                opts.bands_rows = {d_bands, d_rows};
            }
            if (d_threshold <= 0.0 || d_threshold >= 1.0) throw UsageError("threshold must be strictly between 0 and 1");
            if (!d_clusters.empty()) opts.clusters = d_clusters;
            if (!d_rejects.empty()) opts.rejects = d_rejects;
            if (!d_cache.empty()) opts.signature_cache = d_cache;
            auto r = dedup::run_dedup_stage(paths(d_in), d_out, opts);
            print_json({{"bands", r.plan.bands},
                        {"rows", r.plan.rows},
                        {"documents", r.stats.documents},
                        {"candidate_pairs", r.stats.candidate_pairs},
                        {"clusters", r.stats.clusters},
                        {"duplicates", r.stats.duplicates},
                        {"kept", r.kept},
                        {"removed", r.removed},
                        {"cache_hits", r.cache_hits},
                        {"malformed", r.malformed}});
            return kExitOk;
        };
    });

    // safety
    std::vector<std::string> s_in;
    std::string s_out, s_rejects, s_domains, s_words, s_pii, s_tox_cmd, s_porn_cmd, s_tox_lex, s_porn_lex;
    double s_threshold = 0.2;
    bool s_fail_closed = false;
    std::size_t s_workers = 1;
    auto* sf = app.add_subcommand("safety", "Blocklists, toxicity/pornography scoring and PII masking");
    sf->add_option("--input", s_in, "Record files")->required();
    sf->add_option("--output", s_out, "Output record file")->required();
    sf->add_option("--rejects", s_rejects, "Discarded records with annotations");
    sf->add_option("--domains", s_domains, "Domain blocklist, one per line");
    sf->add_option("--words", s_words, "Blockword list, one word or phrase per line");
    sf->add_option("--pii", s_pii, "PII pattern registry (TOML)");
    sf->add_option("--toxicity-cmd", s_tox_cmd, "Toxicity scorer command");
    sf->add_option("--porn-cmd", s_porn_cmd, "Pornography scorer command");
    sf->add_option("--toxicity-lexicon", s_tox_lex, "Lexicon stand-in for the toxicity scorer");
    sf->add_option("--porn-lexicon", s_porn_lex, "Lexicon stand-in for the pornography scorer");
    sf->add_option("--threshold", s_threshold, "Flag when score > threshold")->check(CLI::Range(0.0, 1.0));
    sf->add_flag("--fail-closed", s_fail_closed, "Discard documents whose scorer failed");
    sf->add_option("--workers", s_workers, "Worker threads")->check(CLI::PositiveNumber);
    sf->callback([&] {
        action = [&] {
            require_inputs(s_in);
            safety::SafetyResources res;
            std::optional<safety::PiiRegistry> pii;
            try {
                if (!s_domains.empty()) res.domains = safety::DomainBlocklist::load(s_domains);
                if (!s_words.empty()) res.blockwords = safety::BlockwordMatcher::load(s_words);
                if (!s_pii.empty()) {
                    pii = safety::PiiRegistry::load(s_pii);
                    res.pii = &*pii;
                }
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            auto tox = lexicon_or_command("toxicity", s_tox_cmd, s_tox_lex);
            auto porn = lexicon_or_command("pornography", s_porn_cmd, s_porn_lex);
            res.toxicity = tox.get();
            res.pornography = porn.get();
            safety::SafetyStageOptions opts{s_workers, std::nullopt};
            if (!s_rejects.empty()) opts.rejects = s_rejects;
            auto r = safety::run_safety_stage(paths(s_in), s_out, res, {s_threshold, s_threshold, s_fail_closed}, opts);
            print_json(r.counters.to_json());
            return kExitOk;
        };
    });

    // quality
    std::vector<std::string> q_in;
    std::string q_out, q_rejects, q_ad_cmd, q_flu_cmd;
    std::uint64_t q_budget = 1000000;
    double q_w_flu = 0.5, q_w_ad = 0.5, q_ad_threshold = quality::kDefaultAdThreshold;
    bool q_exclude_ads = false, q_require_fluency = false;
    std::size_t q_workers = 1;
    auto* qu = app.add_subcommand("quality", "Ad/fluency scoring and token-budgeted selection");
    qu->add_option("--input", q_in, "Record files; each file is ranked as one run")->required();
    qu->add_option("--output", q_out, "Output record file")->required();
    qu->add_option("--rejects", q_rejects, "Unselected records");
    qu->add_option("--budget-tokens", q_budget, "Token budget");
    qu->add_option("--ad-cmd", q_ad_cmd, "Advertisement scorer command");
    qu->add_option("--fluency-cmd", q_flu_cmd, "Fluency scorer command");
    qu->add_option("--w-flu", q_w_flu, "Fluency weight")->check(CLI::NonNegativeNumber);
    qu->add_option("--w-ad", q_w_ad, "Advertisement weight")->check(CLI::NonNegativeNumber);
    qu->add_option("--ad-threshold", q_ad_threshold, "is_ad when score > threshold")->check(CLI::Range(0.0, 1.0));
    qu->add_flag("--exclude-ads", q_exclude_ads, "Drop advertisements before ranking");
    qu->add_flag("--require-good-fluency", q_require_fluency, "Drop fluency <= 0.5 before ranking");
    qu->add_option("--workers", q_workers, "Worker threads")->check(CLI::PositiveNumber);
    qu->callback([&] {
        action = [&] {
            require_inputs(q_in);
            if (q_w_flu + q_w_ad <= 0) throw UsageError("weights must not both be zero");
            std::unique_ptr<safety::Scorer> ad, flu;
            if (q_ad_cmd.empty()) {
                ad = std::make_unique<safety::LexiconScorer>(quality::baseline_ad_scorer());
            } else {
                ad = std::make_unique<safety::CommandScorer>("ad", q_ad_cmd);
            }
            if (q_flu_cmd.empty()) {
                flu = std::make_unique<quality::BaselineFluencyScorer>();
            } else {
                flu = std::make_unique<safety::CommandScorer>("fluency", q_flu_cmd);
            }
            quality::QualityStageOptions opts;
            opts.token_budget = q_budget;
            opts.rank = {q_w_flu, q_w_ad};
            opts.ad_threshold = q_ad_threshold;
            opts.exclude_ads = q_exclude_ads;
            opts.require_good_fluency = q_require_fluency;
            opts.workers = q_workers;
            if (!q_rejects.empty()) opts.rejects = q_rejects;
            print_json(quality::run_quality_stage(paths(q_in), q_out, *ad, *flu, opts).to_json());
            return kExitOk;
        };
    });

    // stats
    std::vector<std::string> st_in;
    std::string st_report;
    std::size_t st_bins = 20;
    auto* stats = app.add_subcommand("stats", "Per-document statistics and histograms");
    stats->add_option("--input", st_in, "Record files")->required();
    stats->add_option("--report", st_report, "JSON report path");
    stats->add_option("--bins", st_bins, "Histogram bins")->check(CLI::PositiveNumber);
    stats->callback([&] {
        action = [&] {
            require_inputs(st_in);
            metrics::CorpusStats cs;
            for (const auto& in : st_in) {
                corpus::RecordReader reader(in);
                while (auto item = reader.next()) {
                    if (auto* d = std::get_if<corpus::Document>(&*item)) cs.add(metrics::doc_stats(d->text));
                }
            }
            emit_report(st_report, cs.to_json(st_bins), cs.format_table());
            return kExitOk;
        };
    });

    // signals
    std::vector<std::string> sg_in;
    std::string sg_report, sg_annotations, sg_config;
    auto* signals = app.add_subcommand("signals", "Corpus quality-signal ratios");
    signals->add_option("--input", sg_in, "Record files")->required();
    signals->add_option("--report", sg_report, "JSON report path");
    signals->add_option("--annotations", sg_annotations, "Sampled annotation counts (JSON)");
    signals->add_option("--config", sg_config, "TOML overrides for the machine rules");
    signals->callback([&] {
        action = [&] {
            require_inputs(sg_in);
            metrics::SignalConfig config;
            std::optional<metrics::SampledCounts> sampled;
            try {
                if (!sg_config.empty()) metrics::apply_overrides(config, util::parse_toml_file(sg_config));
                if (!sg_annotations.empty()) sampled = metrics::load_sampled_annotations(sg_annotations);
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            metrics::SignalCounter counter(config);
            for (const auto& in : sg_in) {
                corpus::RecordReader reader(in);
                while (auto item = reader.next()) {
                    if (auto* d = std::get_if<corpus::Document>(&*item)) counter.add(*d);
                }
            }
            auto report = counter.report(sampled);
            emit_report(sg_report, metrics::to_json(report), metrics::format_table(report));
            return kExitOk;
        };
    });

    // auc
    std::string a_in, a_report;
    std::size_t a_points = 101;
    auto* auc = app.add_subcommand("auc", "Exceedance curves and their area from a score file");
    auc->add_option("--input", a_in, "Score file: one JSON object per line with id and per-dimension scores")->required();
    auc->add_option("--report", a_report, "JSON report path");
    auc->add_option("--points", a_points, "Threshold grid points")->check(CLI::Range(2, 100001));
    auc->callback([&] {
        action = [&] {
            require_inputs({a_in});
            std::map<std::string, std::vector<double>> scores;
            try {
                scores = metrics::load_score_file(a_in);
            } catch (const metrics::ScoreFileError& e) {
                throw UsageError(e.what());
            }
            auto rows = metrics::auc_report(scores, metrics::threshold_grid(a_points));
            emit_report(a_report, metrics::to_json(rows), metrics::format_table(rows));
            return kExitOk;
        };
    });

    // retention
    std::string r_in, r_report;
    auto* retention = app.add_subcommand("retention", "Removal and retention rates from stage counts");
    retention->add_option("--input", r_in, "Manifest or JSON list of {phase, documents, bytes, tokens}")->required();
    retention->add_option("--report", r_report, "JSON report path");
    retention->callback([&] {
        action = [&] {
            require_inputs({r_in});
            ojson j;
            try {
                j = ojson::parse(util::read_file(r_in));
            } catch (const std::exception& e) {
                throw UsageError(e.what());
            }
            const ojson& stages = j.is_object() && j.contains("stage_stats") ? j["stage_stats"] : j;
            auto rep = metrics::retention_report(metrics::stage_stats_from_json(stages));
            emit_report(r_report, metrics::to_json(rep), metrics::format_table(rep));
            return kExitOk;
        };
    });

    // run
    std::string run_config, run_resume, run_id, run_stop, run_fail;
    std::size_t run_shards = 0;
    bool run_check = false;
    auto* run = app.add_subcommand("run", "Run the full pipeline from a config file");
    run->add_option("--config", run_config, "Pipeline config (TOML)")->required();
    run->add_option("--resume", run_resume, "Continue the named run");
    run->add_option("--run-id", run_id, "Name of a new run");
    run->add_option("--shards", run_shards, "Shard count (overrides the config)")->check(CLI::PositiveNumber);
    run->add_flag("--check", run_check, "Validate the config and exit");
    run->add_option("--stop-after", run_stop, "Stop after this stage")->group("");
    run->add_option("--fail-at", run_fail, "Fail as this stage starts")->group("");
    run->callback([&] {
        action = [&] {
            auto config = pipeline::load_config(run_config);
            auto diagnostics = pipeline::validate_config(config);
            const bool failed = pipeline::has_errors(diagnostics);
            for (const auto& d : diagnostics) {
                // run_pipeline logs warnings itself.
                if (d.severity == pipeline::Diagnostic::Severity::error) {
                    std::cerr << "error: " << d.message << "\n";
                } else if (run_check || failed) {
                    std::cerr << "warning: " << d.message << "\n";
                }
            }
            if (failed) return kExitConfig;
            if (run_check) return kExitOk;
            pipeline::RunOptions opts;
            if (!run_resume.empty()) {
                opts.resume = true;
                opts.run_id = run_resume;
            } else if (!run_id.empty()) {
                opts.run_id = run_id;
            }
            if (run_shards) opts.shards = run_shards;
            opts.stop_after = stage_flag(run_stop);
            opts.fail_at = stage_flag(run_fail);
            opts.log = &std::cerr;
            auto manifest = pipeline::run_pipeline(config, opts);
            const fs::path dir = config.work_dir / manifest.run_id;
            std::cout << "run " << manifest.run_id << " " << manifest.status << ": " << dir.string() << "\n";
            if (manifest.status == "completed") std::cout << util::read_file(dir / "reports" / "retention.txt");
            return kExitOk;
        };
    });

    // report
    std::string rep_run, rep_work_dir = "runs", rep_config;
    auto* report = app.add_subcommand("report", "Re-emit the reports of a finished run");
    report->add_option("run", rep_run, "Run id or run directory")->required();
    report->add_option("--work-dir", rep_work_dir, "Directory holding runs");
    report->add_option("--config", rep_config, "Take the work directory from this pipeline config");
    report->callback([&] {
        action = [&] {
            fs::path work_dir = rep_config.empty() ? fs::path(rep_work_dir) : pipeline::load_config(rep_config).work_dir;
            fs::path dir = fs::is_directory(rep_run) ? fs::path(rep_run) : work_dir / rep_run;
            if (!fs::exists(dir / "manifest.json")) throw UsageError("no run at " + dir.string());
            auto manifest = pipeline::read_manifest(dir);
            if (manifest.status != "completed") throw UsageError("run " + manifest.run_id + " is " + manifest.status);
            pipeline::write_reports(dir, manifest, pipeline::report_block_from_snapshot(manifest.config));
            for (const char* name : {"retention", "stats", "signals", "volumes", "auc"}) {
                auto txt = dir / "reports" / (std::string(name) + ".txt");
                if (fs::exists(txt)) std::cout << "== " << name << "\n" << util::read_file(txt) << "\n";
            }
            return kExitOk;
        };
    });

    // sample
    std::string sm_in, sm_out;
    std::vector<std::size_t> sm_quotas = {2000, 1000, 2000};
    std::uint64_t sm_seed = 1;
    auto* sample = app.add_subcommand("sample", "Tercile-stratified sample of a per-document scalar file");
    sample->add_option("--input", sm_in, "JSON lines {id, value}")->required();
    sample->add_option("--output", sm_out, "JSON lines {id, value, stratum}")->required();
    sample->add_option("--quotas", sm_quotas, "Low, middle and high quotas")->expected(3)->delimiter(',');
    sample->add_option("--seed", sm_seed, "Sampling seed");
    sample->callback([&] {
        action = [&] {
            require_inputs({sm_in});
            std::vector<metrics::ScalarRecord> records;
            try {
                records = metrics::load_scalar_file(sm_in);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            auto s = metrics::stratified_sample(std::move(records), {sm_quotas[0], sm_quotas[1], sm_quotas[2]}, sm_seed);
            std::ostringstream out;
            static constexpr const char* kStrata[] = {"low", "middle", "high"};
            for (int k = 0; k < 3; ++k) {
                for (const auto& r : s.strata[k]) out << ojson{{"id", r.id}, {"value", r.value}, {"stratum", kStrata[k]}}.dump() << "\n";
                std::fprintf(stderr, "%s: %zu of %zu\n", kStrata[k], s.strata[k].size(), s.population[k]);
            }
            util::write_file_atomic(sm_out, out.str());
            return kExitOk;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }
    try {
        return action();
    } catch (const pipeline::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const util::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const pipeline::StageFailure& e) {
        std::cerr << "stage failure: " << e.what() << "\n";
        return kExitStage;
    } catch (const metrics::RetentionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return kExitStage;
    }
}
