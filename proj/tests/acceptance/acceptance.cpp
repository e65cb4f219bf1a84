// Acceptance gate: one PASS/FAIL line per headline criterion. Tolerances and
// time limits are fixed here; the process exits non-zero if any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "refinery/corpus/record_io.hpp"
#include "refinery/dedup/banding.hpp"
#include "refinery/dedup/cluster.hpp"
#include "refinery/dedup/minhash.hpp"
#include "refinery/heuristic/metrics.hpp"
#include "refinery/heuristic/rules.hpp"
#include "refinery/metrics/distribution.hpp"
#include "refinery/metrics/retention.hpp"
#include "refinery/pipeline/run.hpp"
#include "refinery/quality/selection.hpp"
#include "refinery/safety/gate.hpp"
#include "refinery/safety/pii.hpp"
#include "refinery/safety/scorer.hpp"
#include "refinery/util/random.hpp"
#include "support/dedup_corpus.hpp"
#include "support/pipeline_fixture.hpp"
#include "support/rule_fixtures.hpp"
#include "support/safety_corpus.hpp"
#include "support/temp_dir.hpp"

using namespace refinery;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool ok = true;
    std::string detail;
};

Verdict fail(std::string why) { return {false, std::move(why)}; }

std::string fmt(const char* format, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, format, a, b, c);
    return buf;
}

std::string data_file(const std::string& rel) { return std::string(REFINERY_TEST_DATA) + "/" + rel; }

// ---------------------------------------------------------------------------

Verdict rule_fidelity() {
    auto cases = testing::rule_boundary_cases();
    if (cases.size() != 36) return fail("expected 36 fixtures, have " + std::to_string(cases.size()));
    std::set<int> rules;
    for (const auto& c : cases) {
        rules.insert(c.rule);
        auto m = heuristic::compute_metrics(c.text);
        auto failing = heuristic::failing_rules(m, c.text);
        bool hit = std::find(failing.begin(), failing.end(), c.rule) != failing.end();
        if (hit != c.expect_fail) return fail(c.name + ": rule verdict flipped");
        if (!c.isolated) continue;
        auto outcome = heuristic::apply_drop_rules(m, c.text);
        if (c.expect_fail && (failing != std::vector<int>{c.rule} || outcome.rule_id != heuristic::rule_id(c.rule)))
            return fail(c.name + ": not isolated to its rule");
        if (!c.expect_fail && (!failing.empty() || !outcome.kept)) return fail(c.name + ": passing fixture dropped");
    }
    if (rules.size() != 18) return fail("fixtures cover " + std::to_string(rules.size()) + " rules");
    return {true, "36/36 boundary fixtures exact"};
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

Verdict minhash_estimator() {
    dedup::MinHasher hasher;
    util::Rng rng(2024);
    const int pairs = 1000;
    int within = 0;
    double bias = 0;
    for (int k = 0; k < pairs; ++k) {
        std::size_t shared = rng.below(150), only_a = rng.below(100), only_b = rng.below(100);
        if (shared + only_a + only_b == 0) shared = 1;
        std::string tag = std::to_string(rng.next()) + ":";
        auto s = numbered(tag + "s", shared);
        auto a = s, b = s;
        for (auto& x : numbered(tag + "a", only_a)) a.push_back(x);
        for (auto& x : numbered(tag + "b", only_b)) b.push_back(x);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double j = dedup::exact_jaccard(a, b);
        double est = dedup::estimate_jaccard(hasher.signature(a), hasher.signature(b));
        bias += est - j;
        if (std::abs(est - j) <= 4.0 * std::sqrt(j * (1.0 - j) / 128.0) + 1e-12) ++within;
    }
    bias /= pairs;
    double share = static_cast<double>(within) / pairs;
    Verdict v{share >= 0.99 && std::abs(bias) <= 0.02,
              fmt("%.1f%% within 4 sigma, mean bias %+.4f", 100 * share, bias)};
    return v;
}

Verdict dedup_oracle() {
    auto plan = dedup::optimal_bands(128, 0.7);
    std::size_t clusters = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        auto docs = testing::planted_corpus(seed);
        if (docs.size() != 200) return fail("corpus size " + std::to_string(docs.size()));
        std::size_t gap = 0;
        auto expected = testing::brute_force_clusters(docs, 0.7, &gap);
        if (gap) return fail("seed " + std::to_string(seed) + ": corpus has pairs between 0.5 and 0.85");
        auto got = testing::lsh_clusters(docs, {plan, 1});
        if (got != expected) return fail("seed " + std::to_string(seed) + ": clusters differ from all-pairs oracle");
        std::map<std::string, std::string> dump_of;
        for (const auto& d : docs) dump_of[d.id] = d.dump_id;
        for (const auto& c : got) {
            for (const auto& m : c.members) {
                if (dump_of[m] > dump_of[c.survivor]) return fail("survivor " + c.survivor + " is not from the newest dump");
            }
            if (c.members.size() > 1) ++clusters;
        }
    }
    return {true, std::to_string(clusters) + " planted clusters over 20 seeds match exactly"};
}

Verdict banding_plan() {
    std::ifstream in(data_file("dedup/optimal_bands.golden"));
    std::string line;
    std::size_t b = 0, r = 0;
    double golden_objective = -1;
    while (std::getline(in, line)) {
        std::istringstream f(line);
        std::size_t n = 0;
        double t = 0;
        if (line.empty() || line[0] == '#' || !(f >> n >> t) || n != 128 || t != 0.7) continue;
        f >> b >> r >> golden_objective;
    }
    if (golden_objective < 0) return fail("golden row for (128, 0.7) missing");
    auto plan = dedup::optimal_bands(128, 0.7);
    if (plan.bands != b || plan.rows != r) return fail("plan differs from golden");
    double chosen = dedup::banding_objective(plan);
    if (std::abs(chosen - golden_objective) > 1e-12) return fail("objective differs from golden");
    std::size_t checked = 0;
    for (std::size_t bb = 1; bb <= 128; ++bb) {
        for (std::size_t rr = 1; bb * rr <= 128; ++rr) {
            ++checked;
            if (dedup::banding_objective({bb, rr, 0.7}) < chosen - 1e-12)
                return fail("(" + std::to_string(bb) + "," + std::to_string(rr) + ") beats the chosen plan");
        }
    }
    return {true, "b=" + std::to_string(b) + " r=" + std::to_string(r) + ", minimal over " + std::to_string(checked) +
                      " plans"};
}

Verdict auc_oracle() {
    std::ifstream in(data_file("metrics/auc_curves.jsonl"));
    std::string line;
    int curves = 0;
    double worst = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        metrics::ScoreCurve c{j["thresholds"].get<std::vector<double>>(), j["percentages"].get<std::vector<double>>()};
        worst = std::max(worst, std::abs(metrics::auc(c) - j["auc"].get<double>()));
        ++curves;
    }
    if (curves != 100) return fail(std::to_string(curves) + " oracle curves");
    double hand = metrics::auc({{0, 0.5, 1}, {100, 50, 0}});
    return {worst <= 1e-9 && hand == 50.0, fmt("max error %.2e over 100 curves, hand case %.17g", worst, hand)};
}

Verdict pii_masking() {
    std::ifstream in(data_file("pii/golden.jsonl"));
    std::string line;
    int cases = 0;
    std::set<std::string> types;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        auto r = safety::mask_pii(j["input"].get<std::string>());
        if (r.masked != j["expected"].get<std::string>()) return fail(j["name"].get<std::string>() + ": mismatch");
        if (safety::mask_pii(r.masked).masked != r.masked) return fail(j["name"].get<std::string>() + ": not idempotent");
        for (const auto& s : r.spans) types.insert(s.type);
        ++cases;
    }
    if (cases != 50) return fail(std::to_string(cases) + " golden cases");
    if (types.size() != 8) return fail(std::to_string(types.size()) + " PII types exercised");
    if (!safety::mask_pii("256.1.1.1").spans.empty()) return fail("256.1.1.1 masked");
    return {true, "50/50 byte-exact, 8 types, idempotent"};
}

Verdict safety_accounting() {
    testing::TempDir dir;
    safety::SafetyResources res;
    for (const auto& d : testing::planted_blocked_domains()) res.domains.add(d);
    res.blockwords = safety::BlockwordMatcher(testing::planted_blockwords());
    safety::CommandScorer tox("toxicity", STUB_SCORER);
    res.toxicity = &tox;
    corpus::write_records(testing::planted_safety_corpus(1), dir / "in.jsonl");
    safety::SafetyStageOptions options;
    options.workers = 4;
    auto c = safety::run_safety_stage({dir / "in.jsonl"}, dir / "out.jsonl", res, {}, options).counters;
    double dom = c.flagged_fraction(c.domain_flagged), bw = c.flagged_fraction(c.blockword_flagged),
           tx = c.flagged_fraction(c.toxicity_flagged);
    bool ok = c.documents == 1000 && dom == 0.05 && bw == 0.03 && tx == 0.04 && c.scorer_failures == 0;
    return {ok, fmt("domain %.3f, blockwords %.3f, toxicity %.3f", dom, bw, tx)};
}

Verdict quality_selection() {
    std::vector<quality::Candidate> cands;
    std::ifstream in(data_file("quality/candidates.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        cands.push_back({j["id"], j["tokens"].get<std::uint64_t>(),
                         quality::combined_score(j["fluency"].get<double>(), j["ad"].get<double>()), cands.size()});
    }
    auto exp = nlohmann::json::parse(util::read_file(data_file("quality/expected_selection.json")));
    if (cands.size() != 1000) return fail(std::to_string(cands.size()) + " candidates");
    std::uint64_t budget = exp["budget"];
    auto sel = quality::select_high_quality(cands, budget);
    std::vector<std::string> ids;
    for (auto i : sel.selected) ids.push_back(cands[i].id);
    if (ids != exp["selected"].get<std::vector<std::string>>()) return fail("selection differs from oracle");
    if (sel.tokens > budget) return fail("budget exceeded");
    auto ranked = cands;
    std::sort(ranked.begin(), ranked.end(), quality::ranks_before);
    if (sel.selected.size() < ranked.size() && sel.tokens + ranked[sel.selected.size()].tokens <= budget)
        return fail("not maximal");
    return {true, std::to_string(ids.size()) + " docs, " + std::to_string(sel.tokens) + "/" + std::to_string(budget) +
                      " tokens, maximal"};
}

// Shared by the retention and end-to-end criteria.
struct FixtureRuns {
    testing::TempDir dir;
    std::map<std::size_t, pipeline::RunManifest> manifests;
    std::map<std::size_t, std::map<std::string, std::string>> artifacts;
    std::map<std::string, std::string> rerun;
};

FixtureRuns& fixture_runs() {
    static FixtureRuns runs;
    return runs;
}

Verdict retention() {
    auto& runs = fixture_runs();
    if (!runs.manifests.count(1)) {
        pipeline::RunOptions o;
        o.run_id = "retention";
        runs.manifests[1] = pipeline::run_pipeline(testing::fixture_config(runs.dir.path()), o);
        runs.artifacts[1] = testing::run_artifacts(runs.dir / "retention");
    }
    std::vector<corpus::StageStats> counts = runs.manifests[1].stage_stats;
    auto report = metrics::retention_report(counts);
    double worst = 0, product = 1;
    for (std::size_t k = 1; k < report.stages.size(); ++k) {
        product *= 1.0 - report.stages[k].relative_removal_rate;
        worst = std::max(worst, std::abs(product - report.stages[k].absolute_retention_rate));
    }
    auto table = metrics::format_table(report);
    bool renders = table.find("removal") != std::string::npos && table.find("retained") != std::string::npos;
    std::vector<corpus::StageStats> hand(2);
    hand[0].documents = 1000;
    hand[1].phase = corpus::Phase::raw;
    hand[1].documents = 526;
    auto h = metrics::retention_report(hand);
    double pct = 100 * h.stages[1].absolute_retention_rate;
    bool ok = worst <= 1e-12 && renders && report.stages.size() == 6 && std::abs(pct - 52.6) <= 1e-12 &&
              metrics::format_table(h).find("52.60") != std::string::npos;
    return {ok, fmt("telescoping error %.1e over 6 phases, hand case %.1f%%", worst, pct)};
}

Verdict end_to_end() {
    auto& runs = fixture_runs();
    for (std::size_t shards : {1, 2, 8}) {
        if (runs.manifests.count(shards)) continue;
        pipeline::RunOptions o;
        o.run_id = "shards-" + std::to_string(shards);
        runs.manifests[shards] = pipeline::run_pipeline(testing::fixture_config(runs.dir.path(), shards), o);
        runs.artifacts[shards] = testing::run_artifacts(runs.dir / *o.run_id);
    }
    pipeline::RunOptions again;
    again.run_id = "rerun";
    pipeline::run_pipeline(testing::fixture_config(runs.dir.path()), again);
    runs.rerun = testing::run_artifacts(runs.dir / "rerun");
    if (runs.rerun != runs.artifacts[1]) return fail("rerun differs");
    for (std::size_t shards : {2, 8}) {
        for (const auto& [name, bytes] : runs.artifacts[1]) {
            if (runs.artifacts[shards][name] != bytes)
                return fail(name + " differs at " + std::to_string(shards) + " shards");
        }
    }
    std::size_t stages = 0;
    for (const auto& [shards, m] : runs.manifests) {
        for (const auto& s : m.stages) {
            if (s.inputs != s.outputs + s.rejects)
                return fail(std::string(pipeline::to_string(s.stage)) + " loses documents");
            ++stages;
        }
    }
    auto exp = nlohmann::json::parse(util::read_file(testing::pipeline_data() / "expected.json"));
    for (const auto& s : runs.manifests[1].stage_stats) {
        if (s.documents != exp["phase_counts"][std::string(corpus::to_string(s.phase))].get<std::uint64_t>())
            return fail(std::string(corpus::to_string(s.phase)) + " count differs from fixture");
    }
    return {true, "byte-identical across reruns and shards {1,2,8}; " + std::to_string(stages) +
                      " stage runs conserve documents"};
}

Verdict exceedance_law() {
    util::Rng rng(10000);
    std::vector<double> scores(10000);
    for (auto& s : scores) s = rng.uniform();
    auto grid = metrics::threshold_grid(101);
    auto curve = metrics::exceedance_curve(scores, grid);
    double worst = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) worst = std::max(worst, std::abs(curve.percentages[i] - 100 * (1 - grid[i])));
    return {worst <= 3.0, fmt("max deviation %.2f points over 101 thresholds", worst)};
}

struct Criterion {
    const char* name;
    double limit_seconds;  // 0: untimed
    std::function<Verdict()> check;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {"rule fidelity", 1, rule_fidelity},
        {"minhash estimator", 30, minhash_estimator},
        {"dedup oracle equivalence", 60, dedup_oracle},
        {"banding plan", 5, banding_plan},
        {"auc", 0, auc_oracle},
        {"pii masking", 0, pii_masking},
        {"safety gate accounting", 0, safety_accounting},
        {"quality selection", 0, quality_selection},
        {"retention report", 0, retention},
        {"end-to-end determinism and shard invariance", 60, end_to_end},
        {"exceedance law", 0, exceedance_law},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.check();
        } catch (const std::exception& e) {
            v = fail(std::string("threw: ") + e.what());
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (v.ok && c.limit_seconds > 0 && seconds >= c.limit_seconds) {
            v = fail(v.detail + "; over the " + fmt("%.0f", c.limit_seconds) + " s limit");
        }
        failures += !v.ok;
        std::printf("%s  %-45s %s (%.2f s)\n", v.ok ? "PASS" : "FAIL", c.name, v.detail.c_str(), seconds);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
