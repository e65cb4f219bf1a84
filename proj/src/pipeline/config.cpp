#include "refinery/pipeline/config.hpp"

#include <algorithm>
#include <set>
#include <type_traits>

#include "refinery/util/toml.hpp"

namespace refinery::pipeline {

using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view to_string(StageName stage) noexcept {
    switch (stage) {
        case StageName::extract: return "extract";
        case StageName::clean: return "clean";
        case StageName::dedup: return "dedup";
        case StageName::safety: return "safety";
        case StageName::quality: return "quality";
    }
    return "?";
}

std::optional<StageName> parse_stage_name(std::string_view name) noexcept {
    for (auto s : kStageOrder) {
        if (to_string(s) == name) return s;
    }
    return std::nullopt;
}

bool PipelineConfig::enabled(StageName stage) const {
    if (std::find(stages.begin(), stages.end(), std::string(to_string(stage))) == stages.end()) return false;
    switch (stage) {
        case StageName::extract: return extract.enabled;
        case StageName::clean: return clean.enabled;
        case StageName::dedup: return dedup.enabled;
        case StageName::safety: return safety.enabled;
        case StageName::quality: return quality.enabled;
    }
    return false;
}

namespace {

// Typed access to one TOML table; every key must be consumed.
class Table {
public:
    Table(const ojson& tree, std::string name, fs::path base) : name_(std::move(name)), base_(std::move(base)) {
        if (tree.is_null()) return;
        if (!tree.is_object()) throw ConfigError("[" + name_ + "] must be a table");
        tree_ = &tree;
    }

    const ojson* find(const std::string& key) {
        if (!tree_) return nullptr;
        auto it = tree_->find(key);
        if (it == tree_->end()) return nullptr;
        seen_.insert(key);
        return &*it;
    }

    void get(const std::string& key, bool& out) {
        if (auto v = find(key)) {
            if (!v->is_boolean()) fail(key, "a boolean");
            out = v->get<bool>();
        }
    }
    void get(const std::string& key, double& out) {
        if (auto v = find(key)) {
            if (!v->is_number()) fail(key, "a number");
            out = v->get<double>();
        }
    }
    void get(const std::string& key, std::uint64_t& out) {
        if (auto v = find(key)) out = unsigned_value(key, *v);
    }
    void get(const std::string& key, std::optional<std::uint64_t>& out) {
        if (auto v = find(key)) out = unsigned_value(key, *v);
    }
    void get(const std::string& key, std::string& out) {
        if (auto v = find(key)) out = string_value(key, *v);
    }
    void get(const std::string& key, std::optional<std::string>& out) {
        if (auto v = find(key)) out = string_value(key, *v);
    }
    void get(const std::string& key, fs::path& out) {
        if (auto v = find(key)) out = resolve(string_value(key, *v));
    }
    void get(const std::string& key, std::optional<fs::path>& out) {
        if (auto v = find(key)) out = resolve(string_value(key, *v));
    }
    void get(const std::string& key, std::vector<std::string>& out) {
        if (auto v = find(key)) {
            if (!v->is_array()) fail(key, "an array of strings");
            out.clear();
            for (const auto& e : *v) out.push_back(string_value(key, e));
        }
    }
    void get(const std::string& key, std::vector<fs::path>& out) {
        std::vector<std::string> raw;
        get(key, raw);
        if (find(key)) {
            out.clear();
            for (const auto& s : raw) out.push_back(resolve(s));
        }
    }
    void get(const std::string& key, std::map<std::string, double>& out) {
        if (auto v = find(key)) {
            if (!v->is_object()) fail(key, "a table of numbers");
            out.clear();
            for (auto it = v->begin(); it != v->end(); ++it) {
                if (!it->is_number()) fail(key + "." + it.key(), "a number");
                out[it.key()] = it->get<double>();
            }
        }
    }
    void get_table(const std::string& key, ojson& out) {
        if (auto v = find(key)) {
            if (!v->is_object()) fail(key, "a table");
            out = *v;
        }
    }

    void finish() const {
        if (!tree_) return;
        for (auto it = tree_->begin(); it != tree_->end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in [" + name_ + "]");
        }
    }

private:
    [[noreturn]] void fail(const std::string& key, const char* what) const {
        throw ConfigError("[" + name_ + "] " + key + " must be " + what);
    }
    std::uint64_t unsigned_value(const std::string& key, const ojson& v) const {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
            fail(key, "a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }
    std::string string_value(const std::string& key, const ojson& v) const {
        if (!v.is_string()) fail(key, "a string");
        return v.get<std::string>();
    }
    fs::path resolve(const std::string& p) const {
        fs::path path(p);
        return path.is_absolute() || base_.empty() ? path : base_ / path;
    }

    std::string name_;
    fs::path base_;
    const ojson* tree_ = nullptr;
    std::set<std::string> seen_;
};

const ojson& section(const ojson& tree, const char* name) {
    static const ojson kNull;
    auto it = tree.find(name);
    return it == tree.end() ? kNull : *it;
}

}  // namespace

PipelineConfig parse_config(const ojson& tree, const fs::path& base_dir) {
    if (!tree.is_object()) throw ConfigError("configuration must be a table");
    static const std::set<std::string> kSections = {"pipeline", "extract", "clean", "dedup", "safety", "quality", "report"};
    for (auto it = tree.begin(); it != tree.end(); ++it) {
        if (!kSections.count(it.key())) throw ConfigError("unknown section [" + it.key() + "]");
    }
    PipelineConfig c;

    Table p(section(tree, "pipeline"), "pipeline", base_dir);
    p.get("run_id", c.run_id);
    p.get("work_dir", c.work_dir);
    if (!c.work_dir.is_absolute() && !base_dir.empty() && !p.find("work_dir")) c.work_dir = base_dir / c.work_dir;
    p.get("inputs", c.inputs);
    p.get("seed", c.seed);
    std::uint64_t shards = c.shards, workers = c.workers;
    p.get("shards", shards);
    p.get("workers", workers);
    c.shards = static_cast<std::size_t>(shards);
    c.workers = static_cast<std::size_t>(workers);
    p.get("stages", c.stages);
    p.finish();

    Table e(section(tree, "extract"), "extract", base_dir);
    e.get("enabled", c.extract.enabled);
    e.get("language", c.extract.language);
    e.get("dump", c.extract.dump);
    e.finish();

    Table cl(section(tree, "clean"), "clean", base_dir);
    cl.get("enabled", c.clean.enabled);
    cl.get("rules_file", c.clean.rules_file);
    cl.get_table("rules", c.clean.overrides);
    cl.finish();
    try {
        if (c.clean.rules_file) c.clean.rules = heuristic::load_config(*c.clean.rules_file);
        heuristic::apply_overrides(c.clean.rules, c.clean.overrides);
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("[clean] ") + ex.what());
    }

    Table d(section(tree, "dedup"), "dedup", base_dir);
    d.get("enabled", c.dedup.enabled);
    d.get("threshold", c.dedup.threshold);
    std::uint64_t num_perm = c.dedup.num_perm, shingle = c.dedup.shingle_size;
    d.get("num_perm", num_perm);
    d.get("shingle_size", shingle);
    c.dedup.num_perm = static_cast<std::size_t>(num_perm);
    c.dedup.shingle_size = static_cast<std::size_t>(shingle);
    d.get("seed", c.dedup.seed);
    std::optional<std::uint64_t> bands, rows;
    d.get("bands", bands);
    d.get("rows", rows);
    if (bands) c.dedup.bands = static_cast<std::size_t>(*bands);
    if (rows) c.dedup.rows = static_cast<std::size_t>(*rows);
    d.get("signature_cache", c.dedup.signature_cache);
    d.finish();

    Table s(section(tree, "safety"), "safety", base_dir);
    s.get("enabled", c.safety.enabled);
    s.get("domains", c.safety.domains);
    s.get("words", c.safety.words);
    s.get("pii", c.safety.pii);
    s.get("toxicity_cmd", c.safety.toxicity_cmd);
    s.get("porn_cmd", c.safety.porn_cmd);
    s.get("toxicity_lexicon", c.safety.toxicity_lexicon);
    s.get("porn_lexicon", c.safety.porn_lexicon);
    if (auto v = s.find("threshold")) {
        if (!v->is_number()) throw ConfigError("[safety] threshold must be a number");
        c.safety.toxicity_threshold = c.safety.porn_threshold = v->get<double>();
    }
    s.get("toxicity_threshold", c.safety.toxicity_threshold);
    s.get("porn_threshold", c.safety.porn_threshold);
    s.get("fail_closed", c.safety.fail_closed);
    s.finish();

    Table q(section(tree, "quality"), "quality", base_dir);
    q.get("enabled", c.quality.enabled);
    q.get("budget_tokens", c.quality.budget_tokens);
    q.get("ad_cmd", c.quality.ad_cmd);
    q.get("fluency_cmd", c.quality.fluency_cmd);
    q.get("w_flu", c.quality.w_flu);
    q.get("w_ad", c.quality.w_ad);
    q.get("ad_threshold", c.quality.ad_threshold);
    q.get("exclude_ads", c.quality.exclude_ads);
    q.get("require_good_fluency", c.quality.require_good_fluency);
    q.get("fluency_weights", c.quality.fluency_weights);
    q.finish();

    Table r(section(tree, "report"), "report", base_dir);
    std::uint64_t bins = c.report.histogram_bins;
    r.get("histogram_bins", bins);
    c.report.histogram_bins = static_cast<std::size_t>(bins);
    r.get("annotations", c.report.annotations);
    r.get_table("signals", c.report.signal_overrides);
    r.finish();
    try {
        metrics::apply_overrides(c.report.signals, c.report.signal_overrides);
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("[report.signals] ") + ex.what());
    }
    return c;
}

PipelineConfig load_config(const fs::path& path) {
    ojson tree;
    try {
        tree = util::parse_toml_file(path.string());
    } catch (const std::exception& ex) {
        throw ConfigError(path.string() + ": " + ex.what());
    }
    return parse_config(tree, path.parent_path());
}

std::vector<Diagnostic> validate_config(const PipelineConfig& c) {
    std::vector<Diagnostic> out;
    auto error = [&](std::string m) { out.push_back({Diagnostic::Severity::error, std::move(m)}); };
    auto warning = [&](std::string m) { out.push_back({Diagnostic::Severity::warning, std::move(m)}); };
    auto unit = [&](const char* what, double v) {
        if (!(v >= 0.0 && v <= 1.0)) error(std::string(what) + " " + std::to_string(v) + " is outside [0, 1]");
    };

    std::size_t last = 0;
    std::set<std::string> listed;
    for (const auto& name : c.stages) {
        auto stage = parse_stage_name(name);
        if (!stage) {
            error("unknown stage '" + name + "'");
            continue;
        }
        if (!listed.insert(name).second) {
            error("stage '" + name + "' listed twice");
            continue;
        }
        auto pos = static_cast<std::size_t>(std::find(kStageOrder.begin(), kStageOrder.end(), *stage) - kStageOrder.begin());
        if (pos < last) {
            error("stage '" + name + "' is out of order: stages run in fixed order extract, clean, dedup, safety, quality");
        }
        last = std::max(last, pos);
    }

    if (c.inputs.empty()) error("no inputs configured");
    for (const auto& in : c.inputs) {
        if (!fs::exists(in)) error("input " + in.string() + " does not exist");
    }
    if (c.shards == 0) error("shards must be at least 1");
    if (c.workers == 0) error("workers must be at least 1");

    if (c.enabled(StageName::dedup)) {
        unit("dedup threshold", c.dedup.threshold);
        if (c.dedup.threshold == 0.0 || c.dedup.threshold == 1.0) error("dedup threshold must be strictly between 0 and 1");
        if (c.dedup.num_perm < 2) error("num_perm must be at least 2");
        if (c.dedup.shingle_size == 0) error("shingle_size must be at least 1");
        if (c.dedup.bands.has_value() != c.dedup.rows.has_value()) error("bands and rows must be given together");
        if (c.dedup.bands && c.dedup.rows) {
            if (*c.dedup.bands == 0 || *c.dedup.rows == 0) error("bands and rows must be positive");
            if (*c.dedup.bands * *c.dedup.rows > c.dedup.num_perm) {
                error("bands * rows = " + std::to_string(*c.dedup.bands * *c.dedup.rows) + " exceeds num_perm " +
                      std::to_string(c.dedup.num_perm));
            }
        }
    }

    std::vector<std::string> baseline;
    if (c.enabled(StageName::safety)) {
        unit("toxicity threshold", c.safety.toxicity_threshold);
        unit("pornography threshold", c.safety.porn_threshold);
        for (const auto* p : {&c.safety.domains, &c.safety.words, &c.safety.pii, &c.safety.toxicity_lexicon, &c.safety.porn_lexicon}) {
            if (*p && !fs::exists(**p)) error("safety resource " + (*p)->string() + " does not exist");
        }
        if (!c.safety.toxicity_cmd) baseline.push_back(c.safety.toxicity_lexicon ? "toxicity (lexicon)" : "toxicity (not scored)");
        if (!c.safety.porn_cmd) baseline.push_back(c.safety.porn_lexicon ? "pornography (lexicon)" : "pornography (not scored)");
        if (!c.safety.domains) warning("no domain blocklist configured");
        if (!c.safety.words) warning("no blockword list configured");
    }
    if (c.enabled(StageName::quality)) {
        unit("ad threshold", c.quality.ad_threshold);
        if (c.quality.w_flu < 0 || c.quality.w_ad < 0 || c.quality.w_flu + c.quality.w_ad <= 0) {
            error("quality weights must be non-negative and not both zero");
        }
        if (c.quality.budget_tokens == 0) warning("token budget is 0: nothing will be selected");
        if (!c.quality.ad_cmd) baseline.push_back("ad");
        if (!c.quality.fluency_cmd) baseline.push_back("fluency");
    }
    if (c.clean.rules_file && !fs::exists(*c.clean.rules_file)) error("rules file " + c.clean.rules_file->string() + " does not exist");
    if (c.report.annotations && !fs::exists(*c.report.annotations)) {
        error("annotation file " + c.report.annotations->string() + " does not exist");
    }
    if (c.report.histogram_bins == 0) error("histogram_bins must be at least 1");
    if (!baseline.empty()) {
        std::string list;
        for (const auto& b : baseline) list += (list.empty() ? "" : ", ") + b;
        warning("baseline scorers in use: " + list);
    }
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Diagnostic::Severity::error; });
}

ojson to_json(const PipelineConfig& c) {
    auto opt = [](const auto& o) -> ojson {
        if (!o) return nullptr;
        if constexpr (std::is_same_v<std::decay_t<decltype(*o)>, fs::path>) {
            return o->string();
        } else {
            return *o;
        }
    };
    ojson j;
    std::vector<std::string> inputs;
    for (const auto& i : c.inputs) inputs.push_back(i.string());
    j["pipeline"] = {{"inputs", inputs}, {"seed", c.seed}, {"shards", c.shards}, {"workers", c.workers}, {"stages", c.stages}};
    j["extract"] = {{"enabled", c.extract.enabled}, {"language", c.extract.language}, {"dump", opt(c.extract.dump)}};
    j["clean"] = {{"enabled", c.clean.enabled}, {"rules", heuristic::to_json(c.clean.rules)}};
    j["dedup"] = {{"enabled", c.dedup.enabled},
                  {"threshold", c.dedup.threshold},
                  {"num_perm", c.dedup.num_perm},
                  {"shingle_size", c.dedup.shingle_size},
                  {"seed", c.dedup_seed()},
                  {"bands", opt(c.dedup.bands)},
                  {"rows", opt(c.dedup.rows)},
                  {"signature_cache", c.dedup.signature_cache}};
    j["safety"] = {{"enabled", c.safety.enabled},
                   {"domains", opt(c.safety.domains)},
                   {"words", opt(c.safety.words)},
                   {"pii", opt(c.safety.pii)},
                   {"toxicity_cmd", opt(c.safety.toxicity_cmd)},
                   {"porn_cmd", opt(c.safety.porn_cmd)},
                   {"toxicity_lexicon", opt(c.safety.toxicity_lexicon)},
                   {"porn_lexicon", opt(c.safety.porn_lexicon)},
                   {"toxicity_threshold", c.safety.toxicity_threshold},
                   {"porn_threshold", c.safety.porn_threshold},
                   {"fail_closed", c.safety.fail_closed}};
    j["quality"] = {{"enabled", c.quality.enabled},
                    {"budget_tokens", c.quality.budget_tokens},
                    {"ad_cmd", opt(c.quality.ad_cmd)},
                    {"fluency_cmd", opt(c.quality.fluency_cmd)},
                    {"w_flu", c.quality.w_flu},
                    {"w_ad", c.quality.w_ad},
                    {"ad_threshold", c.quality.ad_threshold},
                    {"exclude_ads", c.quality.exclude_ads},
                    {"require_good_fluency", c.quality.require_good_fluency},
                    {"fluency_weights", c.quality.fluency_weights}};
    j["report"] = {{"histogram_bins", c.report.histogram_bins},
                   {"annotations", opt(c.report.annotations)},
                   {"signals", c.report.signal_overrides}};
    return j;
}

}  // namespace refinery::pipeline
