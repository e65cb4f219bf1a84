#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "refinery/heuristic/config.hpp"
#include "refinery/metrics/signals.hpp"

namespace refinery::pipeline {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cheapest first: the order is fixed, stages can only be switched off.
enum class StageName { extract, clean, dedup, safety, quality };
inline constexpr std::array<StageName, 5> kStageOrder = {StageName::extract, StageName::clean, StageName::dedup,
                                                         StageName::safety, StageName::quality};

std::string_view to_string(StageName stage) noexcept;
std::optional<StageName> parse_stage_name(std::string_view name) noexcept;

struct ExtractBlock {
    bool enabled = true;
    std::string language = "en";
    std::optional<std::string> dump;
};

struct CleanBlock {
    bool enabled = true;
    std::optional<std::filesystem::path> rules_file;
    nlohmann::ordered_json overrides = nlohmann::ordered_json::object();  // [clean.rules]
    heuristic::HeuristicConfig rules;                                     // file, then overrides
};

struct DedupBlock {
    bool enabled = true;
    double threshold = 0.7;
    std::size_t num_perm = 128;
    std::size_t shingle_size = 5;
    std::optional<std::uint64_t> seed;  // falls back to the pipeline seed
    std::optional<std::size_t> bands;
    std::optional<std::size_t> rows;
    bool signature_cache = true;
};

struct SafetyBlock {
    bool enabled = true;
    std::optional<std::filesystem::path> domains;
    std::optional<std::filesystem::path> words;
    std::optional<std::filesystem::path> pii;
    std::optional<std::string> toxicity_cmd;
    std::optional<std::string> porn_cmd;
    // Offline stand-ins used when no command is given.
    std::optional<std::filesystem::path> toxicity_lexicon;
    std::optional<std::filesystem::path> porn_lexicon;
    double toxicity_threshold = 0.2;
    double porn_threshold = 0.2;
    bool fail_closed = false;
};

struct QualityBlock {
    bool enabled = true;
    std::uint64_t budget_tokens = 1000000;
    std::optional<std::string> ad_cmd;
    std::optional<std::string> fluency_cmd;
    double w_flu = 0.5;
    double w_ad = 0.5;
    double ad_threshold = 0.5;
    bool exclude_ads = false;
    bool require_good_fluency = false;
    std::map<std::string, double> fluency_weights;  // empty: uniform
};

struct ReportBlock {
    std::size_t histogram_bins = 20;
    std::optional<std::filesystem::path> annotations;
    nlohmann::ordered_json signal_overrides = nlohmann::ordered_json::object();
    metrics::SignalConfig signals;
};

struct PipelineConfig {
    std::optional<std::string> run_id;
    std::filesystem::path work_dir = "runs";
    std::vector<std::filesystem::path> inputs;
    std::uint64_t seed = 1;
    std::size_t shards = 1;
    std::size_t workers = 1;
    // As written in the file; validate_config checks it against kStageOrder.
    std::vector<std::string> stages = {"extract", "clean", "dedup", "safety", "quality"};

    ExtractBlock extract;
    CleanBlock clean;
    DedupBlock dedup;
    SafetyBlock safety;
    QualityBlock quality;
    ReportBlock report;

    bool enabled(StageName stage) const;
    std::uint64_t dedup_seed() const { return dedup.seed.value_or(seed); }
};

// Builds a config from a parsed TOML tree. Relative paths resolve against
// `base_dir`. Unknown keys and wrongly typed values throw ConfigError; value
// ranges are left to validate_config.
PipelineConfig parse_config(const nlohmann::ordered_json& tree, const std::filesystem::path& base_dir = {});
PipelineConfig load_config(const std::filesystem::path& path);

struct Diagnostic {
    enum class Severity { error, warning };
    Severity severity = Severity::error;
    std::string message;
};

std::vector<Diagnostic> validate_config(const PipelineConfig& config);
bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Normalised snapshot recorded in the run manifest.
nlohmann::ordered_json to_json(const PipelineConfig& config);

}  // namespace refinery::pipeline
