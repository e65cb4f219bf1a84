#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "refinery/corpus/stage_stats.hpp"
#include "refinery/pipeline/config.hpp"

namespace refinery::pipeline {

class StageFailure : public std::runtime_error {
public:
    StageFailure(StageName stage, const std::string& what)
        : std::runtime_error(std::string(to_string(stage)) + ": " + what), stage_(stage) {}
    StageName stage() const noexcept { return stage_; }

private:
    StageName stage_;
};

struct RunOptions {
    std::optional<std::string> run_id;  // overrides the config
    bool resume = false;                // continue an existing run directory
    std::optional<std::size_t> shards;  // overrides the config
    // Test hooks: stop cleanly after a stage, or fail as a stage starts.
    std::optional<StageName> stop_after;
    std::optional<StageName> fail_at;
    std::ostream* log = nullptr;
};

struct StageRecord {
    StageName stage = StageName::extract;
    std::string status;  // "completed" or "failed"
    std::string input_digest;
    std::string output_digest;
    std::string rejects_digest;
    std::uint64_t inputs = 0;
    std::uint64_t outputs = 0;
    std::uint64_t rejects = 0;
    double seconds = 0;
    bool reused = false;  // skipped on resume because its input digest matched
    nlohmann::ordered_json counters = nlohmann::ordered_json::object();
    corpus::StageStats output_stats;               // phase of this stage's output
    std::optional<corpus::StageStats> crawl_stats;  // extract only
};

struct RunManifest {
    std::string run_id;
    std::string status;  // "running", "partial", "failed" or "completed"
    std::optional<std::string> failed_stage;
    std::string error;
    nlohmann::ordered_json config;
    std::vector<StageRecord> stages;
    std::vector<corpus::StageStats> stage_stats;  // with rates, once completed

    const StageRecord* find(StageName stage) const;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::ordered_json& j);
RunManifest read_manifest(const std::filesystem::path& run_dir);

// File layout of a run directory.
struct RunLayout {
    std::filesystem::path dir;

    std::filesystem::path output(StageName stage) const;   // raw, clean, dedup, safe, high_quality .jsonl
    std::filesystem::path rejects(StageName stage) const;  // rejects/<stage>.jsonl
    std::filesystem::path clusters() const { return dir / "dedup.clusters.jsonl"; }
    std::filesystem::path manifest() const { return dir / "manifest.json"; }
    std::filesystem::path reports() const { return dir / "reports"; }
    std::filesystem::path shards(StageName stage) const { return dir / "shards" / std::string(to_string(stage)); }
    std::filesystem::path signature_cache() const { return dir / "cache" / "signatures.bin"; }
};

corpus::Phase output_phase(StageName stage) noexcept;

// Runs the enabled stages in order. Throws ConfigError for an invalid
// configuration or run directory and StageFailure when a stage fails; the
// manifest on disk records how far the run got in both cases.
RunManifest run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

// Writes retention, statistics, signal, volume and AUC reports under
// reports/ from the manifest and the run's final output.
void write_reports(const std::filesystem::path& run_dir, const RunManifest& manifest, const ReportBlock& report);
ReportBlock report_block_from_snapshot(const nlohmann::ordered_json& config_snapshot);

}  // namespace refinery::pipeline
