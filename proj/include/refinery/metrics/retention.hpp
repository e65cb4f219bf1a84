#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "refinery/corpus/document.hpp"
#include "refinery/corpus/stage_stats.hpp"
#include "refinery/corpus/tokenizer.hpp"

namespace refinery::metrics {

class RetentionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RetentionReport {
    std::vector<corpus::StageStats> stages;  // rates filled in
    std::vector<std::string> warnings;
};

// Fills relative removal (1 - N_k / N_{k-1}) and absolute retention
// (N_k / N_0) from document counts. A document count that grows between
// consecutive phases throws; growing bytes or tokens only warn. A zero
// predecessor gives removal 0; a zero N_0 gives retention 1.
RetentionReport retention_report(std::vector<corpus::StageStats> stages);
nlohmann::ordered_json to_json(const RetentionReport& report);
std::vector<corpus::StageStats> stage_stats_from_json(const nlohmann::ordered_json& j);
std::string format_table(const RetentionReport& report);

struct YearVolume {
    std::string year;  // "YYYY" or "unknown"
    std::uint64_t documents = 0;
    std::uint64_t bytes = 0;
    std::uint64_t tokens = 0;
    double document_share = 0;
    double byte_share = 0;
    double token_share = 0;
};

// Leading four digits of a dump id followed by '-' or the end; anything else
// is "unknown".
std::string dump_year(std::string_view dump_id);

class YearVolumeCounter {
public:
    void add(const corpus::Document& doc, const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());
    void merge(const YearVolumeCounter& other);
    std::vector<YearVolume> volumes() const;  // ascending by year, "unknown" last

private:
    struct Totals {
        std::uint64_t documents = 0, bytes = 0, tokens = 0;
    };
    std::map<std::string, Totals> totals_;
};

std::vector<YearVolume> dump_year_volumes(const std::vector<corpus::Document>& docs,
                                          const corpus::Tokenizer& tokenizer = corpus::default_tokenizer());
nlohmann::ordered_json to_json(const std::vector<YearVolume>& volumes);
std::string format_table(const std::vector<YearVolume>& volumes);

}  // namespace refinery::metrics
