#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "refinery/corpus/document.hpp"
#include "refinery/warc/html.hpp"
#include "refinery/warc/language.hpp"
#include "refinery/warc/warc_reader.hpp"

namespace refinery::warc {

// "CC-MAIN-2023-06-..." anywhere in the file name -> "2023-06".
std::optional<std::string> dump_id_from_filename(const std::filesystem::path& path);
// ISO-8601 timestamp -> ISO "YYYY-WW" of its date.
std::optional<std::string> dump_id_from_date(std::string_view warc_date);

struct ExtractOptions {
    std::string language = "en";  // empty keeps every language
    std::optional<std::string> dump_override;
};

struct ExtractCounters {
    std::size_t records = 0;
    std::size_t errors = 0;      // unparseable records
    std::size_t responses = 0;
    std::size_t non_html = 0;    // responses that are not 200 + HTML
    std::size_t html_pages = 0;  // the crawl phase
    std::size_t crawl_bytes = 0;
    std::size_t crawl_tokens = 0;
    std::size_t empty = 0;       // no content block survived extraction
    std::size_t wrong_language = 0;
    std::size_t kept = 0;

    ExtractCounters& operator+=(const ExtractCounters& o);
};

enum class RecordFate { skipped, kept, rejected };

struct ExtractResult {
    RecordFate fate = RecordFate::skipped;
    corpus::Document doc;  // set when kept or rejected
    corpus::FilterOutcome outcome;
};

class Extractor {
public:
    explicit Extractor(ExtractOptions options = {}, const TextExtractor* extractor = nullptr,
                       const LanguageDetector* detector = nullptr);

    // `dump_id` is the file-level dump label, if known; otherwise the record
    // date decides.
    ExtractResult process(const WarcRecord& record, const std::optional<std::string>& dump_id,
                          ExtractCounters& counters) const;

    using Sink = std::function<void(const corpus::Document&)>;
    // Streams one WARC file. Rejected documents carry their outcome in
    // extra["outcome"].
    void process_file(const std::filesystem::path& path, const Sink& kept, const Sink& rejected,
                      ExtractCounters& counters) const;

private:
    ExtractOptions options_;
    DensityExtractor default_extractor_;
    const TextExtractor* extractor_;
    const LanguageDetector* detector_;
};

}  // namespace refinery::warc
