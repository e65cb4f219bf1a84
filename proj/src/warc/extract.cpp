#include "refinery/warc/extract.hpp"

#include <cctype>
#include <cstdio>
#include <regex>

#include "refinery/corpus/tokenizer.hpp"
#include "refinery/util/digest.hpp"

namespace refinery::warc {
namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
long days_from_civil(long y, unsigned m, unsigned d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

// ISO weekday, Monday = 1.
unsigned iso_weekday(long days) { return static_cast<unsigned>(((days % 7) + 7 + 3) % 7) + 1; }

long iso_week_one_monday(long year) {
    long jan4 = days_from_civil(year, 1, 4);
    return jan4 - (iso_weekday(jan4) - 1);
}

bool is_html(const std::string& content_type) {
    std::string lower;
    for (char c : content_type) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return lower.find("text/html") != std::string::npos || lower.find("application/xhtml") != std::string::npos;
}

std::string document_id(const WarcRecord& r) {
    std::string key = r.record_id();
    if (key.empty()) key = r.target_uri() + "\n" + r.warc_date();
    return util::sha256_hex(key).substr(0, 20);
}

}  // namespace

std::optional<std::string> dump_id_from_filename(const std::filesystem::path& path) {
    static const std::regex pattern(R"(CC-MAIN-(\d{4})-(\d{2}))");
    std::smatch m;
    std::string name = path.filename().string();
    if (!std::regex_search(name, m, pattern)) return std::nullopt;
    return m[1].str() + "-" + m[2].str();
}

std::optional<std::string> dump_id_from_date(std::string_view warc_date) {
    int y = 0;
    unsigned mo = 0, d = 0;
    if (warc_date.size() < 10 || std::sscanf(std::string(warc_date.substr(0, 10)).c_str(), "%d-%u-%u", &y, &mo, &d) != 3)
        return std::nullopt;
    if (mo < 1 || mo > 12 || d < 1 || d > 31) return std::nullopt;
    long days = days_from_civil(y, mo, d);
    long iso_year = y;
    if (days < iso_week_one_monday(y)) {
        iso_year = y - 1;
    } else if (days >= iso_week_one_monday(y + 1)) {
        iso_year = y + 1;
    }
    long week = (days - iso_week_one_monday(iso_year)) / 7 + 1;
    char buf[48];
    std::snprintf(buf, sizeof buf, "%04ld-%02ld", iso_year, week);
    return std::string(buf);
}

ExtractCounters& ExtractCounters::operator+=(const ExtractCounters& o) {
    records += o.records;
    errors += o.errors;
    responses += o.responses;
    non_html += o.non_html;
    html_pages += o.html_pages;
    crawl_bytes += o.crawl_bytes;
    crawl_tokens += o.crawl_tokens;
    empty += o.empty;
    wrong_language += o.wrong_language;
    kept += o.kept;
    return *this;
}

Extractor::Extractor(ExtractOptions options, const TextExtractor* extractor, const LanguageDetector* detector)
    : options_(std::move(options)),
      extractor_(extractor ? extractor : &default_extractor_),
      detector_(detector ? detector : &default_language_detector()) {}

ExtractResult Extractor::process(const WarcRecord& record, const std::optional<std::string>& dump_id,
                                 ExtractCounters& counters) const {
    ExtractResult result;
    ++counters.records;
    if (!record.is_response()) return result;
    ++counters.responses;
    auto http = parse_http_response(record.body);
    if (!http || http->status != 200 || !is_html(http->header("content-type"))) {
        ++counters.non_html;
        return result;
    }
    ++counters.html_pages;

    corpus::Document doc;
    doc.id = document_id(record);
    doc.url = record.target_uri();
    doc.fetched_at = record.warc_date();
    if (options_.dump_override) {
        doc.dump_id = *options_.dump_override;
    } else if (dump_id) {
        doc.dump_id = *dump_id;
    } else {
        doc.dump_id = dump_id_from_date(record.warc_date()).value_or("0000-00");
    }
    doc.text = extractor_->extract(decode_html(http->payload, http->header("content-type")));
    counters.crawl_bytes += doc.text.size();
    counters.crawl_tokens += corpus::default_tokenizer().count_tokens(doc.text);

    if (doc.text.empty()) {
        ++counters.empty;
        result.fate = RecordFate::rejected;
        result.outcome = corpus::FilterOutcome::drop("empty_extraction");
        result.doc = std::move(doc);
        return result;
    }
    auto verdict = detector_->detect(doc.text);
    doc.language = verdict.tag;
    if (!options_.language.empty() && verdict.tag != options_.language) {
        ++counters.wrong_language;
        result.fate = RecordFate::rejected;
        result.outcome = corpus::FilterOutcome::drop("language");
        result.outcome.diagnostics["language_confidence"] = verdict.confidence;
        result.doc = std::move(doc);
        return result;
    }
    ++counters.kept;
    result.fate = RecordFate::kept;
    result.outcome.diagnostics["language_confidence"] = verdict.confidence;
    result.doc = std::move(doc);
    return result;
}

void Extractor::process_file(const std::filesystem::path& path, const Sink& kept, const Sink& rejected,
                             ExtractCounters& counters) const {
    WarcReader reader(path);
    auto file_dump = dump_id_from_filename(path);
    while (auto item = reader.next()) {
        if (std::holds_alternative<WarcError>(*item)) {
            ++counters.records;
            ++counters.errors;
            continue;
        }
        auto result = process(std::get<WarcRecord>(*item), file_dump, counters);
        if (result.fate == RecordFate::kept) {
            kept(result.doc);
        } else if (result.fate == RecordFate::rejected) {
            corpus::attach_outcome(result.doc, result.outcome, "extract");
            rejected(result.doc);
        }
    }
}

}  // namespace refinery::warc
