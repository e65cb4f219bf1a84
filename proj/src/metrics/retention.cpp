#include "refinery/metrics/retention.hpp"

#include <cctype>
#include <cstdio>
#include <sstream>

namespace refinery::metrics {

using ojson = nlohmann::ordered_json;

namespace {

double ratio(std::uint64_t a, std::uint64_t b) {
    return b == 0 ? 0.0 : static_cast<double>(a) / static_cast<double>(b);
}

}  // namespace

RetentionReport retention_report(std::vector<corpus::StageStats> stages) {
    RetentionReport report;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        auto& s = stages[k];
        if (k == 0) {
            s.relative_removal_rate = 0.0;
            s.absolute_retention_rate = 1.0;
            continue;
        }
        const auto& prev = stages[k - 1];
        const auto name = std::string(corpus::to_string(s.phase));
        if (s.documents > prev.documents) {
            throw RetentionError("document count grows from " + std::string(corpus::to_string(prev.phase)) + " (" +
                                 std::to_string(prev.documents) + ") to " + name + " (" +
                                 std::to_string(s.documents) + ")");
        }
        if (s.bytes > prev.bytes) report.warnings.push_back("bytes grow at " + name);
        if (s.tokens > prev.tokens) report.warnings.push_back("tokens grow at " + name);
        s.relative_removal_rate = prev.documents == 0 ? 0.0 : 1.0 - ratio(s.documents, prev.documents);
        s.absolute_retention_rate = stages.front().documents == 0 ? 1.0 : ratio(s.documents, stages.front().documents);
    }
    report.stages = std::move(stages);
    return report;
}

ojson to_json(const RetentionReport& report) {
    ojson stages = ojson::array();
    for (const auto& s : report.stages) {
        stages.push_back({{"phase", corpus::to_string(s.phase)},
                          {"documents", s.documents},
                          {"bytes", s.bytes},
                          {"tokens", s.tokens},
                          {"relative_removal_rate", s.relative_removal_rate},
                          {"absolute_retention_rate", s.absolute_retention_rate}});
    }
    return {{"stages", stages}, {"warnings", report.warnings}};
}

std::vector<corpus::StageStats> stage_stats_from_json(const ojson& j) {
    const ojson& arr = j.is_object() && j.contains("stages") ? j["stages"] : j;
    if (!arr.is_array()) throw std::invalid_argument("expected an array of stage statistics");
    std::vector<corpus::StageStats> out;
    for (const auto& e : arr) {
        corpus::StageStats s;
        auto phase = corpus::parse_phase(e.at("phase").get<std::string>());
        if (!phase) throw std::invalid_argument("unknown phase '" + e.at("phase").get<std::string>() + "'");
        s.phase = *phase;
        s.documents = e.at("documents").get<std::uint64_t>();
        s.bytes = e.value("bytes", std::uint64_t{0});
        s.tokens = e.value("tokens", std::uint64_t{0});
        out.push_back(s);
    }
    return out;
}

std::string format_table(const RetentionReport& report) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-14s %12s %14s %14s %10s %10s\n", "phase", "documents", "bytes", "tokens",
                  "removal%", "retained%");
    os << buf;
    for (const auto& s : report.stages) {
        std::snprintf(buf, sizeof buf, "%-14s %12llu %14llu %14llu %10.2f %10.2f\n",
                      std::string(corpus::to_string(s.phase)).c_str(), static_cast<unsigned long long>(s.documents),
                      static_cast<unsigned long long>(s.bytes), static_cast<unsigned long long>(s.tokens),
                      100.0 * s.relative_removal_rate, 100.0 * s.absolute_retention_rate);
        os << buf;
    }
    for (const auto& w : report.warnings) os << "warning: " << w << "\n";
    return os.str();
}

std::string dump_year(std::string_view dump_id) {
    if (dump_id.size() < 4) return "unknown";
    for (std::size_t i = 0; i < 4; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(dump_id[i]))) return "unknown";
    }
    if (dump_id.size() > 4 && dump_id[4] != '-') return "unknown";
    return std::string(dump_id.substr(0, 4));
}

void YearVolumeCounter::add(const corpus::Document& doc, const corpus::Tokenizer& tokenizer) {
    auto& t = totals_[dump_year(doc.dump_id)];
    t.documents += 1;
    t.bytes += doc.text.size();
    t.tokens += tokenizer.count_tokens(doc.text);
}

void YearVolumeCounter::merge(const YearVolumeCounter& other) {
    for (const auto& [year, o] : other.totals_) {
        auto& t = totals_[year];
        t.documents += o.documents;
        t.bytes += o.bytes;
        t.tokens += o.tokens;
    }
}

std::vector<YearVolume> YearVolumeCounter::volumes() const {
    Totals sum;
    for (const auto& [year, t] : totals_) {
        sum.documents += t.documents;
        sum.bytes += t.bytes;
        sum.tokens += t.tokens;
    }
    std::vector<YearVolume> out;
    for (const auto& [year, t] : totals_) {
        out.push_back({year, t.documents, t.bytes, t.tokens, ratio(t.documents, sum.documents),
                       ratio(t.bytes, sum.bytes), ratio(t.tokens, sum.tokens)});
    }
    // Digits sort before letters, so "unknown" already comes last.
    return out;
}

std::vector<YearVolume> dump_year_volumes(const std::vector<corpus::Document>& docs,
                                          const corpus::Tokenizer& tokenizer) {
    YearVolumeCounter c;
    for (const auto& d : docs) c.add(d, tokenizer);
    return c.volumes();
}

ojson to_json(const std::vector<YearVolume>& volumes) {
    ojson out = ojson::array();
    for (const auto& v : volumes) {
        out.push_back({{"year", v.year},
                       {"documents", v.documents},
                       {"bytes", v.bytes},
                       {"tokens", v.tokens},
                       {"document_share", v.document_share},
                       {"byte_share", v.byte_share},
                       {"token_share", v.token_share}});
    }
    return out;
}

std::string format_table(const std::vector<YearVolume>& volumes) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-8s %12s %14s %14s %8s %8s %8s\n", "year", "documents", "bytes", "tokens", "docs%",
                  "bytes%", "tokens%");
    os << buf;
    for (const auto& v : volumes) {
        std::snprintf(buf, sizeof buf, "%-8s %12llu %14llu %14llu %8.2f %8.2f %8.2f\n", v.year.c_str(),
                      static_cast<unsigned long long>(v.documents), static_cast<unsigned long long>(v.bytes),
                      static_cast<unsigned long long>(v.tokens), 100.0 * v.document_share, 100.0 * v.byte_share,
                      100.0 * v.token_share);
        os << buf;
    }
    return os.str();
}

}  // namespace refinery::metrics
