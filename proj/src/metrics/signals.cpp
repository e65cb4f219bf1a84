#include "refinery/metrics/signals.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "refinery/heuristic/metrics.hpp"
#include "refinery/heuristic/rules.hpp"
#include "refinery/text/lexical.hpp"
#include "refinery/text/utf8.hpp"
#include "refinery/util/digest.hpp"
#include "refinery/util/io.hpp"

namespace refinery::metrics {

using ojson = nlohmann::ordered_json;

namespace {

// Machine signals: (family, metric, DocSignals flag).
struct MachineSignal {
    const char* family;
    const char* metric;
    bool DocSignals::*flag;
};

constexpr MachineSignal kMachineSignals[] = {
    {"effectiveness", "empty_text", &DocSignals::empty},
    {"effectiveness", "garbled_characters", &DocSignals::garbled},
    {"completeness", "ends_with_colon", &DocSignals::ends_with_colon},
    {"completeness", "unbalanced_pairs", &DocSignals::unbalanced},
    {"understandability", "format_errors", &DocSignals::format_error},
    {"understandability", "special_characters", &DocSignals::special_chars},
    {"similarity", "in_document_duplication", &DocSignals::in_doc_duplication},
    {"fluency", "no_punctuation_block", &DocSignals::no_punctuation_block},
    {"fluency", "anti_scraping", &DocSignals::anti_scraping},
};

constexpr const char* kFamilies[] = {"effectiveness", "completeness", "understandability", "similarity",
                                     "fluency",       "relevance",    "security"};

std::string key_of(std::string_view family, std::string_view metric) {
    return std::string(family) + "." + std::string(metric);
}

bool contains_any(const std::string& haystack, const std::vector<std::string>& needles) {
    return std::any_of(needles.begin(), needles.end(),
                       [&](const std::string& n) { return !n.empty() && haystack.find(n) != std::string::npos; });
}

std::vector<std::string> lowered(const std::vector<std::string>& in) {
    std::vector<std::string> out;
    for (const auto& s : in) out.push_back(text::ascii_lower(s));
    return out;
}

double number(const ojson& v, const std::string& key) {
    if (!v.is_number()) throw std::invalid_argument("'" + key + "' must be a number");
    return v.get<double>();
}

std::size_t count(const ojson& v, const std::string& key) {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw std::invalid_argument("'" + key + "' must be a non-negative integer");
    }
    return v.get<std::size_t>();
}

std::vector<std::string> strings(const ojson& v, const std::string& key) {
    if (!v.is_array()) throw std::invalid_argument("'" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw std::invalid_argument("'" + key + "' must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

}  // namespace

void apply_overrides(SignalConfig& c, const ojson& values) {
    using Setter = std::function<void(const ojson&, const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"garbled_nonprintable_fraction", [&](const ojson& v, const std::string& k) { c.garbled_nonprintable_fraction = number(v, k); }},
        {"max_space_fraction", [&](const ojson& v, const std::string& k) { c.max_space_fraction = number(v, k); }},
        {"newline_run", [&](const ojson& v, const std::string& k) { c.newline_run = count(v, k); }},
        {"no_punctuation_block", [&](const ojson& v, const std::string& k) { c.no_punctuation_block = count(v, k); }},
        {"security_threshold", [&](const ojson& v, const std::string& k) { c.security_threshold = number(v, k); }},
        {"markup_tokens", [&](const ojson& v, const std::string& k) { c.markup_tokens = strings(v, k); }},
        {"anti_scraping_phrases", [&](const ojson& v, const std::string& k) { c.anti_scraping_phrases = strings(v, k); }},
        {"sampled_metrics", [&](const ojson& v, const std::string& k) { c.sampled_metrics = strings(v, k); }},
        {"repetition", [&](const ojson& v, const std::string&) { heuristic::apply_overrides(c.repetition, v); }},
    };
    if (!values.is_object()) throw std::invalid_argument("signal overrides must be a table");
    for (auto it = values.begin(); it != values.end(); ++it) {
        auto s = setters.find(it.key());
        if (s == setters.end()) throw std::invalid_argument("unknown signal setting '" + it.key() + "'");
        s->second(*it, it.key());
    }
}

bool has_unbalanced_pairs(std::string_view t) noexcept {
    long paren = 0, square = 0, curly = 0, curly_quote = 0;
    std::size_t straight_quotes = 0;
    bool negative = false;
    text::for_each_cp(t, [&](char32_t cp, std::size_t, std::size_t) {
        switch (cp) {
            case '(': ++paren; break;
            case ')': negative |= --paren < 0; break;
            case '[': ++square; break;
            case ']': negative |= --square < 0; break;
            case '{': ++curly; break;
            case '}': negative |= --curly < 0; break;
            case U'“': ++curly_quote; break;
            case U'”': negative |= --curly_quote < 0; break;
            case '"': ++straight_quotes; break;
            default: break;
        }
    });
    return negative || paren != 0 || square != 0 || curly != 0 || curly_quote != 0 || straight_quotes % 2 != 0;
}

DocSignals doc_signals(std::string_view t, const SignalConfig& config) {
    DocSignals s;
    s.empty = text::is_blank(t);

    std::size_t chars = 0, nonprintable = 0, spaces = 0, punct_run = 0, newline_run = 0;
    bool replacement = false, invisible = false;
    text::for_each_cp(t, [&](char32_t cp, std::size_t, std::size_t) {
        ++chars;
        if (cp == text::kReplacementChar) replacement = true;
        if (!text::is_printable(cp)) ++nonprintable;
        if (text::is_invisible(cp)) invisible = true;
        if (text::is_space(cp)) ++spaces;
        newline_run = cp == '\n' ? newline_run + 1 : 0;
        if (newline_run >= config.newline_run) s.special_chars = true;
        punct_run = text::is_punctuation(cp) ? 0 : punct_run + 1;
        if (punct_run >= config.no_punctuation_block) s.no_punctuation_block = true;
    });
    s.garbled = replacement || (chars > 0 && static_cast<double>(nonprintable) >=
                                                 config.garbled_nonprintable_fraction * static_cast<double>(chars));
    if (invisible || t.find('#') != std::string_view::npos) s.special_chars = true;
    if (chars > 0 && static_cast<double>(spaces) > config.max_space_fraction * static_cast<double>(chars)) {
        s.special_chars = true;
    }

    s.ends_with_colon = heuristic::ends_with_colon(t);
    s.unbalanced = has_unbalanced_pairs(t);

    const std::string lower = text::ascii_lower(t);
    s.format_error = contains_any(lower, lowered(config.markup_tokens));
    s.anti_scraping = contains_any(lower, lowered(config.anti_scraping_phrases));

    if (!s.empty) {
        auto m = heuristic::compute_metrics(t, config.repetition);
        s.in_doc_duplication = heuristic::rule_fails(9, m, t, config.repetition);
    }
    return s;
}

SampledCounts parse_sampled_annotations(const ojson& j) {
    if (!j.is_object()) throw std::invalid_argument("annotation file must hold an object of families");
    SampledCounts out;
    for (auto fam = j.begin(); fam != j.end(); ++fam) {
        if (!fam->is_object()) throw std::invalid_argument("family '" + fam.key() + "' must be an object");
        for (auto m = fam->begin(); m != fam->end(); ++m) {
            const auto key = key_of(fam.key(), m.key());
            if (!m->is_object() || !m->contains("a") || !m->contains("b")) {
                throw std::invalid_argument("'" + key + "' needs integer fields a and b");
            }
            auto a = count((*m)["a"], key + ".a");
            auto b = count((*m)["b"], key + ".b");
            if (a > b) throw std::invalid_argument("'" + key + "': a exceeds b");
            out[key] = {a, b};
        }
    }
    return out;
}

SampledCounts load_sampled_annotations(const std::filesystem::path& path) {
    ojson j;
    try {
        j = ojson::parse(util::read_file(path));
    } catch (const ojson::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    return parse_sampled_annotations(j);
}

const SignalEntry* QualitySignalReport::find(std::string_view family, std::string_view metric) const {
    for (const auto& e : entries) {
        if (e.family == family && e.metric == metric) return &e;
    }
    return nullptr;
}

SignalCounter::SignalCounter(SignalConfig config) : config_(std::move(config)) {}

void SignalCounter::add(const corpus::Document& doc) {
    ++documents_;
    auto flags = doc_signals(doc.text, config_);
    for (const auto& sig : kMachineSignals) {
        if (flags.*sig.flag) ++flagged_[key_of(sig.family, sig.metric)];
    }
    ++text_copies_[util::sha256_hex(doc.text)];
    if (doc.safety) {
        if (doc.safety->toxicity) {
            ++toxicity_scored_;
            if (*doc.safety->toxicity > config_.security_threshold) ++toxicity_flagged_;
        }
        if (doc.safety->pornography) {
            ++pornography_scored_;
            if (*doc.safety->pornography > config_.security_threshold) ++pornography_flagged_;
        }
    }
}

void SignalCounter::merge(const SignalCounter& other) {
    documents_ += other.documents_;
    for (const auto& [k, v] : other.flagged_) flagged_[k] += v;
    for (const auto& [k, v] : other.text_copies_) text_copies_[k] += v;
    toxicity_scored_ += other.toxicity_scored_;
    toxicity_flagged_ += other.toxicity_flagged_;
    pornography_scored_ += other.pornography_scored_;
    pornography_flagged_ += other.pornography_flagged_;
}

QualitySignalReport SignalCounter::report(const std::optional<SampledCounts>& sampled) const {
    std::vector<SignalEntry> all;
    auto machine = [&](std::string family, std::string metric, std::uint64_t a, std::uint64_t b) {
        SignalEntry e{std::move(family), std::move(metric), Provenance::machine, a, b, std::nullopt};
        if (b > 0) e.ratio = static_cast<double>(a) / static_cast<double>(b);
        all.push_back(std::move(e));
    };
    for (const auto& sig : kMachineSignals) {
        auto it = flagged_.find(key_of(sig.family, sig.metric));
        machine(sig.family, sig.metric, it == flagged_.end() ? 0 : it->second, documents_);
    }
    // A duplicate item is every copy of a text beyond its first occurrence.
    std::uint64_t duplicates = 0;
    for (const auto& [hash, copies] : text_copies_) duplicates += copies - 1;
    machine("similarity", "duplicate_items", duplicates, documents_);
    machine("security", "pornography", pornography_flagged_, pornography_scored_);
    machine("security", "toxicity", toxicity_flagged_, toxicity_scored_);

    std::vector<std::string> sampled_keys = config_.sampled_metrics;
    if (sampled) {
        for (const auto& [k, v] : *sampled) {
            if (std::find(sampled_keys.begin(), sampled_keys.end(), k) == sampled_keys.end()) sampled_keys.push_back(k);
        }
    }
    for (const auto& key : sampled_keys) {
        auto dot = key.find('.');
        SignalEntry e;
        e.family = key.substr(0, dot);
        e.metric = dot == std::string::npos ? "" : key.substr(dot + 1);
        e.provenance = Provenance::sampled;
        if (sampled) {
            auto it = sampled->find(key);
            if (it != sampled->end()) {
                e.numerator = it->second.first;
                e.denominator = it->second.second;
                if (e.denominator > 0) e.ratio = static_cast<double>(e.numerator) / static_cast<double>(e.denominator);
            }
        }
        all.push_back(std::move(e));
    }

    QualitySignalReport report;
    for (const char* family : kFamilies) {
        for (const auto& e : all) {
            if (e.family == family) report.entries.push_back(e);
        }
    }
    for (const auto& e : all) {
        if (std::find(std::begin(kFamilies), std::end(kFamilies), e.family) == std::end(kFamilies)) {
            report.entries.push_back(e);
        }
    }
    return report;
}

QualitySignalReport quality_signals(const std::vector<corpus::Document>& docs,
                                    const std::optional<SampledCounts>& sampled, const SignalConfig& config) {
    SignalCounter counter(config);
    for (const auto& d : docs) counter.add(d);
    return counter.report(sampled);
}

ojson to_json(const QualitySignalReport& report) {
    ojson out = ojson::object();
    for (const auto& e : report.entries) {
        ojson entry;
        entry["provenance"] = e.provenance == Provenance::machine ? "machine" : "sampled";
        const char* a = e.provenance == Provenance::machine ? "A" : "A'";
        const char* b = e.provenance == Provenance::machine ? "B" : "B'";
        if (e.ratio) {
            entry[a] = e.numerator;
            entry[b] = e.denominator;
            entry["ratio"] = *e.ratio;
        } else {
            entry["ratio"] = "unavailable";
        }
        out[e.family][e.metric] = std::move(entry);
    }
    return out;
}

std::string format_table(const QualitySignalReport& report) {
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-18s %-26s %-8s %10s %10s %12s\n", "family", "metric", "source", "A", "B", "ratio");
    os << buf;
    for (const auto& e : report.entries) {
        const char* source = e.provenance == Provenance::machine ? "machine" : "sampled";
        if (e.ratio) {
            std::snprintf(buf, sizeof buf, "%-18s %-26s %-8s %10llu %10llu %12.6f\n", e.family.c_str(), e.metric.c_str(),
                          source, static_cast<unsigned long long>(e.numerator),
                          static_cast<unsigned long long>(e.denominator), *e.ratio);
        } else {
            std::snprintf(buf, sizeof buf, "%-18s %-26s %-8s %10s %10s %12s\n", e.family.c_str(), e.metric.c_str(),
                          source, "-", "-", "unavailable");
        }
        os << buf;
    }
    return os.str();
}

}  // namespace refinery::metrics
