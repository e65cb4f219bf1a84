#include "refinery/safety/pii.hpp"

#include <algorithm>

#include <boost/regex.hpp>

#include "refinery/util/io.hpp"
#include "refinery/util/toml.hpp"

namespace refinery::safety {
namespace {

constexpr char kDefaultRegistry[] =
#include "pii_default.inc"
    ;

}  // namespace

struct PiiRegistry::Pattern {
    std::string type;
    std::string source;
    boost::regex regex;
};

PiiRegistry::PiiRegistry() = default;
PiiRegistry::~PiiRegistry() = default;
PiiRegistry::PiiRegistry(PiiRegistry&&) noexcept = default;
PiiRegistry& PiiRegistry::operator=(PiiRegistry&&) noexcept = default;

std::string pii_token(std::string_view type) { return "[[" + std::string(type) + "]]"; }

const PiiRegistry& PiiRegistry::defaults() {
    static const PiiRegistry registry = parse(kDefaultRegistry);
    return registry;
}

PiiRegistry PiiRegistry::load(const std::filesystem::path& path) {
    try {
        return parse(util::read_file(path));
    } catch (const PiiConfigError& e) {
        throw PiiConfigError(path.string() + ": " + e.what());
    }
}

PiiRegistry PiiRegistry::parse(std::string_view toml_source) {
    nlohmann::ordered_json doc;
    try {
        doc = util::parse_toml(toml_source);
    } catch (const util::TomlError& e) {
        throw PiiConfigError(e.what());
    }
    if (!doc.contains("pii") || !doc["pii"].is_object()) throw PiiConfigError("missing [pii] table");
    for (const auto& [key, value] : doc.items())
        if (key != "pii") throw PiiConfigError("unknown key: " + key);
    PiiRegistry registry;
    for (const auto& [type, patterns] : doc["pii"].items()) {
        if (patterns.is_string()) {
            registry.add(type, patterns.get<std::string>());
            continue;
        }
        if (!patterns.is_array()) throw PiiConfigError(type + ": expected a pattern or a list of patterns");
        for (const auto& p : patterns) {
            if (!p.is_string()) throw PiiConfigError(type + ": patterns must be strings");
            registry.add(type, p.get<std::string>());
        }
    }
    return registry;
}

void PiiRegistry::add(const std::string& type, const std::string& pattern) {
    if (type.empty()) throw PiiConfigError("empty pii type");
    auto p = std::make_unique<Pattern>();
    p->type = type;
    p->source = pattern;
    try {
        p->regex.assign(pattern, boost::regex::extended);
    } catch (const boost::regex_error& e) {
        throw PiiConfigError(type + ": invalid pattern '" + pattern + "': " + e.what());
    }
    patterns_.push_back(std::move(p));
}

std::vector<std::string> PiiRegistry::types() const {
    std::vector<std::string> out;
    for (const auto& p : patterns_)
        if (std::find(out.begin(), out.end(), p->type) == out.end()) out.push_back(p->type);
    return out;
}

std::size_t PiiRegistry::pattern_count() const { return patterns_.size(); }

PiiResult PiiRegistry::mask(std::string_view text) const {
    PiiResult result;
    std::vector<corpus::PiiSpan> claimed;  // kept sorted by start
    auto overlaps = [&](std::size_t start, std::size_t end) {
        auto it = std::lower_bound(claimed.begin(), claimed.end(), end,
                                   [](const corpus::PiiSpan& s, std::size_t e) { return s.start < e; });
        return it != claimed.begin() && std::prev(it)->end > start;
    };
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    for (const auto& p : patterns_) {
        auto before = claimed;
        try {
            const char* from = begin;
            boost::cmatch m;
            while (from <= end) {
                auto flags = boost::match_default;
                if (from != begin) flags |= boost::match_prev_avail;
                if (!boost::regex_search(from, end, m, p->regex, flags)) break;
                auto start = static_cast<std::size_t>(m[0].first - begin);
                auto stop = static_cast<std::size_t>(m[0].second - begin);
                if (stop == start || overlaps(start, stop)) {
                    from = m[0].first + 1;
                    continue;
                }
                corpus::PiiSpan span{start, stop, p->type};
                claimed.insert(std::upper_bound(claimed.begin(), claimed.end(), span,
                                                [](const auto& a, const auto& b) { return a.start < b.start; }),
                               span);
                from = m[0].second;
            }
        } catch (const std::runtime_error&) {
            // boost reports an exhausted step budget as a runtime_error; the
            // pattern is dropped for this text.
            claimed = std::move(before);
            ++result.pattern_errors;
        }
    }
    std::size_t pos = 0;
    for (const auto& s : claimed) {
        result.masked.append(text.substr(pos, s.start - pos));
        result.masked += pii_token(s.type);
        pos = s.end;
    }
    result.masked.append(text.substr(pos));
    result.spans = std::move(claimed);
    return result;
}

}  // namespace refinery::safety
