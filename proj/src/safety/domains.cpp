#include "refinery/safety/domains.hpp"

#include <cctype>

#include "refinery/text/lexical.hpp"
#include "refinery/util/io.hpp"

namespace refinery::safety {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::optional<std::string> url_host(std::string_view url) {
    url = trim(url);
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos || scheme_end == 0) return std::nullopt;
    for (char c : url.substr(0, scheme_end))
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.')) return std::nullopt;
    std::string_view rest = url.substr(scheme_end + 3);
    std::string_view authority = rest.substr(0, rest.find_first_of("/?#"));
    if (auto at = authority.rfind('@'); at != std::string_view::npos) authority.remove_prefix(at + 1);
    std::string_view host;
    if (!authority.empty() && authority.front() == '[') {
        auto close = authority.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        host = authority.substr(0, close + 1);
    } else {
        host = authority.substr(0, authority.find(':'));
    }
    while (!host.empty() && host.back() == '.') host.remove_suffix(1);
    if (host.empty()) return std::nullopt;
    for (char c : host)
        if (c == ' ' || c == '\t') return std::nullopt;
    return text::ascii_lower(host);
}

DomainBlocklist DomainBlocklist::load(const std::filesystem::path& path) {
    DomainBlocklist list;
    util::InputFile in(path);
    while (auto line = in.read_line()) {
        auto entry = trim(*line);
        if (entry.empty() || entry.front() == '#') continue;
        list.add(entry);
    }
    return list;
}

void DomainBlocklist::add(std::string_view domain) {
    domain = trim(domain);
    if (domain.substr(0, 2) == "*.") domain.remove_prefix(2);
    while (!domain.empty() && domain.front() == '.') domain.remove_prefix(1);
    while (!domain.empty() && domain.back() == '.') domain.remove_suffix(1);
    if (!domain.empty()) domains_.insert(text::ascii_lower(domain));
}

bool DomainBlocklist::blocks_host(std::string_view host) const {
    if (domains_.empty()) return false;
    std::string key;
    while (!host.empty()) {
        key.assign(host);
        if (domains_.count(key)) return true;
        auto dot = host.find('.');
        if (dot == std::string_view::npos) break;
        host.remove_prefix(dot + 1);
    }
    return false;
}

DomainMatch DomainBlocklist::match(std::string_view url) const {
    auto host = url_host(url);
    if (!host) return DomainMatch::unparseable;
    return blocks_host(*host) ? DomainMatch::blocked : DomainMatch::clear;
}

bool match_domain(std::string_view url, const DomainBlocklist& blocklist) {
    return blocklist.match(url) == DomainMatch::blocked;
}

}  // namespace refinery::safety
