#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>

namespace refinery::safety {

// Lowercased host of a scheme://host[:port]/... URL, without userinfo, port
// or a trailing dot. nullopt when there is no scheme or no host.
std::optional<std::string> url_host(std::string_view url);

enum class DomainMatch { clear, blocked, unparseable };

class DomainBlocklist {
public:
    DomainBlocklist() = default;
    // One domain per line; blank lines and '#' comments are ignored, a
    // leading "*." or "." is dropped.
    static DomainBlocklist load(const std::filesystem::path& path);

    void add(std::string_view domain);
    std::size_t size() const noexcept { return domains_.size(); }

    // True if `host` is a listed domain or a subdomain of one.
    bool blocks_host(std::string_view host) const;
    DomainMatch match(std::string_view url) const;

private:
    std::unordered_set<std::string> domains_;
};

// match() == DomainMatch::blocked.
bool match_domain(std::string_view url, const DomainBlocklist& blocklist);

}  // namespace refinery::safety
