#pragma once

#include <filesystem>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "refinery/corpus/document.hpp"

namespace refinery::safety {

class PiiConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PiiResult {
    std::string masked;
    std::vector<corpus::PiiSpan> spans;  // original coordinates, sorted, disjoint
    std::size_t pattern_errors = 0;      // patterns abandoned on this text (step budget)
};

// Ordered pii_type -> patterns. Patterns use POSIX extended syntax with
// leftmost-longest matching. Each match is replaced by "[[type]]".
class PiiRegistry {
public:
    PiiRegistry();
    ~PiiRegistry();
    PiiRegistry(PiiRegistry&&) noexcept;
    PiiRegistry& operator=(PiiRegistry&&) noexcept;

    // The shipped registry: email, ip, gps, id_card, bank_account, passport,
    // phone, address.
    static const PiiRegistry& defaults();
    // A TOML file with a [pii] table of type = [patterns...]; key order is
    // application order.
    static PiiRegistry load(const std::filesystem::path& path);
    static PiiRegistry parse(std::string_view toml_source);

    // Throws PiiConfigError for an invalid pattern.
    void add(const std::string& type, const std::string& pattern);

    std::vector<std::string> types() const;
    std::size_t pattern_count() const;

    PiiResult mask(std::string_view text) const;

private:
    struct Pattern;
    std::vector<std::unique_ptr<Pattern>> patterns_;
};

std::string pii_token(std::string_view type);

inline PiiResult mask_pii(std::string_view text, const PiiRegistry& registry = PiiRegistry::defaults()) {
    return registry.mask(text);
}

}  // namespace refinery::safety
