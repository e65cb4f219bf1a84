#pragma once

#include <cstddef>
#include <string_view>

namespace refinery::corpus {

// Token counting is pluggable; absolute token totals are relative to the
// tokenizer in use.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;
    virtual std::string_view name() const noexcept = 0;
    virtual std::size_t count_tokens(std::string_view text) const = 0;
};

// Unicode-whitespace word splitting.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::string_view name() const noexcept override { return "whitespace"; }
    std::size_t count_tokens(std::string_view text) const override;
};

const Tokenizer& default_tokenizer();

}  // namespace refinery::corpus
