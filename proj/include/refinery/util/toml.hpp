#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

namespace refinery::util {

class TomlError : public std::runtime_error {
public:
    TomlError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Parses the subset of TOML used by refinery configuration files into an
// insertion-ordered JSON tree: [table] and [a.b] headers, bare/quoted/dotted
// keys, basic and literal strings, integers, floats, booleans, (multi-line)
// arrays and inline tables. Dates and arrays-of-tables are not supported.
nlohmann::ordered_json parse_toml(std::string_view source);

nlohmann::ordered_json parse_toml_file(const std::string& path);

}  // namespace refinery::util
