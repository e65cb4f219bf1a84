#include "refinery/util/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace refinery::util {
namespace {

using ojson = nlohmann::ordered_json;

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    ojson parse() {
        ojson root = ojson::object();
        ojson* table = &root;
        while (true) {
            skip_blank_and_comments();
            if (eof()) break;
            if (peek() == '[') {
                ++pos_;
                if (!eof() && peek() == '[') fail("arrays of tables are not supported");
                skip_inline_space();
                auto path = parse_key_path();
                skip_inline_space();
                expect(']');
                table = &descend(root, path, true);
            } else {
                auto path = parse_key_path();
                skip_inline_space();
                expect('=');
                skip_inline_space();
                ojson value = parse_value();
                assign(*table, path, std::move(value));
            }
            end_of_line();
        }
        return root;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;

    [[noreturn]] void fail(const std::string& what) const { throw TomlError(line_, what); }

    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return src_[pos_]; }

    char get() {
        char c = src_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void expect(char c) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
        get();
    }

    void skip_inline_space() {
        while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    void skip_comment() {
        if (!eof() && peek() == '#') {
            while (!eof() && peek() != '\n') ++pos_;
        }
    }

    void skip_blank_and_comments() {
        while (!eof()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                get();
            } else if (c == '#') {
                skip_comment();
            } else {
                break;
            }
        }
    }

    void end_of_line() {
        skip_inline_space();
        skip_comment();
        if (eof()) return;
        if (peek() == '\r') ++pos_;
        if (eof()) return;
        if (peek() != '\n') fail("unexpected trailing characters");
        get();
    }

    static bool is_bare(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
    }

    std::vector<std::string> parse_key_path() {
        std::vector<std::string> path;
        while (true) {
            skip_inline_space();
            if (eof()) fail("expected key");
            if (peek() == '"') {
                path.push_back(parse_basic_string());
            } else if (peek() == '\'') {
                path.push_back(parse_literal_string());
            } else {
                std::size_t start = pos_;
                while (!eof() && is_bare(peek())) ++pos_;
                if (start == pos_) fail("expected key");
                path.emplace_back(src_.substr(start, pos_ - start));
            }
            skip_inline_space();
            if (!eof() && peek() == '.') {
                ++pos_;
                continue;
            }
            return path;
        }
    }

    ojson& descend(ojson& root, const std::vector<std::string>& path, bool header) {
        ojson* node = &root;
        for (const auto& key : path) {
            if (!node->contains(key)) {
                (*node)[key] = ojson::object();
            } else if (!(*node)[key].is_object()) {
                fail("key '" + key + "' is not a table");
            }
            node = &(*node)[key];
        }
        (void)header;
        return *node;
    }

    void assign(ojson& table, const std::vector<std::string>& path, ojson value) {
        std::vector<std::string> parents(path.begin(), path.end() - 1);
        ojson& target = descend(table, parents, false);
        if (target.contains(path.back())) fail("duplicate key '" + path.back() + "'");
        target[path.back()] = std::move(value);
    }

    static void append_utf8(std::string& out, unsigned long cp) {
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
    }

    std::string parse_basic_string() {
        expect('"');
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = get();
            if (c == '"') return out;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (eof()) fail("unterminated escape");
            char e = get();
            switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                case 'b': out += '\b'; break;
                case 'f': out += '\f'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'u':
                case 'U': {
                    std::size_t digits = e == 'u' ? 4 : 8;
                    if (pos_ + digits > src_.size()) fail("truncated unicode escape");
                    unsigned long cp = 0;
                    auto hex = src_.substr(pos_, digits);
                    auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), cp, 16);
                    if (ec != std::errc() || ptr != hex.data() + hex.size()) fail("bad unicode escape");
                    pos_ += digits;
                    append_utf8(out, cp);
                    break;
                }
                default: fail(std::string("unknown escape \\") + e);
            }
        }
    }

    std::string parse_literal_string() {
        expect('\'');
        std::size_t start = pos_;
        while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
        if (eof() || peek() != '\'') fail("unterminated literal string");
        std::string out(src_.substr(start, pos_ - start));
        ++pos_;
        return out;
    }

    ojson parse_array() {
        expect('[');
        ojson arr = ojson::array();
        while (true) {
            skip_blank_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(parse_value());
            skip_blank_and_comments();
            if (eof()) fail("unterminated array");
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != ']') {
                fail("expected ',' or ']' in array");
            }
        }
    }

    ojson parse_inline_table() {
        expect('{');
        ojson table = ojson::object();
        skip_inline_space();
        if (!eof() && peek() == '}') {
            ++pos_;
            return table;
        }
        while (true) {
            auto path = parse_key_path();
            skip_inline_space();
            expect('=');
            skip_inline_space();
            assign(table, path, parse_value());
            skip_inline_space();
            if (eof()) fail("unterminated inline table");
            if (peek() == ',') {
                ++pos_;
                continue;
            }
            expect('}');
            return table;
        }
    }

    ojson parse_scalar() {
        std::size_t start = pos_;
        while (!eof()) {
            char c = peek();
            if (c == ',' || c == ']' || c == '}' || c == '#' || c == ' ' || c == '\t' || c == '\r' ||
                c == '\n')
                break;
            ++pos_;
        }
        std::string tok(src_.substr(start, pos_ - start));
        if (tok.empty()) fail("expected value");
        if (tok == "true") return true;
        if (tok == "false") return false;
        if (tok == "inf" || tok == "+inf") return std::numeric_limits<double>::infinity();
        if (tok == "-inf") return -std::numeric_limits<double>::infinity();
        std::string clean;
        for (char c : tok) {
            if (c != '_') clean += c;
        }
        bool is_float = clean.find_first_of(".eE") != std::string::npos;
        const char* first = clean.data();
        if (!clean.empty() && clean[0] == '+') ++first;
        const char* last = clean.data() + clean.size();
        if (!is_float) {
            long long v = 0;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec == std::errc() && ptr == last) return v;
        } else {
            double v = 0;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec == std::errc() && ptr == last) return v;
        }
        fail("invalid value '" + tok + "'");
    }

    ojson parse_value() {
        if (eof()) fail("expected value");
        switch (peek()) {
            case '"': return parse_basic_string();
            case '\'': return parse_literal_string();
            case '[': return parse_array();
            case '{': return parse_inline_table();
            default: return parse_scalar();
        }
    }
};

}  // namespace

nlohmann::ordered_json parse_toml(std::string_view source) { return Parser(source).parse(); }

nlohmann::ordered_json parse_toml_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_toml(ss.str());
}

}  // namespace refinery::util
