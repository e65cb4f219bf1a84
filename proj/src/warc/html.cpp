#include "refinery/warc/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <unicode/ucnv.h>

#include "refinery/text/utf8.hpp"

namespace refinery::warc {
namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (is_ws(s.front()) || s.front() == '"' || s.front() == '\'')) s.remove_prefix(1);
    while (!s.empty() && (is_ws(s.back()) || s.back() == '"' || s.back() == '\'' || s.back() == ';')) s.remove_suffix(1);
    return s;
}

// ---- character references ---------------------------------------------

const std::unordered_map<std::string_view, char32_t>& named_entities() {
    static const std::unordered_map<std::string_view, char32_t> table = {
        {"amp", U'&'},       {"lt", U'<'},         {"gt", U'>'},         {"quot", U'"'},      {"apos", U'\''},
        {"nbsp", 0x00A0},    {"copy", 0x00A9},     {"reg", 0x00AE},      {"trade", 0x2122},   {"mdash", 0x2014},
        {"ndash", 0x2013},   {"hellip", 0x2026},   {"lsquo", 0x2018},    {"rsquo", 0x2019},   {"ldquo", 0x201C},
        {"rdquo", 0x201D},   {"sbquo", 0x201A},    {"bdquo", 0x201E},    {"laquo", 0x00AB},   {"raquo", 0x00BB},
        {"euro", 0x20AC},    {"pound", 0x00A3},    {"yen", 0x00A5},      {"cent", 0x00A2},    {"sect", 0x00A7},
        {"deg", 0x00B0},     {"middot", 0x00B7},   {"bull", 0x2022},     {"times", 0x00D7},   {"divide", 0x00F7},
        {"plusmn", 0x00B1},  {"para", 0x00B6},     {"iexcl", 0x00A1},    {"iquest", 0x00BF},  {"shy", 0x00AD},
        {"ensp", 0x2002},    {"emsp", 0x2003},     {"thinsp", 0x2009},   {"zwnj", 0x200C},    {"zwj", 0x200D},
        {"aacute", 0x00E1},  {"Aacute", 0x00C1},   {"agrave", 0x00E0},   {"Agrave", 0x00C0},  {"acirc", 0x00E2},
        {"auml", 0x00E4},    {"Auml", 0x00C4},     {"aring", 0x00E5},    {"atilde", 0x00E3},  {"aelig", 0x00E6},
        {"ccedil", 0x00E7},  {"Ccedil", 0x00C7},   {"eacute", 0x00E9},   {"Eacute", 0x00C9},  {"egrave", 0x00E8},
        {"ecirc", 0x00EA},   {"euml", 0x00EB},     {"iacute", 0x00ED},   {"igrave", 0x00EC},  {"icirc", 0x00EE},
        {"iuml", 0x00EF},    {"ntilde", 0x00F1},   {"Ntilde", 0x00D1},   {"oacute", 0x00F3},  {"ograve", 0x00F2},
        {"ocirc", 0x00F4},   {"ouml", 0x00F6},     {"Ouml", 0x00D6},     {"otilde", 0x00F5},  {"oslash", 0x00F8},
        {"uacute", 0x00FA},  {"ugrave", 0x00F9},   {"ucirc", 0x00FB},    {"uuml", 0x00FC},    {"Uuml", 0x00DC},
        {"szlig", 0x00DF},   {"yacute", 0x00FD},   {"yuml", 0x00FF},     {"oelig", 0x0153},   {"scaron", 0x0161},
        {"larr", 0x2190},    {"rarr", 0x2192},     {"uarr", 0x2191},     {"darr", 0x2193},    {"frac12", 0x00BD},
        {"frac14", 0x00BC},  {"frac34", 0x00BE},   {"micro", 0x00B5},    {"alpha", 0x03B1},   {"beta", 0x03B2},
        {"pi", 0x03C0},      {"infin", 0x221E},    {"ne", 0x2260},       {"le", 0x2264},      {"ge", 0x2265},
    };
    return table;
}

// Numeric references 0x80..0x9F name windows-1252 characters.
constexpr std::array<char32_t, 32> kWindows1252 = {
    0x20AC, 0xFFFD, 0x201A, 0x0192, 0x201E, 0x2026, 0x2020, 0x2021, 0x02C6, 0x2030, 0x0160,
    0x2039, 0x0152, 0xFFFD, 0x017D, 0xFFFD, 0xFFFD, 0x2018, 0x2019, 0x201C, 0x201D, 0x2022,
    0x2013, 0x2014, 0x02DC, 0x2122, 0x0161, 0x203A, 0x0153, 0xFFFD, 0x017E, 0x0178};

char32_t numeric_reference(std::uint32_t v) {
    if (v == 0 || v > 0x10FFFF || (v >= 0xD800 && v <= 0xDFFF)) return text::kReplacementChar;
    if (v >= 0x80 && v <= 0x9F) return kWindows1252[v - 0x80];
    return static_cast<char32_t>(v);
}

// ---- DOM ----------------------------------------------------------------

struct Node {
    std::string name;  // empty for text nodes
    std::string text;
    std::vector<std::unique_ptr<Node>> children;
    Node* parent = nullptr;
};

const std::unordered_set<std::string_view> kVoid = {"area",  "base", "br",   "col",   "embed",  "hr",    "img",
                                                    "input", "link", "meta", "param", "source", "track", "wbr"};
const std::unordered_set<std::string_view> kRawText = {"script", "style", "textarea", "title", "xmp", "noembed"};
const std::unordered_set<std::string_view> kRemoved = {"script",   "style", "nav",    "header", "footer",
                                                       "form",     "head",  "noscript", "template", "svg",
                                                       "iframe",   "object", "title"};
const std::unordered_set<std::string_view> kBlock = {
    "address", "article", "aside",  "blockquote", "body",   "caption", "center", "dd",    "details", "dialog",
    "dir",     "div",     "dl",     "dt",         "fieldset", "figcaption", "figure", "h1", "h2",      "h3",
    "h4",      "h5",      "h6",     "hgroup",     "hr",     "html",    "li",     "main",  "menu",    "ol",
    "p",       "pre",     "section", "summary",   "table",  "tbody",   "td",     "tfoot", "th",      "thead",
    "tr",      "ul"};
// Start tags that implicitly close an open <p>.
const std::unordered_set<std::string_view> kClosesP = {
    "address", "article", "aside", "blockquote", "center", "details", "dialog", "dir",  "div",     "dl",
    "fieldset", "figcaption", "figure", "footer", "form", "h1",     "h2",     "h3",   "h4",      "h5",
    "h6",      "header",  "hgroup", "hr",         "main",   "menu",    "nav",    "ol",   "p",       "pre",
    "section", "summary", "table",  "ul",         "li",     "dd",      "dt"};
const std::unordered_set<std::string_view> kScope = {"html", "table", "td", "th", "caption", "button", "object",
                                                     "template"};

class TreeBuilder {
public:
    TreeBuilder() : root_(std::make_unique<Node>()) {
        root_->name = "#root";
        stack_.push_back(root_.get());
    }

    void text(std::string s) {
        if (s.empty()) return;
        Node* top = stack_.back();
        if (!top->children.empty() && top->children.back()->name.empty()) {
            top->children.back()->text += s;
            return;
        }
        auto n = std::make_unique<Node>();
        n->text = std::move(s);
        n->parent = top;
        top->children.push_back(std::move(n));
    }

    void start(const std::string& name, bool self_closing) {
        if (kClosesP.count(name)) close_in_scope("p", {});
        if (name == "li") close_in_scope("li", {"ul", "ol"});
        if (name == "dt" || name == "dd") {
            close_in_scope("dt", {"dl"});
            close_in_scope("dd", {"dl"});
        }
        if (name == "td" || name == "th") {
            close_in_scope("td", {"tr"});
            close_in_scope("th", {"tr"});
        }
        if (name == "tr") close_in_scope("tr", {"tbody", "thead", "tfoot"});
        if (name == "option") close_in_scope("option", {"select"});
        auto n = std::make_unique<Node>();
        n->name = name;
        n->parent = stack_.back();
        Node* raw = n.get();
        stack_.back()->children.push_back(std::move(n));
        if (!self_closing && !kVoid.count(name)) stack_.push_back(raw);
    }

    void end(const std::string& name) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            if (stack_[i]->name == name) {
                stack_.resize(i);
                return;
            }
        }
    }

    std::unique_ptr<Node> finish() { return std::move(root_); }

private:
    void close_in_scope(std::string_view name, std::initializer_list<std::string_view> extra_scope) {
        for (std::size_t i = stack_.size(); i-- > 1;) {
            const std::string& n = stack_[i]->name;
            if (n == name) {
                stack_.resize(i);
                return;
            }
            if (kScope.count(n) || std::find(extra_scope.begin(), extra_scope.end(), n) != extra_scope.end()) return;
        }
    }

    std::unique_ptr<Node> root_;
    std::vector<Node*> stack_;
};

struct Tag {
    std::string name;
    bool closing = false;
    bool self_closing = false;
    std::vector<std::pair<std::string, std::string>> attrs;
};

// Parses a tag starting at html[pos] == '<'. Returns the position after '>'
// or npos if this is not a tag.
std::size_t parse_tag(std::string_view html, std::size_t pos, Tag& tag) {
    std::size_t i = pos + 1;
    if (i < html.size() && html[i] == '/') {
        tag.closing = true;
        ++i;
    }
    if (i >= html.size() || !std::isalpha(static_cast<unsigned char>(html[i]))) return std::string_view::npos;
    std::size_t name_start = i;
    while (i < html.size() && !is_ws(html[i]) && html[i] != '>' && html[i] != '/') ++i;
    tag.name = ascii_lower(html.substr(name_start, i - name_start));
    while (i < html.size()) {
        while (i < html.size() && is_ws(html[i])) ++i;
        if (i >= html.size()) break;
        if (html[i] == '>') return i + 1;
        if (html[i] == '/') {
            tag.self_closing = true;
            ++i;
            continue;
        }
        std::size_t a = i;
        while (i < html.size() && !is_ws(html[i]) && html[i] != '=' && html[i] != '>' && html[i] != '/') ++i;
        std::string key = ascii_lower(html.substr(a, i - a));
        while (i < html.size() && is_ws(html[i])) ++i;
        std::string value;
        if (i < html.size() && html[i] == '=') {
            ++i;
            while (i < html.size() && is_ws(html[i])) ++i;
            if (i < html.size() && (html[i] == '"' || html[i] == '\'')) {
                char q = html[i++];
                std::size_t v = i;
                while (i < html.size() && html[i] != q) ++i;
                value = std::string(html.substr(v, i - v));
                if (i < html.size()) ++i;
            } else {
                std::size_t v = i;
                while (i < html.size() && !is_ws(html[i]) && html[i] != '>') ++i;
                value = std::string(html.substr(v, i - v));
            }
        }
        if (key.empty()) {
            ++i;
            continue;
        }
        tag.attrs.emplace_back(std::move(key), decode_entities(value));
    }
    return html.size();
}

std::size_t find_folded(std::string_view hay, std::string_view needle, std::size_t from) {
    for (std::size_t i = from; i + needle.size() <= hay.size(); ++i) {
        bool match = true;
        for (std::size_t k = 0; k < needle.size() && match; ++k) {
            match = std::tolower(static_cast<unsigned char>(hay[i + k])) == needle[k];
        }
        if (match) return i;
    }
    return std::string_view::npos;
}

std::unique_ptr<Node> parse_html(std::string_view html) {
    TreeBuilder builder;
    std::string pending;
    std::size_t i = 0;
    auto flush = [&] {
        builder.text(decode_entities(pending));
        pending.clear();
    };
    while (i < html.size()) {
        char c = html[i];
        if (c != '<') {
            auto next = html.find('<', i);
            if (next == std::string_view::npos) next = html.size();
            pending.append(html.substr(i, next - i));
            i = next;
            continue;
        }
        if (html.compare(i, 4, "<!--") == 0) {
            auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (i + 1 < html.size() && (html[i + 1] == '!' || html[i + 1] == '?')) {
            auto end = html.find('>', i);
            i = end == std::string_view::npos ? html.size() : end + 1;
            continue;
        }
        Tag tag;
        std::size_t after = parse_tag(html, i, tag);
        if (after == std::string_view::npos) {
            pending += c;
            ++i;
            continue;
        }
        flush();
        i = after;
        if (tag.closing) {
            builder.end(tag.name);
            continue;
        }
        builder.start(tag.name, tag.self_closing);
        if (kRawText.count(tag.name) && !tag.self_closing) {
            auto close = find_folded(html, "</" + tag.name, i);
            std::size_t stop = close == std::string_view::npos ? html.size() : close;
            builder.text(std::string(html.substr(i, stop - i)));
            if (close == std::string_view::npos) {
                i = html.size();
            } else {
                auto gt = html.find('>', close);
                i = gt == std::string_view::npos ? html.size() : gt + 1;
            }
            builder.end(tag.name);
        }
    }
    flush();
    return builder.finish();
}

// ---- density scoring ----------------------------------------------------

constexpr char kBreak = '\x01';

struct Unit {
    std::string raw;  // inline text, kBreak for <br>
    std::size_t markup = 0;
    std::size_t link_chars = 0;
    double score = 0.0;
    std::string text;  // normalised output, lines joined by '\n'
};

std::string collapse(std::string_view raw) {
    std::string out;
    bool space = false;
    for (char c : raw) {
        if (c == kBreak) {
            while (!out.empty() && out.back() == ' ') out.pop_back();
            if (!out.empty() && out.back() != '\n') out += '\n';
            space = false;
        } else if (is_ws(c)) {
            space = !out.empty() && out.back() != '\n';
        } else {
            if (space) out += ' ';
            space = false;
            out += c;
        }
    }
    while (!out.empty() && (out.back() == ' ' || out.back() == '\n')) out.pop_back();
    return out;
}

std::size_t visible_length(std::string_view raw) {
    std::size_t n = 0;
    text::for_each_cp(collapse(raw), [&](char32_t cp, std::size_t, std::size_t) {
        if (cp != '\n') ++n;
    });
    return n;
}

class UnitCollector {
public:
    std::vector<Unit> units;

    void block(const Node& node) {
        open();
        for (const auto& child : node.children) visit(*child, false);
        close();
    }

private:
    void open() { stack_.emplace_back(); }
    void close() {
        Unit u = std::move(stack_.back());
        stack_.pop_back();
        u.text = collapse(u.raw);
        if (!u.text.empty()) units.push_back(std::move(u));
    }
    // Splits the current block's unit at a nested block.
    void split() {
        close();
        open();
    }

    void visit(const Node& node, bool in_link) {
        if (node.name.empty()) {
            stack_.back().raw += node.text;
            if (in_link) link_text_ += node.text;
            return;
        }
        if (kRemoved.count(node.name)) return;
        if (kBlock.count(node.name)) {
            split();
            block(node);
            split();
            return;
        }
        Unit& u = stack_.back();
        ++u.markup;
        if (node.name == "br") {
            u.raw += kBreak;
            return;
        }
        bool link = node.name == "a";
        if (link && !in_link) link_text_.clear();
        for (const auto& child : node.children) visit(*child, in_link || link);
        if (link && !in_link) stack_.back().link_chars += visible_length(link_text_);
    }

    std::vector<Unit> stack_;
    std::string link_text_;
};

}  // namespace

std::string decode_entities(std::string_view s) {
    if (s.find('&') == std::string_view::npos) return std::string(s);
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        std::size_t j = i + 1;
        if (j < s.size() && s[j] == '#') {
            ++j;
            int base = 10;
            if (j < s.size() && (s[j] == 'x' || s[j] == 'X')) {
                base = 16;
                ++j;
            }
            std::size_t start = j;
            while (j < s.size() && std::isxdigit(static_cast<unsigned char>(s[j])) &&
                   (base == 16 || std::isdigit(static_cast<unsigned char>(s[j])))) {
                ++j;
            }
            if (j == start || j - start > 8) {
                out += s[i++];
                continue;
            }
            std::uint32_t v = 0;
            std::from_chars(s.data() + start, s.data() + j, v, base);
            text::append_utf8(out, numeric_reference(v));
            if (j < s.size() && s[j] == ';') ++j;
            i = j;
            continue;
        }
        std::size_t start = j;
        while (j < s.size() && std::isalnum(static_cast<unsigned char>(s[j])) && j - start < 10) ++j;
        auto it = named_entities().find(s.substr(start, j - start));
        if (it == named_entities().end() || j == start) {
            out += s[i++];
            continue;
        }
        text::append_utf8(out, it->second);
        if (j < s.size() && s[j] == ';') ++j;
        i = j;
    }
    return out;
}

std::string charset_from_content_type(std::string_view content_type) {
    std::string lowered = ascii_lower(content_type);
    auto at = lowered.find("charset=");
    if (at == std::string::npos) return {};
    std::string_view rest = std::string_view(lowered).substr(at + 8);
    auto end = rest.find_first_of(";, ");
    if (end == 0 && !rest.empty() && (rest[0] == '"' || rest[0] == '\'')) end = rest.find_first_of(";, ", 1);
    return std::string(trim(rest.substr(0, end)));
}

std::string sniff_meta_charset(std::string_view html) {
    std::string_view head = html.substr(0, std::min<std::size_t>(html.size(), 16384));
    std::size_t pos = 0;
    while ((pos = find_folded(head, "<meta", pos)) != std::string_view::npos) {
        Tag tag;
        std::size_t after = parse_tag(head, pos, tag);
        if (after == std::string_view::npos) {
            pos += 5;
            continue;
        }
        std::string http_equiv, content;
        for (const auto& [k, v] : tag.attrs) {
            if (k == "charset") return ascii_lower(std::string(trim(v)));
            if (k == "http-equiv") http_equiv = ascii_lower(v);
            if (k == "content") content = v;
        }
        if (http_equiv == "content-type") {
            auto cs = charset_from_content_type(content);
            if (!cs.empty()) return cs;
        }
        pos = after;
    }
    return {};
}

std::string decode_to_utf8(std::string_view bytes, std::string_view charset) {
    std::string label = ascii_lower(charset);
    if (label.empty() || label == "utf-8" || label == "utf8" || label == "unicode-1-1-utf-8") {
        return text::sanitize_utf8(bytes);
    }
    // Browsers treat these labels as windows-1252.
    if (label == "iso-8859-1" || label == "latin1" || label == "iso8859-1" || label == "us-ascii" ||
        label == "ascii" || label == "l1" || label == "cp1252") {
        label = "windows-1252";
    }
    UErrorCode status = U_ZERO_ERROR;
    UConverter* conv = ucnv_open(label.c_str(), &status);
    if (U_FAILURE(status) || !conv) return text::sanitize_utf8(bytes);
    std::vector<UChar> utf16(bytes.size() * 2 + 16);
    status = U_ZERO_ERROR;
    int32_t n = ucnv_toUChars(conv, utf16.data(), static_cast<int32_t>(utf16.size()), bytes.data(),
                              static_cast<int32_t>(bytes.size()), &status);
    ucnv_close(conv);
    if (U_FAILURE(status)) return text::sanitize_utf8(bytes);
    std::string out;
    out.reserve(static_cast<std::size_t>(n));
    for (int32_t i = 0; i < n; ++i) {
        char32_t cp = utf16[static_cast<std::size_t>(i)];
        if (cp >= 0xD800 && cp <= 0xDBFF && i + 1 < n) {
            char32_t lo = utf16[static_cast<std::size_t>(i + 1)];
            if (lo >= 0xDC00 && lo <= 0xDFFF) {
                cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                ++i;
            }
        }
        if (cp >= 0xD800 && cp <= 0xDFFF) cp = text::kReplacementChar;
        text::append_utf8(out, cp);
    }
    return out;
}

std::string decode_html(std::string_view bytes, std::string_view content_type_header) {
    std::string charset = charset_from_content_type(content_type_header);
    if (charset.empty()) charset = sniff_meta_charset(bytes);
    return decode_to_utf8(bytes, charset);
}

std::string DensityExtractor::extract(std::string_view html) const {
    auto root = parse_html(html);
    UnitCollector collector;
    collector.block(*root);
    auto& units = collector.units;
    double best = 0.0;
    for (auto& u : units) {
        u.score = static_cast<double>(visible_length(u.raw)) /
                  (1.0 + static_cast<double>(u.markup) + static_cast<double>(u.link_chars));
        best = std::max(best, u.score);
    }
    std::string out;
    for (const auto& u : units) {
        if (u.score < keep_fraction_ * best || u.score <= 0.0) continue;
        if (!out.empty()) out += '\n';
        out += u.text;
    }
    return out;
}

std::string extract_text(std::string_view html) { return DensityExtractor().extract(html); }

}  // namespace refinery::warc
