#include <doctest.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "refinery/heuristic/cleaning.hpp"
#include "refinery/heuristic/config.hpp"
#include "refinery/heuristic/metrics.hpp"
#include "refinery/heuristic/rules.hpp"
#include "refinery/util/io.hpp"
#include "refinery/util/random.hpp"
#include "support/rule_fixtures.hpp"
#include "support/temp_dir.hpp"

using namespace refinery;
using namespace refinery::heuristic;

namespace {

std::string lines(std::initializer_list<const char*> ls) {
    std::string out;
    bool first = true;
    for (const char* l : ls) {
        if (!first) out += '\n';
        out += l;
        first = false;
    }
    return out;
}

std::string data_file(const std::string& rel) { return util::read_file(std::string(REFINERY_TEST_DATA) + "/" + rel); }

// ---- naive oracle over ASCII text -------------------------------------

const std::string kPunct = ".,!?;:'\"()-#";

bool ascii_space(char c) { return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::vector<std::string> naive_words(const std::string& t) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : t) {
        if (ascii_space(c)) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string naive_norm(const std::string& w) {
    std::size_t a = 0, b = w.size();
    while (a < b && kPunct.find(w[a]) != std::string::npos) ++a;
    while (b > a && kPunct.find(w[b - 1]) != std::string::npos) --b;
    std::string core = a == b ? w : w.substr(a, b - a);
    for (char& c : core) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return core;
}

std::vector<std::string> naive_lines(const std::string& t) {
    std::vector<std::string> out;
    std::stringstream ss(t);
    std::string l;
    while (std::getline(ss, l, '\n')) out.push_back(l);
    if (!t.empty() && t.back() == '\n') out.push_back("");
    if (t.empty()) out.push_back("");
    return out;
}

bool naive_blank(const std::string& s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return ascii_space(c); });
}

double dup_fraction(const std::vector<std::string>& segs) {
    std::set<std::string> seen;
    double total = 0, dup = 0;
    for (const auto& s : segs) {
        total += static_cast<double>(s.size());
        if (seen.count(s)) dup += static_cast<double>(s.size());
        seen.insert(s);
    }
    return total == 0 ? 0 : dup / total;
}

DocMetrics naive_metrics(const std::string& t) {
    DocMetrics m;
    std::map<char, std::size_t> chars;
    std::size_t newlines = 0;
    for (char c : t) {
        ++m.total_chars;
        if (c == '\n') ++newlines;
        if (std::isalpha(static_cast<unsigned char>(c))) ++m.letter_chars;
        if (std::isdigit(static_cast<unsigned char>(c))) ++m.digit_chars;
        if (!ascii_space(c)) ++chars[c];
    }
    for (auto [c, n] : chars) {  // map order: smallest char wins ties
        if (n > m.most_common_char_count) {
            m.most_common_char = static_cast<char32_t>(c);
            m.most_common_char_count = n;
        }
    }
    if (m.total_chars) m.newline_fraction = double(newlines) / double(m.total_chars);

    auto words = naive_words(t);
    m.word_count = words.size();
    std::vector<std::string> norm;
    std::map<std::string, std::size_t> freq;
    std::size_t with_letter = 0, total_len = 0;
    const std::set<std::string> stop = {"the", "be", "to", "of", "and", "that", "have", "with"};
    for (const auto& w : words) {
        norm.push_back(naive_norm(w));
        ++freq[norm.back()];
        if (stop.count(norm.back())) ++m.stopword_count;
        if (std::any_of(w.begin(), w.end(), [](char c) { return std::isalpha(static_cast<unsigned char>(c)); }))
            ++with_letter;
        total_len += w.size();
        m.max_word_len = std::max(m.max_word_len, w.size());
    }
    if (!words.empty()) {
        std::size_t top = 0;
        for (auto& [k, v] : freq) top = std::max(top, v);
        m.top_word_fraction = double(top) / double(words.size());
        m.words_with_letter_fraction = double(with_letter) / double(words.size());
        m.mean_word_length = double(total_len) / double(words.size());
        m.symbol_to_word_ratio = 0;
    }
    std::size_t run = 0;
    for (const auto& w : words) {
        ++run;
        char last = w.back();
        if (last == '.' || last == '!' || last == '?') {
            m.max_sentence_words = std::max(m.max_sentence_words, run);
            run = 0;
        }
    }
    m.max_sentence_words = std::max(m.max_sentence_words, run);

    std::size_t symbols = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] == '#') {
            ++symbols;
        } else if (t.compare(i, 3, "...") == 0) {
            ++symbols;
            i += 2;
        }
    }
    m.symbol_count = symbols;
    if (!words.empty()) m.symbol_to_word_ratio = double(symbols) / double(words.size());

    for (std::size_t n = 2; n <= 10; ++n) {
        std::map<std::vector<std::string>, std::vector<std::size_t>> grams;
        for (std::size_t i = 0; i + n <= norm.size(); ++i) {
            grams[std::vector<std::string>(norm.begin() + long(i), norm.begin() + long(i + n))].push_back(i);
        }
        auto coverage = [&](const std::vector<std::vector<std::size_t>>& groups) {
            std::vector<bool> mark(words.size(), false);
            for (const auto& starts : groups)
                for (auto s : starts)
                    for (std::size_t k = s; k < s + n; ++k) mark[k] = true;
            std::size_t c = 0;
            for (std::size_t k = 0; k < words.size(); ++k)
                if (mark[k]) c += words[k].size();
            return total_len == 0 ? 0.0 : double(c) / double(total_len);
        };
        double value = 0;
        if (n <= 4) {
            std::size_t best = 1;
            for (auto& [g, s] : grams) best = std::max(best, s.size());
            if (best >= 2)
                for (auto& [g, s] : grams)
                    if (s.size() == best) value = std::max(value, coverage({s}));
        } else {
            std::vector<std::vector<std::size_t>> repeated;
            for (auto& [g, s] : grams)
                if (s.size() >= 2) repeated.push_back(s);
            value = coverage(repeated);
        }
        m.ngram_fraction[n - 2] = value;
    }

    std::vector<std::string> nonblank;
    std::vector<std::size_t> lens;
    for (const auto& l : naive_lines(t)) {
        if (naive_blank(l)) continue;
        nonblank.push_back(l);
        lens.push_back(l.size());
    }
    m.line_count = nonblank.size();
    std::sort(lens.rbegin(), lens.rend());
    if (lens.size() >= 3) m.third_longest_line_len = lens[2];
    m.dup_line_fraction = dup_fraction(nonblank);

    std::vector<std::string> paras;
    std::string cur;
    bool have = false;
    for (const auto& l : naive_lines(t)) {
        if (l.empty()) {
            if (have && !naive_blank(cur)) paras.push_back(cur);
            cur.clear();
            have = false;
        } else {
            cur = have ? cur + "\n" + l : l;
            have = true;
        }
    }
    if (have && !naive_blank(cur)) paras.push_back(cur);
    m.dup_para_fraction = dup_fraction(paras);
    return m;
}

std::string generated_text(util::Rng& rng) {
    static const std::vector<std::string> vocab = {"the", "The", "and", "of", "to", "with", "cat", "dog", "river",
                                                   "stone", "bright", "a", "42", "2023", "x1", "walked", "quickly",
                                                   "that", "have", "be", "blue", "window", "over"};
    static const std::vector<std::string> affix = {"", "", "", ".", ",", "!", "?", "...", "#", ":", "\"", "("};
    std::vector<std::string> produced_lines;
    std::string out;
    std::size_t words = 1 + rng.below(300);
    std::string line;
    for (std::size_t i = 0; i < words; ++i) {
        std::string w = vocab[rng.below(vocab.size())];
        std::string a = affix[rng.below(affix.size())];
        w = a == "(" || a == "\"" ? a + w : w + a;
        if (!line.empty()) line += rng.below(20) == 0 ? "  " : " ";
        line += w;
        if (rng.below(8) == 0) {
            produced_lines.push_back(line);
            line.clear();
        }
    }
    if (!line.empty()) produced_lines.push_back(line);
    for (std::size_t i = 0; i < produced_lines.size(); ++i) {
        std::string l = produced_lines[i];
        if (i > 0 && rng.below(6) == 0) l = produced_lines[rng.below(i)];  // exact repeat
        if (i > 0) out += std::string(1 + rng.below(3), '\n');
        if (rng.below(15) == 0) out += "   \n";
        out += l;
    }
    return out;
}

void check_metrics_equal(const DocMetrics& got, const DocMetrics& want) {
    CHECK(got.word_count == want.word_count);
    CHECK(got.letter_chars == want.letter_chars);
    CHECK(got.digit_chars == want.digit_chars);
    CHECK(got.total_chars == want.total_chars);
    CHECK(got.most_common_char == want.most_common_char);
    CHECK(got.most_common_char_count == want.most_common_char_count);
    CHECK(got.top_word_fraction == doctest::Approx(want.top_word_fraction));
    CHECK(got.words_with_letter_fraction == doctest::Approx(want.words_with_letter_fraction));
    CHECK(got.stopword_count == want.stopword_count);
    CHECK(got.mean_word_length == doctest::Approx(want.mean_word_length));
    CHECK(got.line_count == want.line_count);
    CHECK(got.third_longest_line_len == want.third_longest_line_len);
    CHECK(got.newline_fraction == doctest::Approx(want.newline_fraction));
    CHECK(got.max_word_len == want.max_word_len);
    CHECK(got.max_sentence_words == want.max_sentence_words);
    CHECK(got.symbol_count == want.symbol_count);
    CHECK(got.symbol_to_word_ratio == doctest::Approx(want.symbol_to_word_ratio));
    for (std::size_t n = 2; n <= 10; ++n) {
        CAPTURE(n);
        CHECK(got.ngram(n) == doctest::Approx(want.ngram(n)));
    }
    CHECK(got.dup_line_fraction == doctest::Approx(want.dup_line_fraction));
    CHECK(got.dup_para_fraction == doctest::Approx(want.dup_para_fraction));
}

}  // namespace

TEST_CASE("normalize_characters") {
    CHECK(normalize_characters("a\u00A0b") == "a b");
    CHECK(normalize_characters("a\u200Bb") == "ab");
    CHECK(normalize_characters("a\u3000\u3000b") == "a  b");
    CHECK(normalize_characters("\uFEFFx\u200Dy\u2060z\u00AD") == "xyz");
    CHECK(normalize_characters("é…中") == "é…中");
}

TEST_CASE("trim_effective_lines") {
    CHECK(trim_effective_lines(lines({"Menu", "Hello, world.", "Footer"})) == "Hello, world.");
    auto keep_all = lines({"Four words right here", "no punct", "End here."});
    CHECK(trim_effective_lines(keep_all) == keep_all);
    CHECK(trim_effective_lines(lines({"Menu", "Login"})) == "");
    CHECK(trim_effective_lines(lines({"Top", "First。", "mid", "Last!", "tail"})) == lines({"First。", "mid", "Last!"}));
    CHECK(trim_effective_lines("") == "");
}

TEST_CASE("scrub_lines") {
    HeuristicConfig c;
    CHECK(scrub_lines("We use cookies — see our cookie policy here.", c) == "We use cookies — see our  here.");
    CHECK(scrub_lines("Read the Cookie Policy.", c) == "Read the .");
    CHECK(scrub_lines(lines({"keep me", "enable javascript to continue", "and me"}), c) == lines({"keep me", "and me"}));
    CHECK(scrub_lines(lines({"a", "   ", "b"}), c) == lines({"a", "b"}));
    CHECK(scrub_lines(lines({"a", "LOREM IPSUM dolor", "function() {", "b"}), c) == lines({"a", "b"}));
    // Paragraph breaks (empty lines) survive.
    CHECK(scrub_lines(lines({"a", "", "b"}), c) == lines({"a", "", "b"}));
    // Removal runs to a fixed point.
    CHECK(scrub_lines("cookie pcookie policyolicy x", c) == " x");
}

TEST_CASE("cleaning steps are idempotent") {
    util::Rng rng(99);
    HeuristicConfig c;
    const std::vector<std::string> extras = {"\u00A0", "\u200B", "cookie policy", "  ", "\n   \n", "javascript",
                                             "Cookie cookie policy Policy", "\u3000", "{", "\uFEFF"};
    for (int i = 0; i < 300; ++i) {
        std::string t = generated_text(rng);
        for (int k = 0; k < 5; ++k) {
            std::size_t at = rng.below(t.size() + 1);
            // keep UTF-8 intact: only insert at ASCII boundaries
            while (at < t.size() && (static_cast<unsigned char>(t[at]) & 0xC0) == 0x80) ++at;
            t.insert(at, extras[rng.below(extras.size())]);
        }
        auto n1 = normalize_characters(t);
        CHECK(normalize_characters(n1) == n1);
        auto t1 = trim_effective_lines(n1);
        CHECK(trim_effective_lines(t1) == t1);
        auto s1 = scrub_lines(t1, c);
        CHECK(scrub_lines(s1, c) == s1);
    }
}

TEST_CASE("compute_metrics examples") {
    auto m = compute_metrics("the cat and the dog.");
    CHECK(m.word_count == 5);
    CHECK(m.stopword_count == 3);
    auto rep = compute_metrics("aaa bbb aaa bbb aaa bbb");
    CHECK(rep.ngram(2) == 1.0);
    auto ld = compute_metrics("ab 12345");
    CHECK(ld.letter_chars == 2);
    CHECK(ld.digit_chars == 5);
    auto empty = compute_metrics("");
    CHECK(empty.word_count == 0);
    CHECK(empty.total_chars == 0);
    CHECK(empty.most_common_char_count == 0);
    CHECK(empty.ngram(10) == 0.0);
}

TEST_CASE("most common character ignores whitespace and breaks ties by code point") {
    auto m = compute_metrics("b a,  , a b");
    CHECK(m.most_common_char == U',');
    CHECK(m.most_common_char_count == 2);
}

TEST_CASE("duplicate lines and paragraphs") {
    auto m = compute_metrics(lines({"same line", "other", "same line"}));
    CHECK(m.dup_line_fraction == doctest::Approx(9.0 / 23.0));
    auto p = compute_metrics("para one\n\npara two\n\npara one\n");
    CHECK(p.dup_para_fraction == doctest::Approx(8.0 / 24.0));
}

TEST_CASE("compute_metrics agrees with a direct-count oracle") {
    util::Rng rng(4242);
    for (int i = 0; i < 400; ++i) {
        std::string t = generated_text(rng);
        CAPTURE(t);
        check_metrics_equal(compute_metrics(t), naive_metrics(t));
    }
}

TEST_CASE("rule boundary fixtures") {
    auto cases = testing::rule_boundary_cases();
    auto extra = testing::rule_secondary_cases();
    cases.insert(cases.end(), extra.begin(), extra.end());
    for (const auto& c : cases) {
        CAPTURE(c.name);
        auto m = compute_metrics(c.text);
        auto failing = failing_rules(m, c.text);
        bool hit = std::find(failing.begin(), failing.end(), c.rule) != failing.end();
        CHECK(hit == c.expect_fail);
        if (c.isolated) {
            auto outcome = apply_drop_rules(m, c.text);
            if (c.expect_fail) {
                CHECK(failing == std::vector<int>{c.rule});
                CHECK(outcome.rule_id == rule_id(c.rule));
            } else {
                CHECK(failing.empty());
                CHECK(outcome.kept);
            }
        }
    }
    CHECK(testing::rule_boundary_cases().size() == 36);
}

TEST_CASE("word count upper bound") {
    auto words = testing::fixture::base_words(100001);
    auto at_limit = testing::fixture::render(std::vector<std::string>(words.begin(), words.end() - 1));
    auto over = testing::fixture::render(words);
    CHECK_FALSE(rule_fails(4, compute_metrics(at_limit), at_limit));
    CHECK(rule_fails(4, compute_metrics(over), over));
}

TEST_CASE("documented drop examples") {
    auto w49 = testing::fixture::render(testing::fixture::base_words(49));
    CHECK(apply_drop_rules(compute_metrics(w49), w49).rule_id == "R4");
    auto r3 = testing::fixture::r3(600, 50);
    CHECK(apply_drop_rules(compute_metrics(r3), r3).rule_id == "R3");
    auto colon = testing::fixture::render(testing::fixture::base_words(60));
    colon.back() = ' ';
    colon += "as follows:";
    CHECK(apply_drop_rules(compute_metrics(colon), colon).rule_id == "R17");
}

TEST_CASE("clean English fixture passes every rule") {
    auto text = data_file("heuristic/clean_200.txt");
    auto m = compute_metrics(text);
    CHECK(m.word_count >= 200);
    auto outcome = apply_drop_rules(m, text);
    CHECK(outcome.kept);
    CHECK_FALSE(outcome.rule_id.has_value());
    CHECK(failing_rules(m, text).empty());
    CHECK(outcome.diagnostics.count("word_count") == 1);
}

TEST_CASE("failing set is order independent and rule_id is its first element") {
    util::Rng rng(17);
    for (int i = 0; i < 300; ++i) {
        std::string t = generated_text(rng);
        auto m = compute_metrics(t);
        auto failing = failing_rules(m, t);
        std::vector<int> reversed;
        for (int r = kRuleCount; r >= 1; --r)
            if (rule_fails(r, m, t)) reversed.push_back(r);
        std::reverse(reversed.begin(), reversed.end());
        CHECK(failing == reversed);
        auto o1 = apply_drop_rules(m, t);
        auto o2 = apply_drop_rules(compute_metrics(t), t);
        CHECK(o1 == o2);
        if (failing.empty()) {
            CHECK(o1.kept);
        } else {
            CHECK(o1.rule_id == rule_id(failing.front()));
        }
    }
}

TEST_CASE("a 600-space run flips kept documents to R12") {
    std::vector<std::string> kept;
    for (const auto& c : testing::rule_boundary_cases())
        if (!c.expect_fail && c.isolated) kept.push_back(c.text);
    kept.push_back(data_file("heuristic/clean_200.txt"));
    for (const auto& t : kept) {
        REQUIRE(apply_drop_rules(compute_metrics(t), t).kept);
        std::string flipped = t + std::string(600, ' ');
        CHECK(apply_drop_rules(compute_metrics(flipped), flipped).rule_id == "R12");
    }
}

TEST_CASE("text-level predicates") {
    CHECK(only_separators(""));
    CHECK(only_separators(" \r\n\t"));
    CHECK_FALSE(only_separators(" x "));
    CHECK(longest_run("a   b  c", ' ') == 3);
    CHECK(has_decoding_damage("bad \xC2\x85 control"));
    CHECK(has_decoding_damage("x\xEF\xBF\xBD"));
    CHECK_FALSE(has_decoding_damage("fine é"));
    CHECK(ends_with_colon("see below:  \n"));
    CHECK_FALSE(ends_with_colon("time 10:30"));
    HeuristicConfig c;
    CHECK(has_image_url("look (https://cdn.example.org/a/b/Photo.JPG?x=1) here", c.image_extensions));
    CHECK(has_image_url("www.example.com/pic.webp", c.image_extensions));
    CHECK_FALSE(has_image_url("https://example.org/png/page", c.image_extensions));
    CHECK_FALSE(has_image_url("file.png is not a link", c.image_extensions));
    CHECK(is_url_only("https://example.com/page"));
    CHECK(is_url_only("  http://a.example \n www.b.example  "));
    CHECK_FALSE(is_url_only("visit https://example.com"));
    CHECK_FALSE(is_url_only(""));
}

TEST_CASE("R10 literal reading is configurable") {
    auto t = testing::fixture::render(testing::fixture::base_words(60));
    auto m = compute_metrics(t);
    CHECK_FALSE(rule_fails(10, m, t));
    HeuristicConfig literal;
    literal.symbol_ratio_mode = SymbolRatioMode::characters;
    CHECK(rule_fails(10, m, t, literal));
}

TEST_CASE("R2 keeps prose without digits") {
    auto m = compute_metrics("only letters here");
    CHECK_FALSE(rule_fails(2, m, "only letters here"));
    CHECK(std::isinf(apply_drop_rules(m, "only letters here").diagnostics.at("letter_digit_ratio")));
}

TEST_CASE("config overrides") {
    testing::TempDir dir;
    {
        std::ofstream f(dir / "rules.toml");
        f << "min_words = 10\nstopwords = [\"foo\", \"bar\"]\nmax_top_ngram_fraction = [0.3, 0.3, 0.3]\n"
             "disabled_rules = [\"R8\", \"R17\"]\nsymbol_ratio_mode = \"characters\"\n";
    }
    auto c = load_config(dir / "rules.toml");
    CHECK(c.min_words == 10);
    CHECK(c.stopwords == std::vector<std::string>{"foo", "bar"});
    CHECK(c.max_top_ngram_fraction[1] == 0.3);
    CHECK(c.disabled_rules == std::set<int>{8, 17});
    CHECK(c.symbol_ratio_mode == SymbolRatioMode::characters);
    CHECK(c.max_words == 100000);

    HeuristicConfig d;
    CHECK_THROWS_AS(apply_overrides(d, nlohmann::ordered_json{{"min_wrods", 3}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_overrides(d, nlohmann::ordered_json{{"min_words", -3}}), std::invalid_argument);
    CHECK_THROWS_AS(apply_overrides(d, nlohmann::ordered_json{{"disabled_rules", {"R19"}}}), std::invalid_argument);

    auto roundtrip = to_json(c);
    HeuristicConfig e;
    apply_overrides(e, roundtrip);
    CHECK(to_json(e) == roundtrip);

    // Disabled rules are skipped.
    auto t = testing::fixture::r17(true);
    CHECK(apply_drop_rules(compute_metrics(t, c), t, c).rule_id != "R17");
}

TEST_CASE("clean_document pipeline") {
    auto raw = "Home\nLogin\n" + data_file("heuristic/clean_200.txt") + "\nShare\n";
    auto r = clean_document(raw);
    CHECK(r.outcome.kept);
    CHECK(r.text.rfind("Home", 0) == std::string::npos);
    CHECK(r.text.find("Share") == std::string::npos);
}
