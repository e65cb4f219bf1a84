#pragma once

// Boundary fixtures for the eighteen drop rules. Each rule gets a document
// that sits exactly on the passing side of its threshold and one that sits
// one unit past it. Expected values are established by construction and by
// plain byte counting here, never by calling the code under test.

#include <algorithm>
#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace refinery::testing {

struct RuleCase {
    std::string name;
    int rule = 0;
    bool expect_fail = false;
    // true: the fixture trips this rule and nothing else (or nothing at all
    // for a passing fixture), so the full outcome is checked too.
    bool isolated = true;
    std::string text;
};

namespace fixture {

inline std::string syllable_word(std::size_t index, int syllables) {
    static const std::string consonants = "bdfgklmnprstvz";
    static const std::string vowels = "aeiou";
    const std::size_t base = consonants.size() * vowels.size();
    std::size_t space = 1;
    for (int i = 0; i < syllables; ++i) space *= base;
    std::size_t v = (index * 7919 + 13) % space;
    std::string w;
    for (int i = 0; i < syllables; ++i) {
        std::size_t s = v % base;
        v /= base;
        w += consonants[s / vowels.size()];
        w += vowels[s % vowels.size()];
    }
    return w;
}

// n distinct consonant-vowel words.
inline std::vector<std::string> distinct_words(std::size_t n, int syllables = 3, std::size_t offset = 0) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(syllable_word(i + offset, syllables));
    return out;
}

// Words joined by spaces, `per_line` words per line, each line closed by '.'.
inline std::string render(const std::vector<std::string>& words, std::size_t per_line = 10) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        out += words[i];
        bool line_end = (i + 1) % per_line == 0 || i + 1 == words.size();
        if (line_end) {
            out += '.';
            if (i + 1 != words.size()) out += '\n';
        } else {
            out += ' ';
        }
    }
    return out;
}

// Distinct words with "the" and "and" planted: two stop words.
inline std::vector<std::string> base_words(std::size_t n, int syllables = 3) {
    auto w = distinct_words(n, syllables);
    if (n > 1) w[1] = "the";
    if (n > 6) w[6] = "and";
    return w;
}

// Total length of whitespace-separated words in an ASCII text.
inline std::size_t word_chars(const std::string& text) {
    std::size_t n = 0;
    for (char c : text) {
        if (c != ' ' && c != '\n' && c != '\t' && c != '\r') ++n;
    }
    return n;
}

inline std::size_t count_char(const std::string& text, char c) {
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), c));
}

inline std::size_t top_letter_count(const std::string& text) {
    std::array<std::size_t, 26> counts{};
    for (char c : text) {
        if (c >= 'a' && c <= 'z') ++counts[static_cast<std::size_t>(c - 'a')];
    }
    return *std::max_element(counts.begin(), counts.end());
}

// Appends one letter at a time to words (skipping `protected_words`) until
// the rendered text has exactly `target` word characters.
inline std::string pad_to_word_chars(std::vector<std::string> words, std::size_t target, std::size_t per_line,
                                     const std::vector<std::string>& protected_words = {"the", "and"}) {
    std::size_t k = 0;
    while (true) {
        std::string text = render(words, per_line);
        std::size_t have = word_chars(text);
        if (have == target) return text;
        if (have > target) return {};  // caller misconfigured
        while (std::find(protected_words.begin(), protected_words.end(), words[k % words.size()]) !=
               protected_words.end()) {
            ++k;
        }
        words[k % words.size()] += 's';
        ++k;
    }
}

inline std::string r1(bool fail) {
    auto words = base_words(60);
    std::size_t letters = top_letter_count(render(words));
    // Commas and letters tie at `letters`; ties go to the smaller code point.
    std::size_t commas = fail ? letters : letters - 1;
    for (std::size_t i = 0; i < commas; ++i) words[i % words.size()] += ',';
    return render(words);
}

inline std::string r2(bool fail) {
    // 23 letters against 50 digits is a ratio of exactly 0.46.
    return "abcdefghijklmnopqrstuvw " + std::string(fail ? 51 : 50, '7');
}

inline std::string r3(std::size_t total, std::size_t repeats) {
    auto words = distinct_words(total - repeats);
    std::vector<std::string> out;
    std::size_t stride = std::max<std::size_t>(1, total / repeats);
    std::size_t placed = 0;
    std::size_t next_other = 0;
    for (std::size_t i = 0; i < total; ++i) {
        if (placed < repeats && i % stride == 0) {
            out.push_back("the");
            ++placed;
        } else if (next_other < words.size()) {
            out.push_back(words[next_other++]);
        } else {
            out.push_back("the");
            ++placed;
        }
    }
    return render(out);
}

inline std::string r5(bool fail) {
    auto words = base_words(100);
    std::size_t numbers = fail ? 21 : 20;
    for (std::size_t i = 0; i < numbers; ++i) words[10 + i] = std::to_string(10 + i);
    return render(words);
}

inline std::string r6(bool fail) {
    auto words = base_words(60);
    if (fail) words[6] = syllable_word(1000, 3);
    return render(words);
}

inline std::string r7(bool fail) {
    // Fifty words averaging exactly 10 characters, or one character more.
    return pad_to_word_chars(base_words(50, 4), fail ? 501 : 500, 10);
}

inline std::string r8(bool fail) {
    auto words = base_words(50);
    std::string text = render(std::vector<std::string>(words.begin(), words.begin() + 25), 10);
    for (char& c : text) {
        if (c == '\n') c = ' ';
    }
    std::string second = render(std::vector<std::string>(words.begin() + 25, words.end()), 10);
    for (char& c : second) {
        if (c == '\n') c = ' ';
    }
    // Third line: 9 + 1 + 10 = 20 characters, or 19.
    std::string third = syllable_word(5000, 5).substr(0, 9) + " " + syllable_word(5001, 5).substr(0, fail ? 9 : 10);
    return text + "\n" + second + "\n" + third;
}

inline std::string r9(bool fail) {
    // Ten copies of a 4+4 character bigram cover 80 of exactly 400 word
    // characters (fraction 0.20), or of 399.
    auto words = base_words(70, 2);
    for (std::size_t j = 0; j < 10; ++j) {
        words[7 * j + 2] = "mmmm";
        words[7 * j + 3] = "nnnn";
    }
    return pad_to_word_chars(words, fail ? 399 : 400, 7, {"the", "and", "mmmm", "nnnn"});
}

inline std::string r10(bool fail) {
    auto words = base_words(100, 4);
    std::size_t symbols = fail ? 121 : 120;
    for (std::size_t i = 0; i < symbols; ++i) words[i % words.size()] += (i % 2 == 0) ? "#" : "…";
    return render(words);
}

inline std::string r11(bool fail) { return fail ? " \t\r\n \n" : " \t\r\n \n."; }

inline std::string r12(bool fail) {
    auto words = base_words(60);
    words[20] += std::string(fail ? 499 : 498, ' ');  // plus the separator
    return render(words);
}

inline std::string r12_newlines(bool fail) {
    auto words = base_words(60);
    words[20].insert(0, std::string(fail ? 7 : 6, '\n'));  // after the line break closing word 19
    return render(words);
}

inline std::string r13(bool fail) {
    auto long_words = base_words(30);
    auto short_words = distinct_words(40, 3, 100);
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < 3; ++i) {
        std::string line;
        for (std::size_t j = 0; j < 10; ++j) {
            line += long_words[10 * i + j];
            line += j == 9 ? "." : " ";
        }
        lines.push_back(line);
    }
    for (std::size_t i = 0; i < short_words.size(); ++i) {
        lines.push_back(short_words[i] + (i % 5 == 4 ? "." : ""));
    }
    std::vector<std::size_t> seps(lines.size() - 1, 1);
    auto assemble = [&] {
        std::string t;
        for (std::size_t i = 0; i < lines.size(); ++i) {
            t += lines[i];
            if (i < seps.size()) t += std::string(seps[i], '\n');
        }
        return t;
    };
    std::size_t next_sep = 0;
    std::size_t next_word = 3;
    while (true) {
        std::string t = assemble();
        std::size_t newlines = count_char(t, '\n');
        if (4 * newlines == t.size()) break;
        if (4 * newlines < t.size()) {
            ++seps[next_sep % seps.size()];
            ++next_sep;
        } else {
            lines[next_word % lines.size()].insert(0, "s");
            ++next_word;
        }
    }
    if (fail) ++seps[seps.size() / 2];
    return assemble();
}

inline std::string r14(bool fail) {
    auto words = base_words(60);
    words[30] += fail ? "�" : "¿";
    return render(words);
}

inline std::string r15(bool fail) {
    auto words = base_words(60);
    std::string longest;
    for (std::size_t i = 0; i < (fail ? 46u : 45u); ++i) longest += static_cast<char>('a' + (i * 7) % 26);
    words[30] = longest;
    return render(words);
}

inline std::string r16(bool fail) {
    auto words = base_words(fail ? 67 : 66);
    std::size_t first = fail ? 57 : 56;
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        out += words[i];
        bool end = i + 1 == first || i + 1 == words.size();
        if (end) out += '.';
        if (i + 1 == words.size()) break;
        out += (i + 1) % 10 == 0 ? '\n' : ' ';
    }
    return out;
}

inline std::string r17(bool fail) {
    auto text = render(base_words(60));
    text.back() = fail ? ':' : '.';
    return text;
}

inline std::string r18(bool fail) {
    auto words = base_words(60);
    words[25] = fail ? "http://example.com/photo.png" : "http://example.com/photo.html";
    return render(words);
}

}  // namespace fixture

// One passing and one failing fixture per rule, in rule order.
inline std::vector<RuleCase> rule_boundary_cases() {
    using namespace fixture;
    std::vector<RuleCase> cases;
    auto add = [&](int rule, const std::string& what, std::string pass, std::string fail, bool pass_isolated = true,
                   bool fail_isolated = true) {
        std::string id = "R" + std::to_string(rule) + " " + what;
        cases.push_back({id + " (pass)", rule, false, pass_isolated, std::move(pass)});
        cases.push_back({id + " (fail)", rule, true, fail_isolated, std::move(fail)});
    };
    add(1, "comma count reaches top letter count", r1(false), r1(true));
    add(2, "letters/digits 23/50 vs 23/51", r2(false), r2(true), false, false);
    add(3, "600 words, top word 45 vs 46", r3(600, 45), r3(600, 46));
    add(4, "49 vs 50 words", render(base_words(50)), render(base_words(49)));
    add(5, "20 vs 21 of 100 words without letters", r5(false), r5(true));
    add(6, "two stop words vs one", r6(false), r6(true));
    add(7, "mean word length 10.00 vs 10.02", r7(false), r7(true));
    add(8, "third longest line 20 vs 19 chars", r8(false), r8(true));
    add(9, "top bigram coverage 0.20 vs 80/399", r9(false), r9(true));
    add(10, "120 vs 121 symbols over 100 words", r10(false), r10(true));
    add(11, "separators only vs one other char", r11(false), r11(true), false, false);
    add(12, "499 vs 500 consecutive spaces", r12(false), r12(true));
    add(13, "newline fraction 0.25 vs above", r13(false), r13(true));
    add(14, "U+00BF vs U+FFFD", r14(false), r14(true));
    add(15, "45 vs 46 letter word", r15(false), r15(true));
    add(16, "56 vs 57 word sentence", r16(false), r16(true));
    add(17, "final period vs final colon", r17(false), r17(true));
    add(18, "html link vs png link", r18(false), r18(true));
    return cases;
}

// Second thresholds of rules that have two.
inline std::vector<RuleCase> rule_secondary_cases() {
    using namespace fixture;
    std::vector<RuleCase> cases;
    cases.push_back({"R3 500 words, top word 150 (pass)", 3, false, true, r3(500, 150)});
    cases.push_back({"R3 500 words, top word 151 (fail)", 3, true, true, r3(500, 151)});
    cases.push_back({"R12 7 consecutive newlines (pass)", 12, false, true, r12_newlines(false)});
    cases.push_back({"R12 8 consecutive newlines (fail)", 12, true, true, r12_newlines(true)});
    return cases;
}

}  // namespace refinery::testing
