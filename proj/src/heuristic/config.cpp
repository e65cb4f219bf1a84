#include "refinery/heuristic/config.hpp"

#include <functional>
#include <map>
#include <stdexcept>

#include "refinery/util/toml.hpp"

namespace refinery::heuristic {

using ojson = nlohmann::ordered_json;

namespace {

template <typename T>
T number(const ojson& v, const std::string& key) {
    if (!v.is_number()) throw std::invalid_argument("'" + key + "' must be a number");
    if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || v.get<long long>() < 0) {
            throw std::invalid_argument("'" + key + "' must be a non-negative integer");
        }
    }
    return v.get<T>();
}

std::vector<std::string> strings(const ojson& v, const std::string& key) {
    if (!v.is_array()) throw std::invalid_argument("'" + key + "' must be an array of strings");
    std::vector<std::string> out;
    for (const auto& e : v) {
        if (!e.is_string()) throw std::invalid_argument("'" + key + "' must be an array of strings");
        out.push_back(e.get<std::string>());
    }
    return out;
}

template <std::size_t N>
std::array<double, N> fixed_numbers(const ojson& v, const std::string& key) {
    if (!v.is_array() || v.size() != N) {
        throw std::invalid_argument("'" + key + "' must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = number<double>(v[i], key);
    return out;
}

using Setter = std::function<void(HeuristicConfig&, const ojson&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
#define REFINERY_NUM(field, type) \
    {#field, [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.field = number<type>(v, k); }}
    static const std::map<std::string, Setter> table = {
        {"remove_patterns", [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.remove_patterns = strings(v, k); }},
        {"line_drop_patterns", [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.line_drop_patterns = strings(v, k); }},
        {"stopwords", [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.stopwords = strings(v, k); }},
        {"image_extensions", [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.image_extensions = strings(v, k); }},
        REFINERY_NUM(min_letter_digit_ratio, double),
        REFINERY_NUM(max_top_word_fraction, double),
        REFINERY_NUM(max_top_word_fraction_short, double),
        REFINERY_NUM(short_doc_max_words, std::size_t),
        REFINERY_NUM(min_words, std::size_t),
        REFINERY_NUM(max_words, std::size_t),
        REFINERY_NUM(min_words_with_letter_fraction, double),
        REFINERY_NUM(min_stopwords, std::size_t),
        REFINERY_NUM(min_mean_word_length, double),
        REFINERY_NUM(max_mean_word_length, double),
        REFINERY_NUM(min_lines, std::size_t),
        REFINERY_NUM(min_third_longest_line, std::size_t),
        REFINERY_NUM(max_dup_line_fraction, double),
        REFINERY_NUM(max_dup_para_fraction, double),
        {"max_top_ngram_fraction", [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.max_top_ngram_fraction = fixed_numbers<3>(v, k); }},
        {"max_dup_ngram_fraction", [](HeuristicConfig& c, const ojson& v, const std::string& k) { c.max_dup_ngram_fraction = fixed_numbers<6>(v, k); }},
        REFINERY_NUM(max_symbol_word_ratio, double),
        {"symbol_ratio_mode", [](HeuristicConfig& c, const ojson& v, const std::string& k) {
             std::string mode = v.is_string() ? v.get<std::string>() : "";
             if (mode == "symbols") {
                 c.symbol_ratio_mode = SymbolRatioMode::symbols;
             } else if (mode == "characters") {
                 c.symbol_ratio_mode = SymbolRatioMode::characters;
             } else {
                 throw std::invalid_argument("'" + k + "' must be \"symbols\" or \"characters\"");
             }
         }},
        REFINERY_NUM(space_run_limit, std::size_t),
        REFINERY_NUM(newline_run_limit, std::size_t),
        REFINERY_NUM(max_newline_fraction, double),
        REFINERY_NUM(max_word_length, std::size_t),
        REFINERY_NUM(max_sentence_words, std::size_t),
        {"disabled_rules", [](HeuristicConfig& c, const ojson& v, const std::string& k) {
             c.disabled_rules.clear();
             for (const auto& s : strings(v, k)) {
                 if (s.size() < 2 || s[0] != 'R') throw std::invalid_argument("bad rule id '" + s + "'");
                 int id = std::stoi(s.substr(1));
                 if (id < 1 || id > 18) throw std::invalid_argument("bad rule id '" + s + "'");
                 c.disabled_rules.insert(id);
             }
         }},
    };
#undef REFINERY_NUM
    return table;
}

}  // namespace

void apply_overrides(HeuristicConfig& config, const ojson& values) {
    if (!values.is_object()) throw std::invalid_argument("heuristic overrides must be a table");
    const auto& table = setters();
    for (auto it = values.begin(); it != values.end(); ++it) {
        auto setter = table.find(it.key());
        if (setter == table.end()) throw std::invalid_argument("unknown heuristic setting '" + it.key() + "'");
        setter->second(config, it.value(), it.key());
    }
}

HeuristicConfig load_config(const std::filesystem::path& path) {
    HeuristicConfig config;
    apply_overrides(config, util::parse_toml_file(path.string()));
    return config;
}

ojson to_json(const HeuristicConfig& c) {
    ojson j = ojson::object();
    j["remove_patterns"] = c.remove_patterns;
    j["line_drop_patterns"] = c.line_drop_patterns;
    j["stopwords"] = c.stopwords;
    j["min_letter_digit_ratio"] = c.min_letter_digit_ratio;
    j["max_top_word_fraction"] = c.max_top_word_fraction;
    j["max_top_word_fraction_short"] = c.max_top_word_fraction_short;
    j["short_doc_max_words"] = c.short_doc_max_words;
    j["min_words"] = c.min_words;
    j["max_words"] = c.max_words;
    j["min_words_with_letter_fraction"] = c.min_words_with_letter_fraction;
    j["min_stopwords"] = c.min_stopwords;
    j["min_mean_word_length"] = c.min_mean_word_length;
    j["max_mean_word_length"] = c.max_mean_word_length;
    j["min_lines"] = c.min_lines;
    j["min_third_longest_line"] = c.min_third_longest_line;
    j["max_dup_line_fraction"] = c.max_dup_line_fraction;
    j["max_dup_para_fraction"] = c.max_dup_para_fraction;
    j["max_top_ngram_fraction"] = c.max_top_ngram_fraction;
    j["max_dup_ngram_fraction"] = c.max_dup_ngram_fraction;
    j["max_symbol_word_ratio"] = c.max_symbol_word_ratio;
    j["symbol_ratio_mode"] = c.symbol_ratio_mode == SymbolRatioMode::symbols ? "symbols" : "characters";
    j["space_run_limit"] = c.space_run_limit;
    j["newline_run_limit"] = c.newline_run_limit;
    j["max_newline_fraction"] = c.max_newline_fraction;
    j["max_word_length"] = c.max_word_length;
    j["max_sentence_words"] = c.max_sentence_words;
    j["image_extensions"] = c.image_extensions;
    ojson disabled = ojson::array();
    for (int r : c.disabled_rules) disabled.push_back("R" + std::to_string(r));
    j["disabled_rules"] = std::move(disabled);
    return j;
}

}  // namespace refinery::heuristic
