#include "refinery/metrics/sampling.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "refinery/util/io.hpp"
#include "refinery/util/random.hpp"

namespace refinery::metrics {

std::vector<ScalarRecord> load_scalar_file(const std::filesystem::path& path) {
    util::InputFile in(path);
    std::vector<ScalarRecord> out;
    std::size_t line_no = 0;
    while (auto line = in.read_line()) {
        ++line_no;
        if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            auto j = nlohmann::json::parse(*line);
            out.push_back({j.at("id").get<std::string>(), j.at("value").get<double>()});
        } catch (const nlohmann::json::exception& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

StratifiedSample stratified_sample(std::vector<ScalarRecord> records, std::array<std::size_t, 3> quotas,
                                   std::uint64_t seed) {
    std::sort(records.begin(), records.end(), [](const ScalarRecord& a, const ScalarRecord& b) {
        return a.value != b.value ? a.value < b.value : a.id < b.id;
    });
    StratifiedSample out;
    const std::size_t n = records.size();
    util::Rng rng(seed);
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t begin = n * k / 3;
        const std::size_t end = n * (k + 1) / 3;
        out.population[k] = end - begin;
        std::vector<std::size_t> idx(end - begin);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
        if (idx.size() > quotas[k]) {
            rng.shuffle(idx);
            idx.resize(quotas[k]);
            std::sort(idx.begin(), idx.end());
        }
        for (auto i : idx) out.strata[k].push_back(records[i]);
    }
    return out;
}

}  // namespace refinery::metrics
