#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace refinery::metrics {

struct BinSpec {
    std::size_t bins = 20;
    // Values above this quantile of the input fall out of range. Quantiles
    // use the nearest-rank definition: the ceil(q*n)-th smallest value.
    std::optional<double> truncation_quantile;
};

struct Histogram {
    std::vector<double> edges;        // bins + 1 ascending edges; the last bin is closed
    std::vector<double> percentages;  // share of in-range values, sums to 100
    std::size_t in_range = 0;
    std::size_t out_of_range = 0;
    double out_of_range_percent = 0;  // share of all values
};

Histogram histogram(const std::vector<double>& values, const BinSpec& spec);
nlohmann::ordered_json to_json(const Histogram& h);

struct ScoreCurve {
    std::vector<double> thresholds;   // ascending in [0, 1]
    std::vector<double> percentages;  // non-increasing in [0, 100]
};

// i / (points - 1) for i = 0..points-1.
std::vector<double> threshold_grid(std::size_t points = 101);

// p(t) = 100 * |{ s > t }| / N. Throws std::invalid_argument for empty scores,
// scores outside [0, 1] or thresholds that are not ascending.
ScoreCurve exceedance_curve(std::vector<double> scores, const std::vector<double>& thresholds = threshold_grid());

// Trapezoidal area under the percentage curve; needs at least two points.
double auc(const ScoreCurve& curve);

// Score files hold one JSON object per line: an "id" plus per-dimension
// scores, either as top-level numbers or under a "scores" object.
class ScoreFileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::map<std::string, std::vector<double>> load_score_file(const std::filesystem::path& path);

struct AucRow {
    std::string dimension;
    std::size_t documents = 0;
    ScoreCurve curve;
    double auc = 0;
};

std::vector<AucRow> auc_report(const std::map<std::string, std::vector<double>>& scores,
                               const std::vector<double>& thresholds = threshold_grid());
nlohmann::ordered_json to_json(const std::vector<AucRow>& rows);
std::string format_table(const std::vector<AucRow>& rows);

}  // namespace refinery::metrics
