#include "refinery/metrics/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "refinery/util/io.hpp"

namespace refinery::metrics {

Histogram histogram(const std::vector<double>& values, const BinSpec& spec) {
    Histogram h;
    if (values.empty()) return h;
    if (spec.bins == 0) throw std::invalid_argument("histogram needs at least one bin");
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    const double lo = sorted.front();
    double hi = sorted.back();
    if (spec.truncation_quantile) {
        double q = *spec.truncation_quantile;
        if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("truncation quantile must be in (0, 1]");
        auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
        hi = sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
    }

    h.edges.resize(spec.bins + 1);
    for (std::size_t i = 0; i <= spec.bins; ++i) {
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(spec.bins);
    }
    h.edges.back() = hi;
    std::vector<std::size_t> counts(spec.bins, 0);
    for (double v : values) {
        if (v > hi) {
            ++h.out_of_range;
            continue;
        }
        std::size_t bin = 0;
        if (hi > lo) {
            double pos = (v - lo) / (hi - lo) * static_cast<double>(spec.bins);
            bin = std::min(static_cast<std::size_t>(pos), spec.bins - 1);
        }
        ++counts[bin];
        ++h.in_range;
    }
    h.percentages.resize(spec.bins);
    for (std::size_t i = 0; i < spec.bins; ++i) {
        h.percentages[i] = 100.0 * static_cast<double>(counts[i]) / static_cast<double>(h.in_range);
    }
    h.out_of_range_percent = 100.0 * static_cast<double>(h.out_of_range) / static_cast<double>(values.size());
    return h;
}

nlohmann::ordered_json to_json(const Histogram& h) {
    return {{"edges", h.edges},
            {"percentages", h.percentages},
            {"in_range", h.in_range},
            {"out_of_range", h.out_of_range},
            {"out_of_range_percent", h.out_of_range_percent}};
}

std::vector<double> threshold_grid(std::size_t points) {
    if (points < 2) throw std::invalid_argument("threshold grid needs at least two points");
    std::vector<double> grid(points);
    for (std::size_t i = 0; i < points; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(points - 1);
    return grid;
}

ScoreCurve exceedance_curve(std::vector<double> scores, const std::vector<double>& thresholds) {
    if (scores.empty()) throw std::invalid_argument("exceedance curve of an empty score set");
    for (double s : scores) {
        if (!(s >= 0.0 && s <= 1.0)) throw std::invalid_argument("score outside [0, 1]");
    }
    for (std::size_t i = 1; i < thresholds.size(); ++i) {
        if (!(thresholds[i] > thresholds[i - 1])) throw std::invalid_argument("thresholds must be strictly ascending");
    }
    std::sort(scores.begin(), scores.end());
    ScoreCurve curve{thresholds, {}};
    curve.percentages.reserve(thresholds.size());
    const auto n = static_cast<double>(scores.size());
    for (double t : thresholds) {
        auto above = scores.end() - std::upper_bound(scores.begin(), scores.end(), t);
        curve.percentages.push_back(100.0 * static_cast<double>(above) / n);
    }
    for (std::size_t i = 1; i < curve.percentages.size(); ++i) {
        if (curve.percentages[i] > curve.percentages[i - 1]) {
            throw std::logic_error("exceedance curve is not non-increasing");
        }
    }
    return curve;
}

double auc(const ScoreCurve& curve) {
    const auto& t = curve.thresholds;
    const auto& p = curve.percentages;
    if (t.size() != p.size()) throw std::invalid_argument("curve thresholds and percentages differ in length");
    if (t.size() < 2) throw std::invalid_argument("AUC needs at least two curve points");
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < t.size(); ++i) area += (p[i] + p[i + 1]) / 2.0 * (t[i + 1] - t[i]);
    return area;
}

std::map<std::string, std::vector<double>> load_score_file(const std::filesystem::path& path) {
    util::InputFile in(path);
    std::map<std::string, std::vector<double>> out;
    std::size_t line_no = 0;
    auto take = [&](const std::string& key, const nlohmann::json& v) {
        if (!v.is_number()) throw ScoreFileError("line " + std::to_string(line_no) + ": score '" + key + "' is not a number");
        double s = v.get<double>();
        if (!(s >= 0.0 && s <= 1.0)) throw ScoreFileError("line " + std::to_string(line_no) + ": score '" + key + "' outside [0, 1]");
        out[key].push_back(s);
    };
    while (auto line = in.read_line()) {
        ++line_no;
        if (line->find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(*line);
        } catch (const nlohmann::json::exception& e) {
            throw ScoreFileError("line " + std::to_string(line_no) + ": " + e.what());
        }
        if (!j.is_object()) throw ScoreFileError("line " + std::to_string(line_no) + ": expected an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (it.key() == "id") continue;
            if (it.key() == "scores" && it->is_object()) {
                for (auto s = it->begin(); s != it->end(); ++s) take(s.key(), *s);
            } else if (it->is_number()) {
                take(it.key(), *it);
            }
        }
    }
    return out;
}

std::vector<AucRow> auc_report(const std::map<std::string, std::vector<double>>& scores,
                               const std::vector<double>& thresholds) {
    std::vector<AucRow> rows;
    for (const auto& [dim, values] : scores) {
        AucRow row;
        row.dimension = dim;
        row.documents = values.size();
        row.curve = exceedance_curve(values, thresholds);
        row.auc = auc(row.curve);
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::ordered_json to_json(const std::vector<AucRow>& rows) {
    auto out = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        out.push_back({{"dimension", r.dimension},
                       {"documents", r.documents},
                       {"auc", r.auc},
                       {"thresholds", r.curve.thresholds},
                       {"percentages", r.curve.percentages}});
    }
    return out;
}

std::string format_table(const std::vector<AucRow>& rows) {
    std::ostringstream os;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-24s %10s %10s\n", "dimension", "documents", "auc");
    os << buf;
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-24s %10zu %10.4f\n", r.dimension.c_str(), r.documents, r.auc);
        os << buf;
    }
    return os.str();
}

}  // namespace refinery::metrics
