#include "refinery/dedup/banding.hpp"

#include <cmath>
#include <stdexcept>

namespace refinery::dedup {
namespace {

constexpr int kIntegrationPoints = 1000;
constexpr double kTieTolerance = 1e-12;

template <typename F>
double midpoint(double lo, double hi, F&& f) {
    double h = (hi - lo) / kIntegrationPoints;
    double sum = 0.0;
    for (int k = 0; k < kIntegrationPoints; ++k) sum += f(lo + (k + 0.5) * h);
    return sum * h;
}

}  // namespace

double collision_probability(const BandingPlan& plan, double s) {
    return 1.0 - std::pow(1.0 - std::pow(s, static_cast<double>(plan.rows)), static_cast<double>(plan.bands));
}

double banding_objective(const BandingPlan& plan) {
    double t = plan.threshold;
    double fp = midpoint(0.0, t, [&](double s) { return collision_probability(plan, s); });
    double fn = midpoint(t, 1.0, [&](double s) { return 1.0 - collision_probability(plan, s); });
    return 0.5 * fp + 0.5 * fn;
}

BandingPlan optimal_bands(std::size_t num_perm, double threshold) {
    if (num_perm < 2) throw std::invalid_argument("num_perm must be at least 2");
    if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("threshold must lie in (0, 1)");
    BandingPlan best{1, 1, threshold};
    double best_error = banding_objective(best);
    for (std::size_t b = 1; b <= num_perm; ++b) {
        for (std::size_t r = 1; b * r <= num_perm; ++r) {
            BandingPlan plan{b, r, threshold};
            double error = banding_objective(plan);
            if (error < best_error - kTieTolerance) {
                best = plan;
                best_error = error;
            }
        }
    }
    return best;
}

}  // namespace refinery::dedup
