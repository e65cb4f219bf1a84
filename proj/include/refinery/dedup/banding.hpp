#pragma once

#include <cstddef>

namespace refinery::dedup {

struct BandingPlan {
    std::size_t bands = 1;
    std::size_t rows = 1;
    double threshold = 0.7;
    bool operator==(const BandingPlan&) const = default;
};

// Probability that a pair with Jaccard s shares at least one band:
// 1 - (1 - s^rows)^bands.
double collision_probability(const BandingPlan& plan, double s);

// 0.5 * false-positive area below t plus 0.5 * false-negative area above t,
// each integrated by the midpoint rule with 1000 points.
double banding_objective(const BandingPlan& plan);

// Exhaustive search over bands * rows <= num_perm. Objectives within 1e-12
// tie; ties go to the fewest bands, then the fewest rows. Throws
// std::invalid_argument unless num_perm >= 2 and 0 < threshold < 1.
BandingPlan optimal_bands(std::size_t num_perm, double threshold);

}  // namespace refinery::dedup
