#pragma once

// Brute-force cell-midpoint count of the measure of an intersection of
// preimages inside a box window.

#include <cstddef>
#include <functional>
#include <vector>

#include "affsob/core/small_matrix.hpp"

namespace oracle {

/// Measure of {x ∈ [lo, hi] : inside(k, x) for every k < count} in 2D, using
/// `cells` × `cells` midpoints.
inline double intersection_area_2d(const std::function<bool(std::size_t, double, double)>& inside, std::size_t count,
                                   double lo0, double hi0, double lo1, double hi1, std::size_t cells) {
    const double d0 = (hi0 - lo0) / static_cast<double>(cells), d1 = (hi1 - lo1) / static_cast<double>(cells);
    std::size_t hits = 0;
    for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t j = 0; j < cells; ++j) {
            const double x0 = lo0 + (static_cast<double>(i) + 0.5) * d0, x1 = lo1 + (static_cast<double>(j) + 0.5) * d1;
            bool all = true;
            for (std::size_t k = 0; k < count && all; ++k) all = inside(k, x0, x1);
            if (all) ++hits;
        }
    return static_cast<double>(hits) * d0 * d1;
}

} // namespace oracle
