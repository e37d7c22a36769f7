#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>

#include "affsob/core/random.hpp"
#include "affsob/field/affine_map.hpp"
#include "affsob/field/mask.hpp"
#include "affsob/field/resample.hpp"

namespace affsob {

struct LiminfEstimate {
    double estimate = 0.0;       ///< volume estimate of the prefix intersection inside the window
    double standard_error = 0.0;
    Box window;                  ///< sampling window actually used
    double window_volume = 0.0;
    std::size_t prefix = 0;
    std::size_t samples = 0;
    std::size_t hits = 0;
};

/// Monte-Carlo estimate of |W ∩ ⋂_{k<prefix} T_k⁻¹(Ω − y_k)|, where map k is
/// x ↦ T_k x + y_k, so x belongs to the k-th set exactly when in_region(map_k(x)).
///
/// The window W is `window` intersected, when `region_box` is given, with the
/// preimage boxes T_k⁻¹(region_box − y_k). If that intersection is empty the
/// estimate is exactly 0.
template <class Region>
LiminfEstimate liminf_measure_estimate(Region&& in_region, const std::optional<Box>& region_box,
                                       std::span<const AffineMap> maps, std::size_t prefix, std::size_t samples,
                                       const Box& window, std::uint64_t seed = 0) {
    detail::require(prefix >= 1 && prefix <= maps.size(), "liminf_measure_estimate: prefix must be in [1, number of maps]");
    detail::require(samples >= 1000, "liminf_measure_estimate: at least 1000 samples are required");
    const int n = window.dim();
    for (const auto& m : maps) detail::require(m.dim() == n, "liminf_measure_estimate: map dimension mismatch");
    if (window.empty()) throw InvalidArgument("liminf_measure_estimate: the sampling window is empty");

    LiminfEstimate out;
    out.prefix = prefix;
    out.samples = samples;
    Box w = window;
    if (region_box)
        for (std::size_t k = 0; k < prefix; ++k) w = w.intersect(preimage_box(maps[k], *region_box));
    out.window = w;
    if (w.empty()) return out;
    out.window_volume = w.volume();

    Rng rng(seed);
    SmallVector x(n);
    for (std::size_t s = 0; s < samples; ++s) {
        for (int a = 0; a < n; ++a) x[a] = rng.uniform(w.lo[a], w.hi[a]);
        bool in_all = true;
        for (std::size_t k = 0; k < prefix && in_all; ++k) in_all = in_region(maps[k](x));
        if (in_all) ++out.hits;
    }
    const double q = static_cast<double>(out.hits) / static_cast<double>(samples);
    out.estimate = out.window_volume * q;
    out.standard_error = out.window_volume * std::sqrt(q * (1.0 - q) / static_cast<double>(samples));
    return out;
}

/// Mask version: Ω is the rasterised mask (nearest-node membership) and the
/// window is derived from its bounding box, padded by half a cell.
inline LiminfEstimate liminf_measure_estimate(const DomainMask& mask, std::span<const AffineMap> maps, std::size_t prefix,
                                              std::size_t samples, std::uint64_t seed = 0) {
    Box b = mask.bounding_box();
    for (int a = 0; a < b.dim(); ++a) {
        b.lo[a] -= 0.5 * mask.grid().spacing(a);
        b.hi[a] += 0.5 * mask.grid().spacing(a);
    }
    detail::require(!maps.empty(), "liminf_measure_estimate: no maps given");
    Box outer{SmallVector(b.dim(), -std::numeric_limits<double>::infinity()),
              SmallVector(b.dim(), std::numeric_limits<double>::infinity())};
    outer = outer.intersect(preimage_box(maps[0], b));
    return liminf_measure_estimate([&](const SmallVector& z) { return mask.contains(z); }, b, maps, prefix, samples,
                                   outer, seed);
}

} // namespace affsob
