#pragma once

#include <cmath>
#include <vector>

#include "affsob/field/affine_map.hpp"
#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// Multilinear interpolation of node data at an arbitrary point; 0 outside the
/// grid box. Fractional offsets within 1e-9 of a node are snapped to it, so
/// node-aligned queries return stored values exactly.
class Interpolator {
  public:
    explicit Interpolator(const ScalarField& u)
        : grid_(u.grid()), values_(u.values()) {}

    double operator()(const SmallVector& x) const noexcept {
        constexpr double snap = 1e-9;
        const int n = grid_.dim();
        std::array<std::size_t, kMaxDim> base{};
        std::array<double, kMaxDim> frac{};
        std::size_t lin = 0;
        for (int a = 0; a < n; ++a) {
            const double last = static_cast<double>(grid_.shape(a) - 1);
            double s = (x[a] - grid_.origin(a)) / grid_.spacing(a);
            if (s < -snap || s > last + snap) return 0.0;
            s = std::clamp(s, 0.0, last);
            double k = std::floor(s);
            double t = s - k;
            if (t > 1.0 - snap) {
                k += 1.0;
                t = 0.0;
            } else if (t < snap) {
                t = 0.0;
            }
            if (k >= last) {
                k = last - 1.0;
                t = 1.0;
            }
            base[static_cast<std::size_t>(a)] = static_cast<std::size_t>(k);
            frac[static_cast<std::size_t>(a)] = t;
            lin += static_cast<std::size_t>(k) * grid_.stride(a);
        }
        double acc = 0.0;
        const unsigned corners = 1u << static_cast<unsigned>(n);
        for (unsigned m = 0; m < corners; ++m) {
            double w = 1.0;
            std::size_t off = lin;
            for (int a = 0; a < n; ++a) {
                const double t = frac[static_cast<std::size_t>(a)];
                if (m & (1u << static_cast<unsigned>(a))) {
                    w *= t;
                    off += grid_.stride(a);
                } else {
                    w *= 1.0 - t;
                }
                if (w == 0.0) break;
            }
            if (w != 0.0) acc += w * values_[off];
        }
        return acc;
    }

  private:
    const GridSpec& grid_;
    std::span<const double> values_;
};

/// Samples x ↦ u(T x + y) on `target`. The result is unmasked.
inline ScalarField resample(const ScalarField& u, const AffineMap& map, const GridSpec& target) {
    detail::require(map.dim() == u.dim() && target.dim() == u.dim(), "resample: dimension mismatch");
    const Interpolator interp(u);
    return ScalarField::sample(target, [&](const SmallVector& x) { return interp(map(x)); });
}

/// Bounding box of the preimage T⁻¹(B − y) of a box B.
inline Box preimage_box(const AffineMap& map, const Box& b) {
    const int n = b.dim();
    Box out{SmallVector(n, std::numeric_limits<double>::infinity()), SmallVector(n, -std::numeric_limits<double>::infinity())};
    for (unsigned m = 0; m < (1u << static_cast<unsigned>(n)); ++m) {
        SmallVector corner(n);
        for (int a = 0; a < n; ++a) corner[a] = (m & (1u << static_cast<unsigned>(a))) ? b.hi[a] : b.lo[a];
        const SmallVector p = map.preimage(corner);
        for (int a = 0; a < n; ++a) {
            out.lo[a] = std::min(out.lo[a], p[a]);
            out.hi[a] = std::max(out.hi[a], p[a]);
        }
    }
    return out;
}

/// Grid on which u∘map resolves u as well as u's own grid does: axis a gets
/// spacing h_ref/‖T e_a‖ and the extent covers the preimage of u's grid box.
inline GridSpec adapted_grid(const GridSpec& source, const AffineMap& map, double h_ref = 0.0) {
    if (h_ref <= 0.0) h_ref = source.min_spacing();
    const int n = source.dim();
    const Box pre = preimage_box(map, source.box());
    SmallVector h(n);
    for (int a = 0; a < n; ++a) h[a] = h_ref / map.matrix().column(a).norm();
    return GridSpec::covering(pre, h);
}

/// Dyadic rescaling x ↦ 2^{(N−2)j/2} u(2^j (x − y)) sampled on `target`.
inline ScalarField dyadic_rescale(const ScalarField& u, int j, const SmallVector& y, const GridSpec& target) {
    const int n = u.dim();
    detail::require(target.dim() == n && y.size() == n, "dyadic_rescale: dimension mismatch");
    detail::require(j >= -40 && j <= 40, "dyadic_rescale: scale exponent out of range");
    const double s = std::ldexp(1.0, j);
    const double amp = std::pow(2.0, 0.5 * static_cast<double>((n - 2) * j));
    const Box src = u.grid().box();
    Box image{SmallVector(n), SmallVector(n)};
    for (int a = 0; a < n; ++a) {
        image.lo[a] = y[a] + src.lo[a] / s;
        image.hi[a] = y[a] + src.hi[a] / s;
    }
    detail::require(!image.intersect(target.box()).empty(),
                    "dyadic_rescale: the rescaled sample window does not meet the target grid");
    for (int a = 0; a < n; ++a)
        detail::require(u.grid().spacing(a) / s >= target.spacing(a) / 8.0,
                        "dyadic_rescale: target grid cannot resolve the rescaled field");
    const Interpolator interp(u);
    return ScalarField::sample(target, [&](const SmallVector& x) {
        SmallVector z(n);
        for (int a = 0; a < n; ++a) z[a] = s * (x[a] - y[a]);
        return amp * interp(z);
    });
}

} // namespace affsob
