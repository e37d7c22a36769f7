#pragma once

#include <vector>

#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// N values per node, node-major: data[i*N + a] = ∂_a u at node i.
struct GradientField {
    GridSpec grid;
    std::vector<double> data;

    SmallVector at(std::size_t i) const {
        const int n = grid.dim();
        return SmallVector::from(std::span<const double>(data).subspan(i * static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
    }
    double component(std::size_t i, int a) const { return data[i * static_cast<std::size_t>(grid.dim()) + static_cast<std::size_t>(a)]; }
};

/// Symmetric N×N per node, stored as the full row-major block.
struct HessianField {
    GridSpec grid;
    std::vector<double> data;

    SmallMatrix at(std::size_t i) const {
        const int n = grid.dim();
        return SmallMatrix::from_row_major(n, std::span<const double>(data).subspan(i * static_cast<std::size_t>(n * n), static_cast<std::size_t>(n * n)));
    }
    double entry(std::size_t i, int a, int b) const {
        const auto n = static_cast<std::size_t>(grid.dim());
        return data[i * n * n + static_cast<std::size_t>(a) * n + static_cast<std::size_t>(b)];
    }
};

namespace detail {

/// Value at node `i` shifted by `steps` along `axis`; zero if the shift leaves the grid.
inline double shifted(const std::vector<double>& v, const GridSpec& g, const std::array<std::size_t, kMaxDim>& idx,
                      std::size_t i, int axis, long steps) {
    const long k = static_cast<long>(idx[static_cast<std::size_t>(axis)]) + steps;
    if (k < 0 || k >= static_cast<long>(g.shape(axis))) return 0.0;
    return v[static_cast<std::size_t>(static_cast<long>(i) + steps * static_cast<long>(g.stride(axis)))];
}

inline void check_stencil_grid(const GridSpec& g) {
    for (int a = 0; a < g.dim(); ++a)
        require(g.shape(a) >= 3, "stencil: every axis needs at least 3 nodes");
}

} // namespace detail

/// Discrete gradient. Central differences at interior nodes. Masked fields are
/// zero-extended past the grid; unmasked fields use one-sided second-order
/// differences on the grid faces.
inline GradientField gradient(const ScalarField& u) {
    const GridSpec& g = u.grid();
    detail::check_stencil_grid(g);
    const int n = g.dim();
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> v(u.values().begin(), u.values().end());
    GradientField out{g, std::vector<double>(g.node_count() * un)};
    const bool zero_ext = u.masked();
    parallel_for(g.node_count(), [&](std::size_t b, std::size_t e) {
        NodeCursor c(g, b);
        for (std::size_t i = b; i < e; ++i, c.advance()) {
            for (int a = 0; a < n; ++a) {
                const double h = g.spacing(a);
                const std::size_t k = c[a], last = g.shape(a) - 1;
                const long s = static_cast<long>(g.stride(a));
                const auto at = [&](long off) { return v[static_cast<std::size_t>(static_cast<long>(i) + off * s)]; };
                double d;
                if (zero_ext || (k > 0 && k < last))
                    d = (detail::shifted(v, g, c.index(), i, a, 1) - detail::shifted(v, g, c.index(), i, a, -1)) / (2.0 * h);
                else if (k == 0)
                    d = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
                else
                    d = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
                out.data[i * un + static_cast<std::size_t>(a)] = d;
            }
        }
    });
    return out;
}

/// Discrete Hessian: compact second differences on the diagonal and the
/// four-corner cross stencil off the diagonal. Masked fields are zero-extended;
/// for unmasked fields, nodes on a grid face reuse the stencil of the nearest
/// interior node along that axis.
inline HessianField hessian(const ScalarField& u) {
    const GridSpec& g = u.grid();
    detail::check_stencil_grid(g);
    const int n = g.dim();
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> v(u.values().begin(), u.values().end());
    HessianField out{g, std::vector<double>(g.node_count() * un * un)};
    const bool zero_ext = u.masked();
    parallel_for(g.node_count(), [&](std::size_t b, std::size_t e) {
        NodeCursor c(g, b);
        for (std::size_t i = b; i < e; ++i, c.advance()) {
            auto idx = c.index();
            std::size_t center = i;
            if (!zero_ext) {
                for (int a = 0; a < n; ++a) {
                    auto& k = idx[static_cast<std::size_t>(a)];
                    const std::size_t clamped = std::clamp<std::size_t>(k, 1, g.shape(a) - 2);
                    center = center + clamped * g.stride(a) - k * g.stride(a);
                    k = clamped;
                }
            }
            const auto val = [&](int a, long sa, int b2, long sb) {
                const long ka = static_cast<long>(idx[static_cast<std::size_t>(a)]) + sa;
                const long kb = static_cast<long>(idx[static_cast<std::size_t>(b2)]) + sb;
                if (ka < 0 || ka >= static_cast<long>(g.shape(a)) || kb < 0 || kb >= static_cast<long>(g.shape(b2)))
                    return 0.0;
                return v[static_cast<std::size_t>(static_cast<long>(center) + sa * static_cast<long>(g.stride(a)) +
                                                  sb * static_cast<long>(g.stride(b2)))];
            };
            double* h = &out.data[i * un * un];
            for (int a = 0; a < n; ++a) {
                const double ha = g.spacing(a);
                h[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(a)] =
                    (val(a, 1, a, 0) - 2.0 * v[center] + val(a, -1, a, 0)) / (ha * ha);
                for (int b2 = a + 1; b2 < n; ++b2) {
                    const double hb = g.spacing(b2);
                    const double x = (val(a, 1, b2, 1) - val(a, -1, b2, 1) - val(a, 1, b2, -1) + val(a, -1, b2, -1)) /
                                     (4.0 * ha * hb);
                    h[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b2)] = x;
                    h[static_cast<std::size_t>(b2) * un + static_cast<std::size_t>(a)] = x;
                }
            }
        }
    });
    return out;
}

} // namespace affsob
