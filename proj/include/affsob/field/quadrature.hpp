#pragma once

#include <cmath>

#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// Node rule ∫u ≈ Σ u_i ∏h_a over mask-inside nodes (all nodes if unmasked).
inline double integrate(const ScalarField& u) {
    const auto v = u.values();
    const double w = u.grid().cell_volume();
    if (!u.masked()) return w * deterministic_sum(v.size(), [&](std::size_t i) { return v[i]; });
    const auto in = u.mask()->inside_flags();
    return w * deterministic_sum(v.size(), [&](std::size_t i) { return in[i] ? v[i] : 0.0; });
}

/// ∫|u|^p.
inline double integrate_abs_pow(const ScalarField& u, double p) {
    detail::require(p >= 1.0, "lp_norm: p must be at least 1");
    const auto v = u.values();
    const double w = u.grid().cell_volume();
    const bool masked = u.masked();
    const auto in = masked ? u.mask()->inside_flags() : std::span<const std::uint8_t>{};
    const bool square = p == 2.0;
    return w * deterministic_sum(v.size(), [&](std::size_t i) {
               if (masked && !in[i]) return 0.0;
               const double a = std::abs(v[i]);
               return square ? a * a : std::pow(a, p);
           });
}

inline double lp_norm(const ScalarField& u, double p) { return std::pow(integrate_abs_pow(u, p), 1.0 / p); }

/// ∫u·v with the quadrature weights of u.
inline double inner(const ScalarField& u, const ScalarField& v) {
    detail::require(u.grid() == v.grid(), "inner: grids differ");
    const auto a = u.values(), b = v.values();
    const double w = u.grid().cell_volume();
    if (!u.masked()) return w * deterministic_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
    const auto in = u.mask()->inside_flags();
    return w * deterministic_sum(a.size(), [&](std::size_t i) { return in[i] ? a[i] * b[i] : 0.0; });
}

} // namespace affsob
