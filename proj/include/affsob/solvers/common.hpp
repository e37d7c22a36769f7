#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "affsob/core/random.hpp"
#include "affsob/operator/cg.hpp"
#include "affsob/solvers/config.hpp"

namespace affsob::detail {

/// h^N Σ a_i b_i over the free nodes.
inline double free_inner(const DomainMask& m, std::span<const double> a, std::span<const double> b) {
    return m.grid().cell_volume() * free_dot(m.free_nodes(), a, b);
}

/// h^N Σ |a_i|^p over the free nodes.
inline double free_pow_sum(const DomainMask& m, std::span<const double> a, double p) {
    const auto nodes = m.free_nodes();
    return m.grid().cell_volume() *
           deterministic_sum(nodes.size(), [&](std::size_t k) { return std::pow(std::abs(a[nodes[k]]), p); });
}

/// Euclidean norm over the free nodes.
inline double free_norm(const DomainMask& m, std::span<const double> a) { return std::sqrt(free_dot(m.free_nodes(), a, a)); }

/// Inner-solve metric: A itself, or A + ε (tr A/N) I when A is degenerate.
inline GramMatrix inner_metric(const GramMatrix& a, double eps, bool& regularized) {
    regularized = a.degenerate();
    if (!regularized) return a;
    const int n = a.dim();
    const double t = a.trace() / n;
    return GramMatrix(a.matrix() + SmallMatrix::identity(n) * (t > 0.0 ? eps * t : 1.0));
}

/// Coefficients of the majorizer at u: det(M)^{1/N} M⁻¹, or I in classical mode.
inline SmallMatrix majorizer_coefficients(const GramMatrix& a, const SolverConfig& cfg, bool& regularized) {
    regularized = false;
    if (cfg.classical) return SmallMatrix::identity(a.dim());
    return EllipticStencil::coefficients_for(inner_metric(a, cfg.regularization, regularized));
}

/// Smooth positive bump filling the bounding box of the mask's free nodes.
inline std::vector<double> centered_bump(const DomainMask& m) {
    const GridSpec& g = m.grid();
    const int n = g.dim();
    SmallVector lo(n, INFINITY), hi(n, -INFINITY);
    for (std::size_t i : m.free_nodes()) {
        const SmallVector x = g.position(i);
        for (int a = 0; a < n; ++a) {
            lo[a] = std::min(lo[a], x[a]);
            hi[a] = std::max(hi[a], x[a]);
        }
    }
    std::vector<double> v(g.node_count(), 0.0);
    for (std::size_t i : m.free_nodes()) {
        const SmallVector x = g.position(i);
        double b = 1.0;
        for (int a = 0; a < n; ++a) {
            const double half = 0.5 * (hi[a] - lo[a]) + g.spacing(a);
            const double t = (x[a] - 0.5 * (lo[a] + hi[a])) / half;
            b *= std::cos(0.5 * std::numbers::pi * t);
        }
        v[i] = b;
    }
    return v;
}

/// Seeded smooth modulation 1 + amplitude Σ_k a_k cos(ω_k·x + φ_k), bounded
/// below by 1 − amplitude.
inline std::vector<double> modulation(const GridSpec& g, std::uint64_t seed, double amplitude) {
    Rng rng(seed);
    const int n = g.dim();
    const Box box = g.box();
    constexpr int terms = 3;
    std::array<SmallVector, terms> w;
    std::array<double, terms> phase{}, amp{};
    for (int k = 0; k < terms; ++k) {
        w[static_cast<std::size_t>(k)] = SmallVector(n);
        for (int a = 0; a < n; ++a)
            w[static_cast<std::size_t>(k)][a] = rng.uniform(-2.0, 2.0) * std::numbers::pi / (box.hi[a] - box.lo[a]);
        phase[static_cast<std::size_t>(k)] = rng.uniform(0.0, 2.0 * std::numbers::pi);
        amp[static_cast<std::size_t>(k)] = rng.uniform(-1.0, 1.0) / terms;
    }
    std::vector<double> v(g.node_count());
    for (std::size_t i = 0; i < v.size(); ++i) {
        const SmallVector x = g.position(i);
        double s = 0.0;
        for (int k = 0; k < terms; ++k)
            s += amp[static_cast<std::size_t>(k)] * std::cos(w[static_cast<std::size_t>(k)].dot(x) + phase[static_cast<std::size_t>(k)]);
        v[i] = 1.0 + amplitude * s;
    }
    return v;
}

} // namespace affsob::detail
