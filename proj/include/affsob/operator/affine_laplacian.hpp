#pragma once

#include <cmath>
#include <vector>

#include "affsob/energy/transform.hpp"
#include "affsob/field/quadrature.hpp"
#include "affsob/field/resample.hpp"
#include "affsob/field/stencil.hpp"
#include "affsob/operator/stencil.hpp"

namespace affsob {

namespace detail {

inline ScalarField contract_hessian(const ScalarField& u, const SmallMatrix& c) {
    const HessianField h = hessian(u);
    const int n = u.dim();
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double* hi = &h.data[i * un * un];
        double s = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                s += c(a, b) * hi[static_cast<std::size_t>(a) * un + static_cast<std::size_t>(b)];
        out[i] = s;
    }
    return u.with_values(std::move(out));
}

} // namespace detail

/// Plain Laplacian Σ_a ∂_a²u from the Hessian stencils.
inline ScalarField laplacian(const ScalarField& u) { return detail::contract_hessian(u, SmallMatrix::identity(u.dim())); }

/// Δ_A u = det(A)^{1/N} Σ (A⁻¹)_ij ∂_i∂_j u with A = A[u], evaluated once.
/// When A is a multiple of the identity the coefficients are exactly I and the
/// result equals laplacian(u) bit for bit.
inline ScalarField affine_laplacian(const ScalarField& u) {
    const GramMatrix a = gram_matrix(u);
    if (a.degenerate()) throw DegenerateError("affine_laplacian: Gram matrix is degenerate");
    return detail::contract_hessian(u, EllipticStencil::coefficients_for(a));
}

struct FrechetCheck {
    double fd = 0.0;
    double pairing = 0.0;
    double rel_err = 0.0;
};

/// Central difference of −½E₂ along v against ∫ Δ_A(u) v.
inline FrechetCheck frechet_check(const ScalarField& u, const ScalarField& v, double eps) {
    detail::require(eps >= 1e-8 && eps <= 1e-2, "frechet_check: eps must lie in [1e-8, 1e-2]");
    detail::require(u.grid() == v.grid(), "frechet_check: u and v use different grids");
    if (u.masked()) {
        const auto flags = u.mask()->free_flags();
        for (std::size_t i = 0; i < v.size(); ++i)
            if (!flags[i] && v[i] != 0.0) throw PreconditionError("frechet_check: v does not vanish on the mask boundary");
    }
    const ScalarField vm = u.masked() ? v.with_mask(u.mask()) : v;
    const auto energy = [](const ScalarField& w) {
        const GramMatrix a = gram_matrix(w);
        return w.dim() * std::pow(std::max(0.0, a.det()), 1.0 / w.dim());
    };
    FrechetCheck r;
    r.fd = (-0.5 * energy(u.plus(vm, eps)) + 0.5 * energy(u.plus(vm, -eps))) / (2.0 * eps);
    r.pairing = inner(affine_laplacian(u), vm);
    const double scale = std::max(std::abs(r.fd), std::abs(r.pairing));
    r.rel_err = scale > 0.0 ? std::abs(r.fd - r.pairing) / scale : 0.0;
    return r;
}

/// ‖Δ_A u + f‖ / ‖f‖ over the free nodes of u's mask (all nodes away from the
/// grid faces when unmasked), with the Gram matrix of u.
inline double poisson_residual(const ScalarField& u, const ScalarField& f) {
    const ScalarField lap = affine_laplacian(u);
    double num = 0.0, den = 0.0;
    NodeCursor c(u.grid(), 0);
    for (std::size_t i = 0; i < u.size(); ++i, c.advance()) {
        bool active = true;
        if (u.masked()) active = u.mask()->is_free(i);
        else
            for (int a = 0; a < u.dim(); ++a) active = active && !c.on_edge(a);
        if (!active) continue;
        const double r = lap[i] + f[i];
        num += r * r;
        den += f[i] * f[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

struct ComparisonReport {
    bool data_ordered = false;      ///< f₁∘T₁ ≥ f₂∘T₂ (or ≤) at every node, up to tol
    int direction = 0;              ///< +1 for f₁∘T₁ ≥ f₂∘T₂, −1 for ≤, 0 if unordered
    bool solutions_ordered = false; ///< u₁∘T₁ ≤ u₂∘T₂ for direction +1 (reversed for −1)
    bool holds = false;             ///< data ordering implies solution ordering
    std::vector<std::size_t> violations;
    double residual1 = 0.0, residual2 = 0.0;
    AffineMap t1, t2;
};

/// Checks the comparison principle for Δ_A(u_i) = f_i: with T_i the
/// normalizing transforms, f₁∘T₁ ≥ f₂∘T₂ should give u₁∘T₁ ≤ u₂∘T₂. Both sides
/// are resampled onto u₁'s grid. Throws PreconditionError if either relative
/// residual exceeds residual_tol.
inline ComparisonReport comparison_check(const ScalarField& u1, const ScalarField& u2, const ScalarField& f1,
                                         const ScalarField& f2, double tol = 1e-8, double residual_tol = 1e-6) {
    ComparisonReport rep;
    const GramMatrix a1 = gram_matrix(u1), a2 = gram_matrix(u2);
    if (a1.degenerate() || a2.degenerate()) throw DegenerateError("comparison_check: degenerate Gram matrix");
    rep.residual1 = poisson_residual(u1, f1.scaled(-1.0));
    rep.residual2 = poisson_residual(u2, f2.scaled(-1.0));
    if (rep.residual1 > residual_tol || rep.residual2 > residual_tol)
        throw PreconditionError("comparison_check: inputs do not solve their equations to the stated tolerance");
    rep.t1 = normalizing_transform(a1).composed;
    rep.t2 = normalizing_transform(a2).composed;
    const GridSpec& g = u1.grid();
    const auto g1 = resample(f1, rep.t1, g), g2 = resample(f2, rep.t2, g);
    const auto w1 = resample(u1, rep.t1, g), w2 = resample(u2, rep.t2, g);
    const double fs = std::max({g1.max_abs(), g2.max_abs(), 1e-300});
    const double us = std::max({w1.max_abs(), w2.max_abs(), 1e-300});
    bool ge = true, le = true;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        ge = ge && g1[i] >= g2[i] - tol * fs;
        le = le && g1[i] <= g2[i] + tol * fs;
    }
    rep.direction = ge ? 1 : (le ? -1 : 0);
    rep.data_ordered = rep.direction != 0;
    for (std::size_t i = 0; rep.data_ordered && i < g.node_count(); ++i) {
        const double d = w1[i] - w2[i];
        const bool ok = rep.direction >= 0 ? d <= tol * us : d >= -tol * us;
        if (!ok) rep.violations.push_back(i);
    }
    rep.solutions_ordered = rep.data_ordered && rep.violations.empty();
    rep.holds = !rep.data_ordered || rep.solutions_ordered;
    return rep;
}

} // namespace affsob
