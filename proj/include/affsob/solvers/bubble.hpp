#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "affsob/field/quadrature.hpp"
#include "affsob/field/resample.hpp"
#include "affsob/solvers/config.hpp"

namespace affsob {

/// Sharp constant of ‖∇u‖₂² ≥ S_N ‖u‖²_{2*}: π N(N−2) (Γ(N/2)/Γ(N))^{2/N}.
inline double sobolev_constant(int n) {
    detail::require(n >= 3, "sobolev_constant: needs N >= 3");
    return std::numbers::pi * n * (n - 2.0) * std::pow(std::tgamma(0.5 * n) / std::tgamma(static_cast<double>(n)), 2.0 / n);
}

/// (1 + r²)^{−(N−2)/2} cut to (U − U(R))₊ so that it has compact support.
inline double truncated_bubble(int n, double r, double cutoff) {
    const double e = 0.5 * (n - 2.0);
    return std::max(0.0, std::pow(1.0 + r * r, -e) - std::pow(1.0 + cutoff * cutoff, -e));
}

struct BubbleCase {
    SmallMatrix transform;
    double affine_quotient = 0.0;   ///< E₂(U∘T) / ‖U∘T‖²_{2*}
    double gradient_quotient = 0.0; ///< ‖∇(U∘T)‖₂² / ‖U∘T‖²_{2*}
    bool orthogonal = false;
    std::size_t nodes = 0;
};

struct BubbleReport {
    int dim = 0;
    double cutoff = 0.0;
    double spacing = 0.0;
    double sobolev_constant = 0.0; ///< untruncated closed form
    double identity_quotient = 0.0;
    std::vector<BubbleCase> cases;
    double affine_spread = 0.0;    ///< max relative deviation of affine quotients from the T = I value
    bool affine_constant = false;  ///< affine_spread ≤ tolerance
    bool gradient_exceeds = false; ///< every non-orthogonal case has gradient quotient > identity quotient
};

namespace detail {

inline BubbleCase bubble_case(int n, const SmallMatrix& t, double cutoff, double h) {
    const AffineMap map(t);
    SmallVector half(n);
    const SmallMatrix tinv = map.inverse_matrix();
    for (int a = 0; a < n; ++a) {
        double row = 0.0;
        for (int b = 0; b < n; ++b) row += tinv(a, b) * tinv(a, b);
        half[a] = cutoff * std::sqrt(row);
    }
    SmallVector spacing(n), lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
        double col = 0.0;
        for (int b = 0; b < n; ++b) col += t(b, a) * t(b, a);
        spacing[a] = h / std::sqrt(col);
        lo[a] = -half[a] - 2.0 * spacing[a];
        hi[a] = half[a] + 2.0 * spacing[a];
    }
    const GridSpec g = GridSpec::covering(Box{lo, hi}, spacing);
    const ScalarField u = ScalarField::sample(g, [&](const SmallVector& x) { return truncated_bubble(n, map(x).norm(), cutoff); });
    const GramMatrix a = gram_matrix(u);
    const double lp = lp_norm(u, critical_exponent(n));
    BubbleCase c;
    c.transform = t;
    c.affine_quotient = affine_energy(a) / (lp * lp);
    c.gradient_quotient = a.trace() / (lp * lp);
    c.orthogonal = (t.transpose() * t - SmallMatrix::identity(n)).frobenius_norm() <= 1e-10;
    c.nodes = g.node_count();
    return c;
}

} // namespace detail

/// Evaluates the affine and the gradient Sobolev quotients of the truncated
/// bubble composed with each transform in `transforms` (plus T = I, evaluated
/// first). U∘T is sampled exactly on a grid whose spacing along axis a is
/// h / ‖T e_a‖. Transforms must be unimodular with condition number ≤ 10.
inline BubbleReport critical_bubble_check(int n, const std::vector<SmallMatrix>& transforms, double cutoff = 8.0,
                                          double h = 0.125, double tolerance = 0.02) {
    detail::require(n >= 3, "critical_bubble_check: needs N >= 3");
    detail::require(cutoff > 1.0 && h > 0.0 && h < 1.0, "critical_bubble_check: cutoff must exceed 1 and h must lie in (0, 1)");
    for (const auto& t : transforms) {
        detail::require(t.size() == n, "critical_bubble_check: transform dimension differs from N");
        AffineMap(t).require_unimodular();
        if (condition_number(t) > 10.0) throw InvalidArgument("critical_bubble_check: transform is too ill-conditioned for the grid");
    }
    BubbleReport rep;
    rep.dim = n;
    rep.cutoff = cutoff;
    rep.spacing = h;
    rep.sobolev_constant = sobolev_constant(n);
    const BubbleCase id = detail::bubble_case(n, SmallMatrix::identity(n), cutoff, h);
    rep.identity_quotient = id.affine_quotient;
    rep.gradient_exceeds = true;
    for (const auto& t : transforms) {
        BubbleCase c = detail::bubble_case(n, t, cutoff, h);
        rep.affine_spread = std::max(rep.affine_spread, std::abs(c.affine_quotient - id.affine_quotient) / id.affine_quotient);
        if (!c.orthogonal && !(c.gradient_quotient > id.gradient_quotient)) rep.gradient_exceeds = false;
        rep.cases.push_back(std::move(c));
    }
    rep.affine_constant = rep.affine_spread <= tolerance;
    return rep;
}

} // namespace affsob
