#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "affsob/operator/stencil.hpp"

namespace affsob {

struct CgResult {
    long iterations = 0;
    double residual_norm = 0.0; ///< Euclidean norm over free nodes
    double rhs_norm = 0.0;
    bool converged = false;
};

inline long default_cg_max_iter(std::size_t unknowns, double condition) {
    return static_cast<long>(std::ceil(10.0 * std::sqrt(static_cast<double>(unknowns)) * std::sqrt(std::max(1.0, condition))));
}

namespace detail {

inline double free_dot(std::span<const std::size_t> nodes, std::span<const double> a, std::span<const double> b) {
    return deterministic_sum(nodes.size(), [&](std::size_t k) { return a[nodes[k]] * b[nodes[k]]; });
}

} // namespace detail

/// Jacobi-preconditioned conjugate gradients for (−L_C + diag(V)) x = rhs on
/// the free nodes of the stencil's mask. `x` carries the initial guess and
/// receives the solution; `potential` may be empty (V = 0) and must be ≥ 0.
/// Stops when ‖r‖ ≤ tol ‖rhs‖ or after max_iter iterations (≤ 0 selects the
/// default 10 √n √cond).
inline CgResult conjugate_gradient(const EllipticStencil& op, std::span<const double> potential,
                                   std::span<const double> rhs, std::vector<double>& x, double tol, long max_iter = 0) {
    const auto nodes = op.mask()->free_nodes();
    const std::size_t n = op.grid().node_count();
    detail::require(rhs.size() == n && x.size() == n, "conjugate_gradient: vector sizes differ from the grid");
    detail::require(potential.empty() || potential.size() == n, "conjugate_gradient: potential size differs from the grid");
    detail::require(tol > 0.0, "conjugate_gradient: tolerance must be positive");
    if (max_iter <= 0) max_iter = default_cg_max_iter(nodes.size(), op.coefficient_condition());

    const auto flags = op.mask()->free_flags();
    for (std::size_t i = 0; i < n; ++i)
        if (!flags[i]) x[i] = 0.0;

    std::vector<double> diag(n, 0.0), r(n, 0.0), z(n, 0.0), p(n, 0.0), q(n, 0.0);
    for (std::size_t i : nodes) {
        const double v = potential.empty() ? 0.0 : potential[i];
        detail::require(v >= 0.0 && std::isfinite(v), "conjugate_gradient: potential must be finite and nonnegative");
        diag[i] = -op.center_weight() + v;
    }
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        op.apply(in, out);
        for (std::size_t i : nodes) out[i] = -out[i] + (potential.empty() ? 0.0 : potential[i] * in[i]);
    };

    CgResult res;
    res.rhs_norm = std::sqrt(detail::free_dot(nodes, rhs, rhs));
    if (res.rhs_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }
    apply(x, q);
    for (std::size_t i : nodes) r[i] = rhs[i] - q[i];
    double rnorm = std::sqrt(detail::free_dot(nodes, r, r));
    const double target = tol * res.rhs_norm;
    for (std::size_t i : nodes) p[i] = z[i] = r[i] / diag[i];
    double rz = detail::free_dot(nodes, r, z);
    long it = 0;
    while (rnorm > target && it < max_iter) {
        apply(p, q);
        const double pq = detail::free_dot(nodes, p, q);
        if (!(pq > 0.0)) break;
        const double alpha = rz / pq;
        for (std::size_t i : nodes) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        ++it;
        if (it % 50 == 0) {
            apply(x, q);
            for (std::size_t i : nodes) r[i] = rhs[i] - q[i];
        }
        rnorm = std::sqrt(detail::free_dot(nodes, r, r));
        for (std::size_t i : nodes) z[i] = r[i] / diag[i];
        const double rz_new = detail::free_dot(nodes, r, z);
        const double beta = rz_new / rz;
        rz = rz_new;
        for (std::size_t i : nodes) p[i] = z[i] + beta * p[i];
    }
    res.iterations = it;
    res.residual_norm = rnorm;
    res.converged = rnorm <= target;
    return res;
}

/// Solves det(M)^{1/N} Σ (M⁻¹)_ij ∂_i∂_j u = −f with u = 0 off the free nodes.
/// Throws ConvergenceError if CG does not reach ‖r‖ ≤ tol ‖f‖ within max_iter.
inline ScalarField constant_coeff_solve(const GramMatrix& m, const ScalarField& f, const MaskPtr& mask, double tol = 1e-10,
                                        long max_iter = 0) {
    detail::require(mask != nullptr, "constant_coeff_solve: a mask is required");
    detail::require(f.grid() == mask->grid(), "constant_coeff_solve: f and the mask use different grids");
    const auto eig = jacobi_eigen(m.matrix());
    if (!(eig.values[0] > 0.0)) throw InvalidArgument("constant_coeff_solve: M is not positive definite");
    const EllipticStencil op = EllipticStencil::for_metric(m, mask);
    std::vector<double> rhs(f.values().begin(), f.values().end());
    std::vector<double> x(rhs.size(), 0.0);
    const CgResult r = conjugate_gradient(op, {}, rhs, x, tol, max_iter);
    if (!r.converged)
        throw ConvergenceError("constant_coeff_solve: CG stopped after " + std::to_string(r.iterations) +
                               " iterations with relative residual " + std::to_string(r.residual_norm / r.rhs_norm));
    return ScalarField(mask->grid(), std::move(x), mask);
}

} // namespace affsob
