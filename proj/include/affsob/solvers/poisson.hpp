#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "affsob/solvers/common.hpp"

namespace affsob {

namespace detail {

struct PoissonRun {
    std::vector<double> u;
    double objective = 0.0;
    double residual = 0.0;
    GramMatrix gram;
    std::vector<TraceEntry> trace;
    bool converged = false;
    bool monotone = true;
    int regularized_steps = 0;
};

/// Majorize-minimize iteration for ½E₂(u) − ∫fu from the iterate `u`.
/// With C_k = det(A_k)^{1/N} A_k⁻¹ and det C_k = 1, Q_k(u) = ½ tr(C_k A[u]) − ∫fu
/// majorizes the objective and touches it at u_k, so any CG iterate started
/// at u_k followed by a convex blend does not increase it.
inline PoissonRun poisson_iterate(const MaskPtr& mask, const std::vector<double>& rhs, std::vector<double> u,
                                  const SolverConfig& cfg) {
    const DomainMask& m = *mask;
    const GridSpec& g = m.grid();
    const int n = g.dim();
    const double f_norm = free_norm(m, rhs);
    PoissonRun run;

    auto evaluate = [&](const std::vector<double>& v, GramMatrix& a, double& residual) {
        a = GramMatrix(gram_sums(g, v));
        const double e2 = affine_energy(a);
        bool reg = false;
        const EllipticStencil op(majorizer_coefficients(a, cfg, reg), mask);
        std::vector<double> lap(v.size());
        op.apply(v, lap);
        double num = 0.0;
        for (std::size_t i : m.free_nodes()) num += (lap[i] + rhs[i]) * (lap[i] + rhs[i]);
        residual = std::sqrt(num) / f_norm;
        const double energy = cfg.classical ? a.trace() : e2;
        return 0.5 * energy - free_inner(m, rhs, v);
    };

    GramMatrix a;
    double residual = 0.0;
    double objective = evaluate(u, a, residual);
    run.trace.push_back({0, residual, objective, 0, false});
    double inner_tol = std::max(cfg.inner_tol, std::min(1e-2, 0.01 * residual));
    for (int k = 1; k <= cfg.max_outer; ++k) {
        bool reg = false;
        const EllipticStencil op(majorizer_coefficients(a, cfg, reg), mask);
        if (reg) ++run.regularized_steps;
        std::vector<double> x = u;
        const CgResult cg = conjugate_gradient(op, {}, rhs, x, inner_tol, cfg.inner_max_iter);
        for (std::size_t i : m.free_nodes()) u[i] = (1.0 - cfg.damping) * u[i] + cfg.damping * x[i];
        const double previous = objective;
        objective = evaluate(u, a, residual);
        if (objective > previous + 1e-12 * std::abs(previous)) run.monotone = false;
        run.trace.push_back({k, residual, objective, cg.iterations, reg});
        inner_tol = std::max(cfg.inner_tol, std::min(1e-2, 0.01 * residual));
        const double change = std::abs(objective - previous) / std::max(std::abs(previous), 1e-300);
        if (change <= cfg.outer_tol && residual <= cfg.outer_tol) {
            run.converged = true;
            break;
        }
    }
    (void)n;
    run.u = std::move(u);
    run.objective = objective;
    run.residual = residual;
    run.gram = a;
    return run;
}

} // namespace detail

/// Minimizes ½E₂(u) − ∫_Ω f u over fields vanishing off the mask's free nodes.
/// Start 0 is the classical Poisson solution (M = I); further starts modulate
/// it with seeded smooth perturbations. The best converged start is reported.
inline SolveReport solve_affine_poisson(const ScalarField& f, const MaskPtr& mask, const SolverConfig& cfg) {
    cfg.validate();
    detail::require(mask != nullptr, "solve_affine_poisson: a mask is required");
    detail::require(f.grid() == mask->grid(), "solve_affine_poisson: f and the mask use different grids");
    if (!mask->bounded()) throw PreconditionError("solve_affine_poisson: the mask must be bounded");
    const DomainMask& m = *mask;

    SolveReport rep;
    rep.problem = "poisson";
    std::vector<double> rhs(f.size(), 0.0);
    for (std::size_t i : m.free_nodes()) rhs[i] = f[i];
    if (detail::free_norm(m, rhs) == 0.0) {
        rep.minimizer = ScalarField::zeros(mask);
        rep.degenerate_objective = true;
        rep.converged = true;
        rep.gram = GramMatrix(SmallMatrix(m.grid().dim()));
        return rep;
    }

    std::vector<double> classical(rhs.size(), 0.0);
    const EllipticStencil lap(SmallMatrix::identity(m.grid().dim()), mask);
    const CgResult cg0 = conjugate_gradient(lap, {}, rhs, classical, cfg.inner_tol, cfg.inner_max_iter);
    if (!cg0.converged) throw ConvergenceError("solve_affine_poisson: classical start did not converge");

    detail::PoissonRun best;
    bool have_best = false;
    for (int s = 0; s < cfg.starts; ++s) {
        const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
        std::vector<double> u0 = classical;
        if (s > 0) {
            const auto mod = detail::modulation(m.grid(), seed, 0.5);
            for (std::size_t i = 0; i < u0.size(); ++i) u0[i] *= mod[i];
        }
        detail::PoissonRun run = detail::poisson_iterate(mask, rhs, std::move(u0), cfg);
        rep.starts.push_back({seed, run.objective, static_cast<int>(run.trace.size()) - 1, run.converged, 0});
        const bool better = !have_best || (run.converged && !best.converged) ||
                            (run.converged == best.converged && run.objective < best.objective);
        if (better) {
            best = std::move(run);
            have_best = true;
        }
    }

    rep.minimizer = ScalarField(m.grid(), best.u, mask);
    rep.objective = best.objective;
    rep.gram = best.gram;
    rep.pde_residual = best.residual;
    rep.pre_rescale_residual = best.residual;
    rep.trace = best.trace;
    rep.converged = best.converged;
    rep.monotone = best.monotone;
    rep.regularized_steps = best.regularized_steps;
    rep.objective_negative = best.objective < 0.0;
    if (!rep.converged)
        throw SolverConvergenceError("solve_affine_poisson: no start converged within max_outer iterations", rep);
    return rep;
}

} // namespace affsob
