#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "affsob/field/resample.hpp"
#include "affsob/solvers/common.hpp"

namespace affsob {

/// Which semilinear equation a rescaling or residual refers to.
enum class PdeForm {
    ground_state, ///< −Σ (A⁻¹)_ij ∂_i∂_j u = u^{p−1}, left side homogeneous of degree −1
    penalty,      ///< −Δ_A u + V u = u^{p−1}, left side homogeneous of degree 1
};

/// Returns c·u solving the multiplier-free equation, given a solution of the
/// equation with multiplier λ: c = λ^{1/p} for the ground state, c = λ^{1/(p−2)}
/// for the penalty form.
inline ScalarField rescale_to_pde(const ScalarField& u, double lambda, double p, PdeForm form = PdeForm::ground_state) {
    if (!(lambda > 0.0)) throw InvalidArgument("rescale_to_pde: the multiplier must be positive");
    detail::require(p > 2.0, "rescale_to_pde: p must exceed 2");
    const double c = form == PdeForm::ground_state ? std::pow(lambda, 1.0 / p) : std::pow(lambda, 1.0 / (p - 2.0));
    return u.scaled(c);
}

namespace detail {

inline MaskPtr mask_or_interior(const ScalarField& u) {
    return u.masked() ? u.mask() : share(DomainMask::full(u.grid()));
}

inline double relative_residual(const DomainMask& m, std::span<const double> lhs, std::span<const double> rhs) {
    double num = 0.0, den = 0.0;
    for (std::size_t i : m.free_nodes()) {
        num += (lhs[i] - rhs[i]) * (lhs[i] - rhs[i]);
        den += rhs[i] * rhs[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

} // namespace detail

/// Relative residual of −Σ (A⁻¹[u])_ij ∂_i∂_j u = λ |u|^{p−2} u over the free
/// nodes (interior nodes for unmasked fields).
inline double ground_state_residual(const ScalarField& u, double lambda, double p) {
    const GramMatrix a = gram_matrix(u);
    if (a.degenerate()) throw DegenerateError("ground_state_residual: Gram matrix is degenerate");
    const MaskPtr mask = detail::mask_or_interior(u);
    const EllipticStencil op(inverse(a.matrix()), mask);
    std::vector<double> in(u.values().begin(), u.values().end()), lhs(u.size()), rhs(u.size(), 0.0);
    for (std::size_t i = 0; i < in.size(); ++i)
        if (!mask->is_free(i)) in[i] = 0.0;
    op.apply(in, lhs);
    for (std::size_t i : mask->free_nodes()) {
        lhs[i] = -lhs[i];
        rhs[i] = lambda * std::pow(std::abs(in[i]), p - 2.0) * in[i];
    }
    return detail::relative_residual(*mask, lhs, rhs);
}

/// Relative residual of −Δ_A u + V u = λ |u|^{p−2} u.
inline double penalty_residual(const ScalarField& u, const ScalarField& v, double lambda, double p) {
    detail::require(u.grid() == v.grid(), "penalty_residual: u and V use different grids");
    const GramMatrix a = gram_matrix(u);
    if (a.degenerate()) throw DegenerateError("penalty_residual: Gram matrix is degenerate");
    const MaskPtr mask = detail::mask_or_interior(u);
    const EllipticStencil op = EllipticStencil::for_metric(a, mask);
    std::vector<double> in(u.values().begin(), u.values().end()), lhs(u.size()), rhs(u.size(), 0.0);
    for (std::size_t i = 0; i < in.size(); ++i)
        if (!mask->is_free(i)) in[i] = 0.0;
    op.apply(in, lhs);
    for (std::size_t i : mask->free_nodes()) {
        lhs[i] = -lhs[i] + v[i] * in[i];
        rhs[i] = lambda * std::pow(std::abs(in[i]), p - 2.0) * in[i];
    }
    return detail::relative_residual(*mask, lhs, rhs);
}

namespace detail {

/// Minimizes E₂(u) + ∫ V u² (or ‖∇u‖² + ∫ V u² in classical mode) on the
/// sphere ‖u‖_p = 1 by inverse power steps on the majorizer
/// Q_k(u) = tr(C_k A[u]) + ∫ V u². Each step solves (−L_{C_k} + V) w = |u|^{p−2}u
/// by CG started at u / Q_k(u); every CG iterate then has Q_k(w)/‖w‖_p² ≤ Q_k(u),
/// so the normalized full step never raises the objective.
class PowerEngine {
  public:
    PowerEngine(MaskPtr mask, std::vector<double> potential, double p, const SolverConfig& cfg)
        : mask_(std::move(mask)), v_(std::move(potential)), p_(p), cfg_(cfg) {}

    struct Eval {
        GramMatrix gram;
        double objective = 0.0;
        double residual = 0.0;
        double multiplier = 0.0;
        bool degenerate = false;
    };

    struct Run {
        std::vector<double> u;
        Eval eval;
        std::vector<TraceEntry> trace;
        bool converged = false;
        bool monotone = true;
        int regularized_steps = 0;
        int restarts = 0;
    };

    void normalize(std::vector<double>& u) const {
        const double m = free_pow_sum(*mask_, u, p_);
        require(m > 0.0, "ground state: iterate vanished");
        const double s = std::pow(m, -1.0 / p_);
        for (double& x : u) x *= s;
    }

    double potential_term(const std::vector<double>& u) const {
        if (v_.empty()) return 0.0;
        const auto nodes = mask_->free_nodes();
        return mask_->grid().cell_volume() *
               deterministic_sum(nodes.size(), [&](std::size_t k) { return v_[nodes[k]] * u[nodes[k]] * u[nodes[k]]; });
    }

    /// Objective, multiplier μ = pairing / ∫|u|^p and the relative residual of
    /// −Δ_A u + V u = μ |u|^{p−2} u (Δ in classical mode).
    Eval evaluate(const std::vector<double>& u) const {
        Eval e;
        e.gram = GramMatrix(gram_sums(mask_->grid(), u));
        const double vterm = potential_term(u);
        if (cfg_.classical) {
            e.objective = e.gram.trace() + vterm;
        } else {
            e.degenerate = e.gram.degenerate();
            e.objective = affine_energy(e.gram) + vterm;
        }
        if (e.degenerate) {
            e.residual = INFINITY;
            return e;
        }
        const SmallMatrix c = cfg_.classical ? SmallMatrix::identity(e.gram.dim()) : EllipticStencil::coefficients_for(e.gram);
        const EllipticStencil op(c, mask_);
        std::vector<double> lhs(u.size()), rhs(u.size(), 0.0);
        op.apply(u, lhs);
        for (std::size_t i : mask_->free_nodes()) {
            lhs[i] = -lhs[i] + (v_.empty() ? 0.0 : v_[i] * u[i]);
            rhs[i] = std::pow(std::abs(u[i]), p_ - 2.0) * u[i];
        }
        e.multiplier = free_inner(*mask_, lhs, u) / free_pow_sum(*mask_, u, p_);
        for (std::size_t i : mask_->free_nodes()) rhs[i] *= e.multiplier;
        e.residual = relative_residual(*mask_, lhs, rhs);
        return e;
    }

    Run run(std::vector<double> u, std::uint64_t seed) const {
        Run r;
        for (std::size_t i = 0; i < u.size(); ++i)
            if (!mask_->is_free(i)) u[i] = 0.0;
        normalize(u);
        Eval cur = evaluate(u);
        int restarts = 0;
        while (cur.degenerate) {
            u = fresh_start(derive_seed(seed, static_cast<std::uint64_t>(++restarts) << 32));
            cur = evaluate(u);
        }
        r.trace.push_back({0, cur.residual, cur.objective, 0, false});
        double inner_tol = adaptive_tol(cur.residual);
        for (int k = 1; k <= cfg_.max_outer; ++k) {
            bool reg = false;
            const EllipticStencil op(majorizer_coefficients(cur.gram, cfg_, reg), mask_);
            if (reg) ++r.regularized_steps;
            std::vector<double> s(u.size(), 0.0);
            for (std::size_t i : mask_->free_nodes()) s[i] = std::pow(std::abs(u[i]), p_ - 2.0) * u[i];
            std::vector<double> x(u.size());
            const double q = majorizer_value(op, u);
            for (std::size_t i = 0; i < u.size(); ++i) x[i] = u[i] / q;
            const CgResult cg = conjugate_gradient(op, v_, s, x, inner_tol, cfg_.inner_max_iter);

            normalize(x);
            Eval best = evaluate(x);
            std::vector<double> next = x;
            if (cfg_.damping < 1.0) {
                std::vector<double> d(u.size());
                for (std::size_t i = 0; i < u.size(); ++i) d[i] = (1.0 - cfg_.damping) * u[i] + cfg_.damping * x[i];
                normalize(d);
                Eval ed = evaluate(d);
                if (!ed.degenerate && ed.objective < best.objective) {
                    best = ed;
                    next = std::move(d);
                }
            }
            if (cfg_.positivity_projection) {
                std::vector<double> a(next.size());
                for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::abs(next[i]);
                if (a != next) {
                    Eval ea = evaluate(a);
                    if (!ea.degenerate && ea.objective <= best.objective) {
                        best = ea;
                        next = std::move(a);
                    }
                }
            }
            if (best.degenerate) {
                ++restarts;
                u = fresh_start(derive_seed(seed, static_cast<std::uint64_t>(restarts) << 32));
                cur = evaluate(u);
                r.trace.push_back({k, cur.residual, cur.objective, cg.iterations, reg});
                continue;
            }
            const double previous = cur.objective;
            if (best.objective > previous + 1e-12 * std::abs(previous)) r.monotone = false;
            u = std::move(next);
            cur = best;
            r.trace.push_back({k, cur.residual, cur.objective, cg.iterations, reg});
            inner_tol = adaptive_tol(cur.residual);
            const double change = std::abs(cur.objective - previous) / std::max(std::abs(previous), 1e-300);
            if (change <= cfg_.outer_tol && cur.residual <= cfg_.outer_tol) {
                r.converged = true;
                break;
            }
        }
        r.u = std::move(u);
        r.eval = cur;
        r.restarts = restarts;
        return r;
    }

    std::vector<double> fresh_start(std::uint64_t seed) const {
        std::vector<double> u = centered_bump(*mask_);
        const auto mod = modulation(mask_->grid(), seed, 0.5);
        for (std::size_t i = 0; i < u.size(); ++i) u[i] *= mod[i];
        normalize(u);
        return u;
    }

    const MaskPtr& mask() const noexcept { return mask_; }

  private:
    double adaptive_tol(double residual) const { return std::max(cfg_.inner_tol, std::min(1e-3, 0.1 * residual)); }

    double majorizer_value(const EllipticStencil& op, const std::vector<double>& u) const {
        std::vector<double> lu(u.size());
        op.apply(u, lu);
        for (double& x : lu) x = -x;
        return free_inner(*mask_, lu, u) + potential_term(u);
    }

    MaskPtr mask_;
    std::vector<double> v_;
    double p_;
    SolverConfig cfg_;
};

inline PowerEngine::Run best_of_starts(const PowerEngine& engine, const SolverConfig& cfg,
                                       const std::optional<std::vector<double>>& initial, SolveReport& rep) {
    PowerEngine::Run best;
    bool have = false;
    for (int s = 0; s < cfg.starts; ++s) {
        const std::uint64_t seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(s));
        std::vector<double> u0;
        if (s == 0 && initial) u0 = *initial;
        else if (s == 0) u0 = centered_bump(*engine.mask());
        else u0 = engine.fresh_start(seed);
        PowerEngine::Run r = engine.run(std::move(u0), seed);
        rep.starts.push_back({seed, r.eval.objective, static_cast<int>(r.trace.size()) - 1, r.converged, r.restarts});
        const bool better = !have || (r.converged && !best.converged) ||
                            (r.converged == best.converged && r.eval.objective < best.eval.objective);
        if (better) {
            best = std::move(r);
            have = true;
        }
    }
    return best;
}

inline void fill_common(SolveReport& rep, const PowerEngine::Run& run, const MaskPtr& mask) {
    rep.minimizer = ScalarField(mask->grid(), run.u, mask);
    rep.objective = run.eval.objective;
    rep.gram = run.eval.gram;
    rep.trace = run.trace;
    rep.converged = run.converged;
    rep.monotone = run.monotone;
    rep.regularized_steps = run.regularized_steps;
}

} // namespace detail

/// Minimizes E₂(u) over ‖u‖_{p,Ω} = 1 with u vanishing off the mask's free
/// nodes (‖∇u‖₂² when cfg.classical). Reports κ_p, the multiplier λ of
/// −Σ (A⁻¹)_ij ∂_i∂_j u = λ u^{p−1}, and c·u with c = λ^{1/p} solving the
/// multiplier-free equation. An `initial` field, when given, replaces the
/// centered bump of the first start.
inline SolveReport ground_state(double p, const MaskPtr& mask, SolverConfig cfg,
                                const std::optional<ScalarField>& initial = std::nullopt) {
    detail::require(mask != nullptr, "ground_state: a mask is required");
    cfg.p = p;
    cfg.validate();
    cfg.validate_exponent(mask->grid().dim());
    if (!mask->bounded()) throw PreconditionError("ground_state: the mask must be bounded");
    std::optional<std::vector<double>> init;
    if (initial) {
        detail::require(initial->grid() == mask->grid(), "ground_state: initial field uses a different grid");
        init = initial->with_mask(mask).take_values();
    }

    const detail::PowerEngine engine(mask, {}, p, cfg);
    SolveReport rep;
    rep.problem = "ground_state";
    const auto run = detail::best_of_starts(engine, cfg, init, rep);
    detail::fill_common(rep, run, mask);
    if (cfg.classical) {
        rep.lagrange_multiplier = run.eval.multiplier;
        rep.pre_rescale_residual = rep.pde_residual = run.eval.residual;
        rep.lambda_positive = rep.lagrange_multiplier > 0.0;
        rep.rescaled = rep.minimizer;
    } else {
        const double n = mask->grid().dim();
        const double scale = std::pow(run.eval.gram.det(), 1.0 / n);
        rep.lagrange_multiplier = run.eval.multiplier / scale;
        rep.lambda_positive = rep.lagrange_multiplier > 0.0;
        rep.pre_rescale_residual = ground_state_residual(rep.minimizer, rep.lagrange_multiplier, p);
        if (rep.lambda_positive) {
            rep.rescale_factor = std::pow(rep.lagrange_multiplier, 1.0 / p);
            rep.rescaled = rescale_to_pde(rep.minimizer, rep.lagrange_multiplier, p);
            rep.pde_residual = ground_state_residual(rep.rescaled, 1.0, p);
        } else {
            rep.rescaled = rep.minimizer;
            rep.pde_residual = rep.pre_rescale_residual;
        }
    }
    if (!rep.converged) throw SolverConvergenceError("ground_state: descent stagnated before reaching tolerance", rep);
    return rep;
}

namespace detail {

inline void validate_potential(const ScalarField& v) {
    const GridSpec& g = v.grid();
    double edge_dev = 0.0;
    NodeCursor c(g, 0);
    for (std::size_t i = 0; i < v.size(); ++i, c.advance()) {
        if (v[i] < 0.0 || v[i] > 1.0 + 1e-12)
            throw InvalidArgument("penalty_ground_state: V must satisfy 0 <= V <= 1");
        bool edge = false;
        for (int a = 0; a < g.dim(); ++a) edge = edge || c.on_edge(a);
        if (edge) edge_dev = std::max(edge_dev, std::abs(v[i] - 1.0));
    }
    if (edge_dev > 1e-3) throw InvalidArgument("penalty_ground_state: V must approach 1 at the box boundary");
}

/// V on `target`, interpolated inside the source grid and 1 outside it.
inline std::vector<double> extend_potential(const ScalarField& v, const GridSpec& target) {
    const Interpolator interp(v);
    const Box src = v.grid().box();
    std::vector<double> out(target.node_count());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const SmallVector x = target.position(i);
        bool in = true;
        for (int a = 0; a < target.dim(); ++a) in = in && x[a] >= src.lo[a] - 1e-12 && x[a] <= src.hi[a] + 1e-12;
        out[i] = in ? std::clamp(interp(x), 0.0, 1.0) : 1.0;
    }
    return out;
}

inline GridSpec scaled_box_grid(const GridSpec& g, double factor) {
    const int n = g.dim();
    SmallVector lo(n), hi(n), h(n);
    const Box b = g.box();
    for (int a = 0; a < n; ++a) {
        const double mid = 0.5 * (b.lo[a] + b.hi[a]);
        const double half = 0.5 * (b.hi[a] - b.lo[a]) * factor;
        lo[a] = mid - half;
        hi[a] = mid + half;
        h[a] = g.spacing(a);
    }
    return GridSpec::covering(Box{lo, hi}, h);
}

inline void penalty_outputs(SolveReport& rep, const ScalarField& v, double p) {
    rep.lagrange_multiplier = rep.objective;
    rep.lambda_positive = rep.lagrange_multiplier > 0.0;
    rep.pre_rescale_residual = penalty_residual(rep.minimizer, v, rep.lagrange_multiplier, p);
    if (rep.lambda_positive) {
        rep.rescale_factor = std::pow(rep.lagrange_multiplier, 1.0 / (p - 2.0));
        rep.rescaled = rescale_to_pde(rep.minimizer, rep.lagrange_multiplier, p, PdeForm::penalty);
        rep.pde_residual = penalty_residual(rep.rescaled, v, 1.0, p);
    } else {
        rep.rescaled = rep.minimizer;
        rep.pde_residual = rep.pre_rescale_residual;
    }
}

} // namespace detail

/// Minimizes E₂(u) + ∫ V u² over ‖u‖_p = 1 on the box of V's grid with zero
/// Dirichlet data. Requires 0 ≤ V ≤ 1 and V within 1e-3 of 1 on the box faces.
/// When cfg.box_halfwidth > 0 the problem is posed on the centered box of that
/// half-width instead, with V extended by 1. The multiplier is κ′ itself and
/// c = κ′^{1/(p−2)}. With cfg.check_truncation the problem is re-solved on a
/// 1.5× box and flagged if κ′ moves by more than 1%.
inline SolveReport penalty_ground_state(const ScalarField& v_in, double p, SolverConfig cfg) {
    cfg.p = p;
    cfg.validate();
    const int n = v_in.dim();
    cfg.validate_exponent(n);
    ScalarField v = v_in.without_mask();
    if (cfg.box_halfwidth > 0.0) {
        SmallVector h(n);
        for (int a = 0; a < n; ++a) h[a] = v_in.grid().spacing(a);
        const Box b = v_in.grid().box();
        SmallVector lo(n), hi(n);
        for (int a = 0; a < n; ++a) {
            const double mid = 0.5 * (b.lo[a] + b.hi[a]);
            lo[a] = mid - cfg.box_halfwidth;
            hi[a] = mid + cfg.box_halfwidth;
        }
        const GridSpec g = GridSpec::covering(Box{lo, hi}, h);
        v = ScalarField(g, detail::extend_potential(v_in, g));
    }
    detail::validate_potential(v);
    const MaskPtr mask = share(DomainMask::full(v.grid()));

    const detail::PowerEngine engine(mask, std::vector<double>(v.values().begin(), v.values().end()), p, cfg);
    SolveReport rep;
    rep.problem = "penalty";
    const auto run = detail::best_of_starts(engine, cfg, std::nullopt, rep);
    detail::fill_common(rep, run, mask);
    detail::penalty_outputs(rep, v, p);

    if (cfg.check_truncation) {
        const GridSpec big = detail::scaled_box_grid(v.grid(), 1.5);
        const MaskPtr big_mask = share(DomainMask::full(big));
        SolverConfig c2 = cfg;
        c2.starts = 1;
        const detail::PowerEngine e2(big_mask, detail::extend_potential(v, big), p, c2);
        std::vector<double> u0 = resample(rep.minimizer, AffineMap::identity(n), big).take_values();
        const auto r2 = e2.run(std::move(u0), cfg.seed);
        rep.truncation.performed = true;
        rep.truncation.enlarged_objective = r2.eval.objective;
        rep.truncation.relative_change = std::abs(r2.eval.objective - rep.objective) / std::abs(rep.objective);
        rep.truncation.sensitive = rep.truncation.relative_change > 0.01;
    }
    if (!rep.converged) throw SolverConvergenceError("penalty_ground_state: descent stagnated before reaching tolerance", rep);
    return rep;
}

} // namespace affsob
