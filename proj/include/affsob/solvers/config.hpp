#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "affsob/energy/gram.hpp"
#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// 2* = 2N/(N−2), infinite for N = 2.
inline double critical_exponent(int n) {
    return n <= 2 ? std::numeric_limits<double>::infinity() : 2.0 * n / (n - 2.0);
}

struct SolverConfig {
    double damping = 0.5;       ///< θ ∈ (0, 1]
    double outer_tol = 1e-8;    ///< relative objective change and equation residual
    int max_outer = 400;
    double inner_tol = 1e-10;   ///< floor of the adaptive CG tolerance
    long inner_max_iter = 0;    ///< ≤ 0: 10 √n √cond
    double p = 4.0;
    std::uint64_t seed = 1;
    int starts = 5;             ///< multi-start count, best objective wins
    bool positivity_projection = true;
    double box_halfwidth = 0.0; ///< truncation box for whole-space problems (0: use the grid of V)
    double regularization = 1e-8;
    bool classical = false;     ///< replace E₂ by ‖∇u‖₂² (coefficients fixed to I)
    bool check_truncation = true;

    void validate_exponent(int n) const {
        detail::require(p > 2.0 && p < critical_exponent(n), "SolverConfig: p must satisfy 2 < p < 2N/(N-2)");
    }

    void validate() const {
        detail::require(damping > 0.0 && damping <= 1.0, "SolverConfig: damping must lie in (0, 1]");
        detail::require(outer_tol > 0.0 && inner_tol > 0.0, "SolverConfig: tolerances must be positive");
        detail::require(max_outer >= 1, "SolverConfig: max_outer must be positive");
        detail::require(starts >= 1, "SolverConfig: at least one start is required");
        detail::require(box_halfwidth >= 0.0, "SolverConfig: box size must be nonnegative");
        detail::require(regularization >= 0.0, "SolverConfig: regularization must be nonnegative");
    }
};

struct TraceEntry {
    int iter = 0;
    double residual_norm = 0.0;
    double energy = 0.0; ///< objective value
    long cg_iterations = 0;
    bool regularized = false;
};

struct StartLog {
    std::uint64_t seed = 0;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
    int restarts = 0;
};

struct TruncationCheck {
    bool performed = false;
    double enlarged_objective = 0.0;
    double relative_change = 0.0;
    bool sensitive = false;
};

struct SolveReport {
    std::string problem;
    ScalarField minimizer;
    double objective = 0.0; ///< κ_f, κ_p or κ′
    GramMatrix gram;
    double pde_residual = 0.0;           ///< residual of the reported equation (after rescaling where applicable)
    double pre_rescale_residual = 0.0;   ///< residual with the multiplier λ
    double lagrange_multiplier = 0.0;
    double rescale_factor = 1.0;
    ScalarField rescaled;                ///< c·u solving the multiplier-free equation
    std::vector<TraceEntry> trace;
    std::vector<StartLog> starts;
    bool converged = false;
    bool monotone = true;
    bool degenerate_objective = false;
    bool lambda_positive = true;
    bool objective_negative = false;
    int regularized_steps = 0;
    TruncationCheck truncation;
};

/// Non-convergence of a solver; carries the partial report.
class SolverConvergenceError : public ConvergenceError {
  public:
    SolverConvergenceError(const std::string& what, SolveReport report)
        : ConvergenceError(what), report_(std::make_shared<SolveReport>(std::move(report))) {}
    const SolveReport& report() const noexcept { return *report_; }

  private:
    std::shared_ptr<const SolveReport> report_;
};

} // namespace affsob
