#include <gtest/gtest.h>

#include <cmath>

#include "affsob/affsob.hpp"
#include "oracles/poisson.hpp"
#include "oracles/radial.hpp"

using namespace affsob;

namespace {

MaskPtr disk(std::size_t half, double h, double r) {
    const GridSpec g = GridSpec::centered(2, half, h);
    return share(DomainMask::ball(g, SmallVector(2, 0.0), r));
}

SolverConfig quick(int starts = 1, double tol = 1e-8) {
    SolverConfig c;
    c.starts = starts;
    c.outer_tol = tol;
    return c;
}

} // namespace

TEST(AffinePoisson, ZeroDataGivesZeroWithFlag) {
    const auto mask = disk(16, 0.1, 1.2);
    const SolveReport r = solve_affine_poisson(ScalarField::zeros(mask->grid(), mask), mask, quick());
    EXPECT_TRUE(r.degenerate_objective);
    EXPECT_EQ(r.objective, 0.0);
    EXPECT_EQ(r.minimizer.max_abs(), 0.0);
}

TEST(AffinePoisson, RejectsUnboundedMasks) {
    const GridSpec g = GridSpec::centered(2, 8, 0.1);
    const auto full = share(DomainMask::full(g));
    const auto f = ScalarField::sample(g, [](const SmallVector&) { return 1.0; });
    EXPECT_THROW(solve_affine_poisson(f, full, quick()), PreconditionError);
}

TEST(AffinePoisson, RadialDataReproducesClassicalSolution) {
    const auto mask = disk(32, 1.0 / 32, 0.9);
    const GridSpec& g = mask->grid();
    const auto f = ScalarField::sample(mask, [](const SmallVector& x) { return 2.0 - x.dot(x); });
    const SolveReport r = solve_affine_poisson(f, mask, quick(2, 1e-10));
    oracle::BoxGrid bg;
    bg.dim = 2;
    bg.shape = {g.shape(0), g.shape(1), 0, 0};
    bg.h = 1.0 / 32;
    std::vector<std::uint8_t> unknown(mask->free_flags().begin(), mask->free_flags().end());
    std::vector<double> rhs(g.node_count());
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = 2.0 - g.position(i).dot(g.position(i));
    const auto ref = oracle::classical_poisson(bg, unknown, rhs);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        err = std::max(err, std::abs(r.minimizer[i] - ref[i]));
        scale = std::max(scale, std::abs(ref[i]));
    }
    EXPECT_LT(err / scale, 1e-6);
    EXPECT_TRUE(r.converged);
    EXPECT_TRUE(r.monotone);
    EXPECT_LT(r.objective, 0.0);
    EXPECT_LT(poisson_residual(r.minimizer, f), 1e-6);
}

TEST(AffinePoisson, NonRadialDataDescendsAndIsReproducible) {
    const auto mask = disk(24, 1.0 / 24, 0.9);
    const auto f = ScalarField::sample(mask, [](const SmallVector& x) { return std::exp(2.0 * x[0]) + x[1]; });
    const SolveReport a = solve_affine_poisson(f, mask, quick(3));
    const SolveReport b = solve_affine_poisson(f, mask, quick(3));
    EXPECT_TRUE(a.converged);
    EXPECT_TRUE(a.monotone);
    EXPECT_TRUE(a.objective_negative);
    for (std::size_t k = 1; k < a.trace.size(); ++k) EXPECT_LE(a.trace[k].energy, a.trace[k - 1].energy + 1e-12);
    ASSERT_EQ(a.minimizer.size(), b.minimizer.size());
    for (std::size_t i = 0; i < a.minimizer.size(); ++i) EXPECT_EQ(a.minimizer[i], b.minimizer[i]);
    EXPECT_EQ(a.starts.size(), 3u);
}

TEST(AffinePoisson, ComparisonOfOrderedData) {
    // solve_affine_poisson returns Δ_A u = −g, so the comparison data are f = −g
    const auto mask = disk(24, 1.0 / 24, 0.9);
    const auto g1 = ScalarField::sample(mask, [](const SmallVector& x) { return 2.0 + x.dot(x); });
    const auto g2 = ScalarField::sample(mask, [](const SmallVector& x) { return 1.0 + 0.5 * x.dot(x); });
    const SolveReport r1 = solve_affine_poisson(g1, mask, quick(1, 1e-10));
    const SolveReport r2 = solve_affine_poisson(g2, mask, quick(1, 1e-10));
    const ComparisonReport c = comparison_check(r1.minimizer, r2.minimizer, g1.scaled(-1.0), g2.scaled(-1.0));
    EXPECT_TRUE(c.data_ordered);
    EXPECT_EQ(c.direction, -1);
    EXPECT_TRUE(c.solutions_ordered);
    EXPECT_TRUE(c.holds);
    EXPECT_THROW(comparison_check(r1.minimizer.scaled(1.1), r2.minimizer, g1.scaled(-1.0), g2.scaled(-1.0)),
                 PreconditionError);
}

TEST(GroundState, AffineNotAboveClassicalAndMultiplierIsN) {
    const GridSpec g = GridSpec::centered(2, 24, 1.0 / 20);
    const auto mask = share(DomainMask::box(g, Box::centered(2, 1.0)));
    SolverConfig cfg = quick(1, 1e-8);
    cfg.classical = true;
    const SolveReport rc = ground_state(4.0, mask, cfg);
    cfg.classical = false;
    const SolveReport ra = ground_state(4.0, mask, cfg, rc.minimizer);
    EXPECT_LE(ra.objective, rc.objective + 1e-6);
    EXPECT_NEAR(ra.lagrange_multiplier, 2.0, 1e-6);
    EXPECT_LT(ra.pde_residual, 1e-4);
    EXPECT_NEAR(lp_norm(ra.minimizer, 4.0), 1.0, 1e-10);
    for (std::size_t i : mask->free_nodes()) EXPECT_GT(ra.minimizer[i], 0.0);
    EXPECT_LT(ground_state_residual(ra.rescaled, 1.0, 4.0), 1e-4);
}

TEST(GroundState, RejectsBadExponentsAndUnboundedMasks) {
    const GridSpec g = GridSpec::centered(3, 6, 0.2);
    const auto mask = share(DomainMask::box(g, Box::centered(3, 0.8)));
    EXPECT_THROW(ground_state(6.0, mask, quick()), InvalidArgument);
    EXPECT_THROW(ground_state(2.0, mask, quick()), InvalidArgument);
    EXPECT_THROW(ground_state(4.0, share(DomainMask::full(g)), quick()), PreconditionError);
}

TEST(GroundState, RescaleToPdeScalesByLambdaPower) {
    const GridSpec g = GridSpec::centered(2, 4, 0.25);
    const auto u = ScalarField::sample(g, [](const SmallVector&) { return 2.0; });
    EXPECT_NEAR(rescale_to_pde(u, 16.0, 4.0, PdeForm::ground_state)[0], 2.0 * std::pow(16.0, 0.25), 1e-14);
    EXPECT_NEAR(rescale_to_pde(u, 16.0, 4.0, PdeForm::penalty)[0], 2.0 * std::pow(16.0, 0.5), 1e-14);
    EXPECT_THROW(rescale_to_pde(u, -1.0, 4.0), InvalidArgument);
}

TEST(Penalty, FlatPotentialMatchesRadialOracle) {
    const GridSpec g = GridSpec::centered(2, 64, 1.0 / 8);
    const auto flat = ScalarField::sample(g, [](const SmallVector&) { return 1.0; });
    const SolveReport r = penalty_ground_state(flat, 4.0, quick(1, 1e-8));
    const double ref = oracle::radial_penalty_constant(2, 4.0);
    EXPECT_NEAR(r.objective, ref, 5e-3 * ref);
    EXPECT_LT(r.pde_residual, 1e-4);
    EXPECT_FALSE(r.truncation.sensitive);
}

TEST(Penalty, WellLowersTheConstant) {
    const GridSpec g = GridSpec::centered(2, 48, 1.0 / 6);
    const auto flat = ScalarField::sample(g, [](const SmallVector&) { return 1.0; });
    const auto well = ScalarField::sample(g, [](const SmallVector& x) { return 1.0 - 0.8 * std::exp(-x.dot(x)); });
    SolverConfig cfg = quick(1, 1e-8);
    cfg.check_truncation = false;
    EXPECT_LT(penalty_ground_state(well, 4.0, cfg).objective, penalty_ground_state(flat, 4.0, cfg).objective - 0.1);
}

TEST(Penalty, ValidatesThePotential) {
    const GridSpec g = GridSpec::centered(2, 16, 0.5);
    const auto negative = ScalarField::sample(g, [](const SmallVector& x) { return x.dot(x) < 1.0 ? -0.1 : 1.0; });
    const auto low_edge = ScalarField::sample(g, [](const SmallVector&) { return 0.5; });
    EXPECT_THROW(penalty_ground_state(negative, 4.0, quick()), InvalidArgument);
    EXPECT_THROW(penalty_ground_state(low_edge, 4.0, quick()), InvalidArgument);
}

TEST(Bubble, SharpConstantAndTruncatedProfile) {
    EXPECT_NEAR(sobolev_constant(3), oracle::sobolev_constant_by_quadrature(3), 1e-4 * sobolev_constant(3));
    EXPECT_NEAR(sobolev_constant(4), oracle::sobolev_constant_by_quadrature(4), 1e-4 * sobolev_constant(4));
    EXPECT_EQ(truncated_bubble(3, 8.0, 8.0), 0.0);
    EXPECT_EQ(truncated_bubble(3, 9.0, 8.0), 0.0);
    EXPECT_NEAR(truncated_bubble(3, 0.0, 8.0), 1.0 - 1.0 / std::sqrt(65.0), 1e-15);
}

TEST(Bubble, QuotientMatchesRadialOracleOnACoarseGrid) {
    SmallMatrix d(3);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    d(2, 2) = 0.5;
    const BubbleReport r = critical_bubble_check(3, {d}, 4.0, 0.2);
    EXPECT_NEAR(r.identity_quotient, oracle::truncated_bubble_quotient(3, 4.0), 0.01 * r.identity_quotient);
    EXPECT_LT(r.affine_spread, 0.02);
    EXPECT_TRUE(r.gradient_exceeds);
    SmallMatrix not_unimodular = d * 2.0;
    EXPECT_THROW(critical_bubble_check(3, {not_unimodular}, 4.0, 0.2), PreconditionError);
}
