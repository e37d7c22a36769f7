#include <gtest/gtest.h>

#include <cmath>

#include "affsob/affsob.hpp"
#include "oracles/poisson.hpp"

using namespace affsob;

namespace {

SmallMatrix sym2(double a, double b, double d) {
    SmallMatrix m(2);
    m(0, 0) = a;
    m(0, 1) = m(1, 0) = b;
    m(1, 1) = d;
    return m;
}

MaskPtr disk(const GridSpec& g, double r) { return share(DomainMask::ball(g, SmallVector(2, 0.0), r)); }

std::vector<double> random_on_free(const DomainMask& m, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(m.grid().node_count(), 0.0);
    for (std::size_t i : m.free_nodes()) v[i] = rng.uniform(-1.0, 1.0);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

} // namespace

TEST(EllipticStencil, ExactOnQuadratics) {
    const GridSpec g = GridSpec::centered(2, 20, 0.1);
    const auto mask = disk(g, 1.5);
    const SmallMatrix c = sym2(1.3, -0.4, 0.7);
    const SmallMatrix b = sym2(2.0, 0.5, -1.0);
    const auto u = ScalarField::sample(g, [&](const SmallVector& x) { return 0.5 * x.dot(b * x) + x[0] - 3.0; });
    const EllipticStencil op(c, mask);
    std::vector<double> out(g.node_count());
    op.apply(u.values(), out);
    double expected = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) expected += c(i, j) * b(i, j);
    for (std::size_t i : mask->free_nodes()) EXPECT_NEAR(out[i], expected, 1e-10);
}

TEST(EllipticStencil, SymmetricOnFreeNodes) {
    const GridSpec g = GridSpec::centered(2, 16, 0.1);
    const auto mask = disk(g, 1.3);
    const EllipticStencil op(sym2(2.0, 0.6, 1.0), mask);
    const auto u = random_on_free(*mask, 1), v = random_on_free(*mask, 2);
    std::vector<double> lu(u.size()), lv(v.size());
    op.apply(u, lu);
    op.apply(v, lv);
    EXPECT_NEAR(dot(lu, v), dot(u, lv), 1e-9 * std::abs(dot(lu, v)));
    EXPECT_LT(dot(lu, u), 0.0);
}

TEST(EllipticStencil, QuadraticFormEqualsTraceAgainstGram) {
    const GridSpec g = GridSpec::centered(2, 24, 0.05);
    const auto mask = disk(g, 1.0);
    const SmallMatrix c = sym2(1.7, 0.45, 0.8);
    const auto values = random_on_free(*mask, 3);
    const ScalarField u(g, std::vector<double>(values), mask);
    const EllipticStencil op(c, mask);
    std::vector<double> lu(values.size());
    op.apply(values, lu);
    const double lhs = -dot(lu, values) * g.cell_volume();
    const SmallMatrix a = gram_matrix(u).matrix();
    double rhs = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) rhs += c(i, j) * a(i, j);
    EXPECT_NEAR(lhs, rhs, 1e-11 * std::abs(rhs));
}

TEST(EllipticStencil, CoefficientsForMetric) {
    const SmallMatrix iso = EllipticStencil::coefficients_for(GramMatrix(SmallMatrix::identity(3) * 4.0));
    EXPECT_EQ(iso, SmallMatrix::identity(3));
    const SmallMatrix c = EllipticStencil::coefficients_for(GramMatrix(sym2(3.0, 1.0, 2.0)));
    EXPECT_NEAR(determinant(c), 1.0, 1e-14);
    EXPECT_THROW(EllipticStencil(sym2(1.0, 2.0, 1.0), disk(GridSpec::centered(2, 8, 0.2), 1.0)), InvalidArgument);
}

TEST(ConjugateGradient, MatchesIndependentClassicalSolver) {
    const GridSpec g = GridSpec::centered(2, 24, 1.0 / 16);
    const auto mask = share(DomainMask::box(g, Box::centered(2, 1.0)));
    const auto f = ScalarField::sample(g, [](const SmallVector& x) { return std::cos(x[0]) + x[1] * x[1]; });
    const auto u = constant_coeff_solve(GramMatrix(SmallMatrix::identity(2)), f, mask, 1e-13);

    oracle::BoxGrid bg;
    bg.dim = 2;
    bg.shape = {g.shape(0), g.shape(1), 0, 0};
    bg.h = 1.0 / 16;
    std::vector<std::uint8_t> unknown(mask->free_flags().begin(), mask->free_flags().end());
    const auto ref = oracle::classical_poisson(bg, unknown, std::vector<double>(f.values().begin(), f.values().end()));
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(u[i], ref[i], 1e-10);
}

TEST(ConjugateGradient, PotentialShiftsTheSolution) {
    const GridSpec g = GridSpec::centered(2, 12, 0.1);
    const auto mask = disk(g, 1.0);
    const EllipticStencil op(SmallMatrix::identity(2), mask);
    std::vector<double> rhs(g.node_count(), 1.0), pot(g.node_count(), 5.0), x0(g.node_count(), 0.0), x1 = x0;
    const CgResult r0 = conjugate_gradient(op, {}, rhs, x0, 1e-12);
    const CgResult r1 = conjugate_gradient(op, pot, rhs, x1, 1e-12);
    ASSERT_TRUE(r0.converged && r1.converged);
    for (std::size_t i : mask->free_nodes()) EXPECT_LT(x1[i], x0[i]);
    for (std::size_t i : mask->boundary_nodes()) EXPECT_EQ(x1[i], 0.0);
}

TEST(ConjugateGradient, ReportsNonConvergence) {
    const GridSpec g = GridSpec::centered(2, 20, 0.05);
    const auto mask = disk(g, 0.9);
    const auto f = ScalarField::sample(g, [](const SmallVector&) { return 1.0; });
    EXPECT_THROW(constant_coeff_solve(GramMatrix(SmallMatrix::identity(2)), f, mask, 1e-14, 2), ConvergenceError);
    EXPECT_THROW(constant_coeff_solve(GramMatrix(sym2(1.0, 0.0, 0.0)), f, mask), InvalidArgument);
}

TEST(AffineLaplacian, ReducesToLaplacianForIsotropicFields) {
    const GridSpec g = GridSpec::centered(2, 40, 0.1);
    const auto u = ScalarField::sample(g, [](const SmallVector& x) { return std::exp(-x.dot(x)); });
    const auto a = affine_laplacian(u), l = laplacian(u);
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_EQ(a[i], l[i]);
}

TEST(AffineLaplacian, HomogeneousOfDegreeOne) {
    const GridSpec g = GridSpec::centered(2, 40, 0.1);
    const SmallMatrix q = sym2(2.0, 0.7, 0.5);
    const auto u = ScalarField::sample(g, [&](const SmallVector& x) { return std::exp(-0.5 * x.dot(q * x)); });
    const auto a1 = affine_laplacian(u), a3 = affine_laplacian(u.scaled(3.0));
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(a3[i], 3.0 * a1[i], 1e-12 * (1.0 + std::abs(a1[i])));
}

TEST(FrechetCheck, AgreesAndRejectsBoundaryDirections) {
    const GridSpec g = GridSpec::centered(2, 48, 1.0 / 32);
    const SmallMatrix q = sym2(3.0, 1.0, 1.2);
    const auto mask = disk(g, 1.4);
    const auto u = ScalarField::sample(mask, [&](const SmallVector& x) { return std::exp(-0.5 * x.dot(q * x)) - std::exp(-1.0); });
    const auto v_in = ScalarField::sample(g, [](const SmallVector& x) {
        const double t = 1.0 - x.dot(x);
        return t > 0.0 ? t * t * (1.0 + x[0]) : 0.0;
    });
    EXPECT_LT(frechet_check(u, v_in, 1e-5).rel_err, 1e-6);
    const auto v_out = ScalarField::sample(g, [](const SmallVector&) { return 1.0; });
    EXPECT_THROW(frechet_check(u, v_out, 1e-5), PreconditionError);
    EXPECT_THROW(frechet_check(u, v_in, 1.0), InvalidArgument);
}
