#pragma once

#include <cmath>

#include "affsob/core/random.hpp"
#include "affsob/energy/gram.hpp"
#include "affsob/field/affine_map.hpp"

namespace affsob {

struct NormalizingTransform {
    SmallMatrix rotation;         ///< T₀, orthogonal with det +1, columns are eigenvectors of A
    SmallVector diagonal_scaling; ///< diagonal of T′
    AffineMap composed;           ///< T = T₀ T′, unimodular
    double scale = 0.0;           ///< det(A)^{1/N}, so that Tᵀ A T = scale · I
};

/// T ∈ SL(N) with Tᵀ A T = det(A)^{1/N} I; T = I when A is a multiple of I.
inline NormalizingTransform normalizing_transform(const GramMatrix& a) {
    const int n = a.dim();
    if (a.degenerate()) throw DegenerateError("normalizing_transform: Gram matrix is degenerate");
    if (a.isotropic()) {
        const double t = a.trace() / n;
        return {SmallMatrix::identity(n), SmallVector(n, 1.0), AffineMap::identity(n), t};
    }
    const auto eig = jacobi_eigen(a.matrix(), 1e-16, 100);
    if (!(eig.values[0] > 0.0)) throw DegenerateError("normalizing_transform: Gram matrix is not positive definite");
    double log_det = 0.0;
    for (int i = 0; i < n; ++i) log_det += std::log(eig.values[i]);
    SmallVector d(n);
    double log_prod = 0.0;
    for (int i = 0; i < n; ++i) {
        d[i] = std::exp(log_det / (2.0 * n) - 0.5 * std::log(eig.values[i]));
        log_prod += std::log(d[i]);
    }
    const double fix = std::exp(-log_prod / n);
    for (int i = 0; i < n; ++i) d[i] *= fix;
    NormalizingTransform t;
    t.rotation = eig.vectors;
    t.diagonal_scaling = d;
    t.composed = AffineMap(eig.vectors * SmallMatrix::diagonal(d));
    t.scale = std::exp(log_det / n);
    return t;
}

/// Random element Q·D of SL(N): Q the orthogonal QR factor of a Gaussian
/// matrix (det +1), D positive diagonal with det 1 and condition number at
/// most `cond_cap`.
inline SmallMatrix random_unimodular(int n, Rng& rng, double cond_cap = 100.0) {
    detail::require(cond_cap >= 1.0, "random_unimodular: condition cap must be at least 1");
    SmallMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    const SmallMatrix q = orthogonal_factor(g);
    SmallVector s(n);
    double mean = 0.0;
    for (int i = 0; i < n; ++i) mean += (s[i] = rng.uniform());
    mean /= n;
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < n; ++i) {
        s[i] -= mean;
        lo = std::min(lo, s[i]);
        hi = std::max(hi, s[i]);
    }
    const double spread = hi - lo;
    const double target = rng.uniform() * std::log(cond_cap);
    SmallVector d(n);
    for (int i = 0; i < n; ++i) d[i] = std::exp(spread > 0.0 ? s[i] * target / spread : 0.0);
    return q * SmallMatrix::diagonal(d);
}

/// Random symmetric positive definite matrix R diag(λ) Rᵀ with log-uniform
/// eigenvalues in [1, max_cond]·scale.
inline SmallMatrix random_spd(int n, Rng& rng, double max_cond = 1e3) {
    SmallMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    const SmallMatrix r = orthogonal_factor(g);
    const double scale = std::exp(rng.uniform(-3.0, 3.0));
    SmallVector lam(n);
    for (int i = 0; i < n; ++i) lam[i] = scale * std::exp(rng.uniform() * std::log(max_cond));
    SmallMatrix a = r * SmallMatrix::diagonal(lam) * r.transpose();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
    return a;
}

} // namespace affsob
