#pragma once

// Closed-form reference values used as independent oracles by the tests.

#include <cmath>
#include <numbers>

#include "affsob/core/small_matrix.hpp"

namespace oracle {

using affsob::SmallMatrix;
using affsob::SmallVector;

inline double gaussian(const SmallVector& x, double alpha = 0.5) { return std::exp(-alpha * x.dot(x)); }

/// ∇ e^{−α|x|²} = −2α x e^{−α|x|²}.
inline SmallVector gaussian_gradient(const SmallVector& x, double alpha = 0.5) {
    return x * (-2.0 * alpha * gaussian(x, alpha));
}

/// Hessian of e^{−α|x|²}: (4α² x xᵀ − 2α I) e^{−α|x|²}.
inline SmallMatrix gaussian_hessian(const SmallVector& x, double alpha = 0.5) {
    const int n = x.size();
    SmallMatrix h(n);
    const double g = gaussian(x, alpha);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = (4.0 * alpha * alpha * x[i] * x[j] - (i == j ? 2.0 * alpha : 0.0)) * g;
    return h;
}

/// Gram matrix of u(x) = exp(−½ xᵀ Q x) on ℝ^N for SPD Q:
/// A = ∫ Q x xᵀ Q e^{−xᵀQx} dx = (π^{N/2} / (2 √det Q)) Q.
inline SmallMatrix gaussian_form_gram(const SmallMatrix& q) {
    const int n = q.size();
    return q * (std::pow(std::numbers::pi, 0.5 * n) / (2.0 * std::sqrt(affsob::determinant(q))));
}

/// ∫_{ℝ^N} e^{−α|x|²} dx.
inline double gaussian_integral(int n, double alpha) { return std::pow(std::numbers::pi / alpha, 0.5 * n); }

inline double sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

} // namespace oracle
