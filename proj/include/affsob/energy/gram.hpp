#pragma once

#include <cmath>
#include <numbers>

#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// Symmetric positive semidefinite N×N matrix A[u]_{ab} = ∫ ∂_a u ∂_b u.
class GramMatrix {
  public:
    GramMatrix() = default;

    explicit GramMatrix(const SmallMatrix& m)
        : m_(m) {
        const double scale = std::max(1e-300, m.frobenius_norm());
        if (m.asymmetry() > 1e-12 * scale) throw InvalidArgument("GramMatrix: matrix is not symmetric");
        for (int i = 0; i < m_.size(); ++i)
            for (int j = i + 1; j < m_.size(); ++j) m_(i, j) = m_(j, i) = 0.5 * (m(i, j) + m(j, i));
    }

    int dim() const noexcept { return m_.size(); }
    const SmallMatrix& matrix() const noexcept { return m_; }
    double operator()(int i, int j) const noexcept { return m_(i, j); }
    double trace() const noexcept { return m_.trace(); }
    double det() const { return determinant(m_); }

    /// det A ≤ 1e-12 (tr A / N)^N, which includes A = 0.
    bool degenerate() const {
        const double n = dim();
        const double t = trace() / n;
        if (!(t > 0.0)) return true;
        return det() <= 1e-12 * std::pow(t, n);
    }

    /// ‖A − (tr A/N) I‖_F ≤ rel_tol · tr A/N.
    bool isotropic(double rel_tol = 1e-10) const {
        const double t = trace() / dim();
        return (m_ - SmallMatrix::identity(dim()) * t).frobenius_norm() <= rel_tol * std::abs(t);
    }

  private:
    SmallMatrix m_;
};

namespace detail {

/// Accumulates h^N-weighted raw Gram sums: forward differences along every grid
/// edge for the diagonal, products of central differences at nodes away from
/// the grid faces for the off-diagonal entries. Zero-extended masked fields and
/// unmasked fields share this rule.
inline SmallMatrix gram_sums(const GridSpec& g, std::span<const double> v) {
    const int n = g.dim();
    std::array<std::size_t, kMaxDim> stride{};
    std::array<double, kMaxDim> inv_h{}, inv_2h{};
    for (int a = 0; a < n; ++a) {
        stride[static_cast<std::size_t>(a)] = g.stride(a);
        inv_h[static_cast<std::size_t>(a)] = 1.0 / g.spacing(a);
        inv_2h[static_cast<std::size_t>(a)] = 0.5 / g.spacing(a);
    }
    constexpr std::size_t K = static_cast<std::size_t>(kMaxDim * kMaxDim);
    const auto sums = deterministic_accumulate<K>(g.node_count(), [&](std::size_t b, std::size_t e, std::array<double, K>& acc) {
        NodeCursor c(g, b);
        std::array<double, kMaxDim> cd{};
        for (std::size_t i = b; i < e; ++i, c.advance()) {
            bool interior = true;
            for (int a = 0; a < n; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                const std::size_t k = c[a], last = g.shape(a) - 1;
                if (k < last) {
                    const double d = (v[i + stride[ua]] - v[i]) * inv_h[ua];
                    acc[ua * kMaxDim + ua] += d * d;
                }
                if (k == 0 || k == last) interior = false;
            }
            if (!interior) continue;
            for (int a = 0; a < n; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                cd[ua] = (v[i + stride[ua]] - v[i - stride[ua]]) * inv_2h[ua];
            }
            for (int a = 0; a < n; ++a)
                for (int b2 = a + 1; b2 < n; ++b2)
                    acc[static_cast<std::size_t>(a) * kMaxDim + static_cast<std::size_t>(b2)] +=
                        cd[static_cast<std::size_t>(a)] * cd[static_cast<std::size_t>(b2)];
        }
    });
    const double w = g.cell_volume();
    SmallMatrix m(n);
    for (int a = 0; a < n; ++a)
        for (int b2 = a; b2 < n; ++b2)
            m(a, b2) = m(b2, a) = w * sums[static_cast<std::size_t>(a) * kMaxDim + static_cast<std::size_t>(b2)];
    return m;
}

} // namespace detail

/// Discrete A[u]. The quadratic form ξᵀAξ dominates the central-difference sum
/// ∫(ξ·∇u)², so A is positive semidefinite, and its derivative in u is exactly
/// −2 times the cross/compact second-difference stencils used by the operator
/// module.
inline GramMatrix gram_matrix(const ScalarField& u) { return GramMatrix(detail::gram_sums(u.grid(), u.values())); }

/// ‖∇u‖₂² in the same discretisation (trace of the Gram matrix).
inline double gradient_norm_sq(const ScalarField& u) { return gram_matrix(u).trace(); }

/// Area of the unit sphere S^{N−1} ⊂ ℝ^N.
inline double sphere_area(int n) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// E₂ = N det(A)^{1/N}; 0 for degenerate A.
inline double affine_energy(const GramMatrix& a) {
    if (a.degenerate()) return 0.0;
    return a.dim() * std::pow(a.det(), 1.0 / a.dim());
}

struct J2Value {
    double value = 0.0;
    bool degenerate = false;
};

/// J₂ = ω_N^{−1/N} det(A)^{1/(2N)}; value 0 with the flag set for degenerate A.
inline J2Value affine_sobolev_j2(const GramMatrix& a) {
    if (a.degenerate()) return {0.0, true};
    const double n = a.dim();
    return {std::pow(sphere_area(a.dim()), -1.0 / n) * std::pow(a.det(), 0.5 / n), false};
}

} // namespace affsob
