#pragma once

#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "affsob/energy/gram.hpp"
#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// One neighbour of the stencil: grid shift per axis, its linear offset on the
/// mask grid, and the weight.
struct StencilTap {
    std::array<int, kMaxDim> shift{};
    long offset = 0;
    double weight = 0.0;
};

/// Constant-coefficient operator L_C u = Σ_ab C_ab ∂_a∂_b u on the free nodes of
/// a mask, with compact second differences on the diagonal and the symmetric
/// four-corner stencil for mixed terms. Applied to fields that vanish off the
/// free nodes, −L_C is symmetric positive definite, and
/// ⟨−L_C u, u⟩ h^N = tr(C A[u]) for the discrete Gram matrix A.
class EllipticStencil {
  public:
    EllipticStencil(const SmallMatrix& coefficients, MaskPtr mask)
        : c_(coefficients), mask_(std::move(mask)) {
        detail::require(mask_ != nullptr, "EllipticStencil: a mask is required");
        const GridSpec& g = mask_->grid();
        const int n = g.dim();
        detail::require(c_.size() == n, "EllipticStencil: coefficient size differs from the grid dimension");
        if (c_.asymmetry() > 1e-12 * c_.frobenius_norm())
            throw InvalidArgument("EllipticStencil: coefficient matrix is not symmetric");
        const auto eig = jacobi_eigen(c_);
        if (!(eig.values[0] > 0.0)) throw InvalidArgument("EllipticStencil: coefficient matrix is not positive definite");
        condition_ = eig.values[n - 1] / eig.values[0];

        auto tap = [&](int a, int sa, int b, int sb, double w) {
            StencilTap t;
            if (a >= 0) t.shift[static_cast<std::size_t>(a)] += sa;
            if (b >= 0) t.shift[static_cast<std::size_t>(b)] += sb;
            for (int k = 0; k < n; ++k) t.offset += t.shift[static_cast<std::size_t>(k)] * static_cast<long>(g.stride(k));
            t.weight = w;
            taps_.push_back(t);
        };
        double center = 0.0;
        for (int a = 0; a < n; ++a) center -= 2.0 * c_(a, a) / (g.spacing(a) * g.spacing(a));
        tap(-1, 0, -1, 0, center);
        for (int a = 0; a < n; ++a) {
            const double w = c_(a, a) / (g.spacing(a) * g.spacing(a));
            tap(a, 1, -1, 0, w);
            tap(a, -1, -1, 0, w);
        }
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const double w = c_(a, b) / (2.0 * g.spacing(a) * g.spacing(b));
                tap(a, 1, b, 1, w);
                tap(a, -1, b, -1, w);
                tap(a, 1, b, -1, -w);
                tap(a, -1, b, 1, -w);
            }
    }

    /// Coefficients det(M)^{1/N} M⁻¹ for a metric M; exactly the identity when
    /// M is a multiple of the identity to 1e-10.
    static SmallMatrix coefficients_for(const GramMatrix& m) {
        if (m.isotropic()) return SmallMatrix::identity(m.dim());
        const double d = m.det();
        if (!(d > 0.0)) throw InvalidArgument("EllipticStencil: metric is not positive definite");
        return inverse(m.matrix()) * std::pow(d, 1.0 / m.dim());
    }

    static EllipticStencil for_metric(const GramMatrix& m, MaskPtr mask) {
        return EllipticStencil(coefficients_for(m), std::move(mask));
    }

    const SmallMatrix& coefficients() const noexcept { return c_; }
    const MaskPtr& mask() const noexcept { return mask_; }
    const GridSpec& grid() const noexcept { return mask_->grid(); }
    std::span<const StencilTap> taps() const noexcept { return taps_; }
    double center_weight() const noexcept { return taps_.front().weight; }
    double coefficient_condition() const noexcept { return condition_; }

    /// out_i = (L_C u)_i on free nodes, 0 elsewhere. u must vanish off the free nodes.
    void apply(std::span<const double> u, std::span<double> out) const {
        const auto nodes = mask_->free_nodes();
        std::fill(out.begin(), out.end(), 0.0);
        parallel_for(nodes.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) {
                const std::size_t i = nodes[k];
                double s = 0.0;
                for (const auto& t : taps_) s += t.weight * u[static_cast<std::size_t>(static_cast<long>(i) + t.offset)];
                out[i] = s;
            }
        });
    }

    ScalarField apply(const ScalarField& u) const {
        detail::require(u.grid() == grid(), "EllipticStencil: field grid differs from the stencil grid");
        std::vector<double> in(u.values().begin(), u.values().end());
        const auto flags = mask_->free_flags();
        for (std::size_t i = 0; i < in.size(); ++i)
            if (!flags[i]) in[i] = 0.0;
        std::vector<double> out(in.size());
        apply(in, out);
        return ScalarField(grid(), std::move(out), mask_);
    }

    /// Coefficient table, one line per neighbour offset.
    std::string dump() const {
        std::string s = "shift,weight\n";
        char buf[64];
        for (const auto& t : taps_) {
            for (int a = 0; a < grid().dim(); ++a) {
                std::snprintf(buf, sizeof buf, "%s%d", a ? " " : "", t.shift[static_cast<std::size_t>(a)]);
                s += buf;
            }
            std::snprintf(buf, sizeof buf, ",%.17g\n", t.weight);
            s += buf;
        }
        return s;
    }

  private:
    SmallMatrix c_;
    MaskPtr mask_;
    std::vector<StencilTap> taps_;
    double condition_ = 1.0;
};

} // namespace affsob
