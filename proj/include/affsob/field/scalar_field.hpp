#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "affsob/core/parallel.hpp"
#include "affsob/field/mask.hpp"

namespace affsob {

/// Node samples of a function on a GridSpec, optionally tied to a domain mask.
/// Masked fields model H₀^{1,2}(Ω): values on boundary and outside nodes are
/// forced to zero on construction.
class ScalarField {
  public:
    ScalarField() = default;

    ScalarField(GridSpec grid, std::vector<double> values, MaskPtr mask = nullptr)
        : grid_(std::move(grid)), values_(std::move(values)), mask_(std::move(mask)) {
        detail::require(values_.size() == grid_.node_count(), "ScalarField: value count does not match the grid");
        if (mask_) detail::require(mask_->grid() == grid_, "ScalarField: mask grid differs from field grid");
        for (double v : values_) detail::require(std::isfinite(v), "ScalarField: values must be finite");
        pin();
    }

    static ScalarField zeros(const GridSpec& grid, MaskPtr mask = nullptr) {
        return ScalarField(grid, std::vector<double>(grid.node_count(), 0.0), std::move(mask));
    }

    static ScalarField zeros(const MaskPtr& mask) { return zeros(mask->grid(), mask); }

    /// Samples f(x) at every node.
    template <class F>
    static ScalarField sample(const GridSpec& grid, F&& f, MaskPtr mask = nullptr) {
        std::vector<double> v(grid.node_count());
        parallel_for(v.size(), [&](std::size_t b, std::size_t e) {
            NodeCursor c(grid, b);
            for (std::size_t i = b; i < e; ++i, c.advance()) v[i] = f(grid.position(c.index()));
        });
        return ScalarField(grid, std::move(v), std::move(mask));
    }

    template <class F>
    static ScalarField sample(const MaskPtr& mask, F&& f) {
        return sample(mask->grid(), std::forward<F>(f), mask);
    }

    const GridSpec& grid() const noexcept { return grid_; }
    int dim() const noexcept { return grid_.dim(); }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    const MaskPtr& mask() const noexcept { return mask_; }
    bool masked() const noexcept { return static_cast<bool>(mask_); }

    /// Whether node i carries a quadrature weight (inside the mask, or any node
    /// of an unmasked field).
    bool counts(std::size_t i) const noexcept { return !mask_ || mask_->inside(i); }

    /// New field on the same grid and mask with different values.
    ScalarField with_values(std::vector<double> values) const { return ScalarField(grid_, std::move(values), mask_); }

    ScalarField with_mask(MaskPtr mask) const { return ScalarField(grid_, values_, std::move(mask)); }

    ScalarField without_mask() const { return ScalarField(grid_, values_, nullptr); }

    ScalarField scaled(double c) const {
        std::vector<double> v(values_);
        for (double& x : v) x *= c;
        return with_values(std::move(v));
    }

    ScalarField plus(const ScalarField& o, double c = 1.0) const {
        detail::require(o.grid_ == grid_, "ScalarField: grids differ");
        std::vector<double> v(values_);
        for (std::size_t i = 0; i < v.size(); ++i) v[i] += c * o.values_[i];
        return with_values(std::move(v));
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (double x : values_) m = std::max(m, std::abs(x));
        return m;
    }

    /// Releases the value storage.
    std::vector<double> take_values() && { return std::move(values_); }

  private:
    void pin() {
        if (!mask_) return;
        const auto flags = mask_->free_flags();
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (!flags[i]) values_[i] = 0.0;
    }

    GridSpec grid_;
    std::vector<double> values_;
    MaskPtr mask_;
};

} // namespace affsob
