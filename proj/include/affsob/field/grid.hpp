#pragma once

#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "affsob/core/error.hpp"
#include "affsob/core/small_matrix.hpp"

namespace affsob {

namespace detail {
inline std::atomic<std::size_t>& node_cap_setting() {
    static std::atomic<std::size_t> cap{std::size_t{1} << 26};
    return cap;
}
} // namespace detail

/// Upper bound on the total node count of any grid (default 2^26).
inline std::size_t node_cap() { return detail::node_cap_setting().load(); }
inline void set_node_cap(std::size_t cap) { detail::node_cap_setting().store(cap); }

/// Axis-aligned box [lo, hi].
struct Box {
    SmallVector lo;
    SmallVector hi;

    int dim() const noexcept { return lo.size(); }

    double volume() const noexcept {
        double v = 1.0;
        for (int a = 0; a < lo.size(); ++a) v *= std::max(0.0, hi[a] - lo[a]);
        return v;
    }

    bool empty() const noexcept {
        for (int a = 0; a < lo.size(); ++a)
            if (!(hi[a] > lo[a])) return true;
        return false;
    }

    bool contains(const SmallVector& x) const noexcept {
        for (int a = 0; a < lo.size(); ++a)
            if (x[a] < lo[a] || x[a] > hi[a]) return false;
        return true;
    }

    Box intersect(const Box& o) const {
        Box r = *this;
        for (int a = 0; a < lo.size(); ++a) {
            r.lo[a] = std::max(lo[a], o.lo[a]);
            r.hi[a] = std::min(hi[a], o.hi[a]);
        }
        return r;
    }

    static Box centered(int dim, double halfwidth) {
        return Box{SmallVector(dim, -halfwidth), SmallVector(dim, halfwidth)};
    }
};

/// Uniform tensor grid of nodes x = origin + idx * spacing, row-major with the
/// last axis fastest.
class GridSpec {
  public:
    GridSpec() = default;

    GridSpec(std::span<const std::size_t> shape, std::span<const double> spacing, std::span<const double> origin)
        : dim_(static_cast<int>(shape.size())) {
        detail::require(dim_ >= 2 && dim_ <= kMaxDim,
                        "GridSpec: dimension must be in [2, " + std::to_string(kMaxDim) + "]");
        detail::require(spacing.size() == shape.size() && origin.size() == shape.size(),
                        "GridSpec: shape, spacing and origin must have the same length");
        spacing_ = SmallVector::from(spacing);
        origin_ = SmallVector::from(origin);
        for (int a = 0; a < dim_; ++a) shape_[a] = shape[static_cast<std::size_t>(a)];
        validate();
    }

    GridSpec(std::initializer_list<std::size_t> shape, std::initializer_list<double> spacing,
             std::initializer_list<double> origin)
        : GridSpec(std::span<const std::size_t>(shape.begin(), shape.size()),
                   std::span<const double>(spacing.begin(), spacing.size()),
                   std::span<const double>(origin.begin(), origin.size())) {}

    /// Grid covering `box` with nodes on its faces and the given uniform spacing
    /// (rounded so that the box is covered exactly from box.lo).
    static GridSpec covering(const Box& box, double h) {
        return covering(box, SmallVector(box.dim(), h));
    }

    static GridSpec covering(const Box& box, const SmallVector& h) {
        const int n = box.dim();
        std::vector<std::size_t> shape(static_cast<std::size_t>(n));
        std::vector<double> spacing(static_cast<std::size_t>(n)), origin(static_cast<std::size_t>(n));
        for (int a = 0; a < n; ++a) {
            detail::require(h[a] > 0.0, "GridSpec::covering: spacing must be positive");
            const double cells = std::ceil((box.hi[a] - box.lo[a]) / h[a] - 1e-9);
            detail::require(cells < 1e9, "GridSpec::covering: too many cells");
            shape[static_cast<std::size_t>(a)] = static_cast<std::size_t>(std::max(2.0, cells)) + 1;
            spacing[static_cast<std::size_t>(a)] = h[a];
            origin[static_cast<std::size_t>(a)] = box.lo[a];
        }
        return GridSpec(shape, spacing, origin);
    }

    /// Grid symmetric about 0 with 2*half_cells+1 nodes per axis.
    static GridSpec centered(int dim, std::size_t half_cells, double h) {
        std::vector<std::size_t> shape(static_cast<std::size_t>(dim), 2 * half_cells + 1);
        std::vector<double> spacing(static_cast<std::size_t>(dim), h);
        std::vector<double> origin(static_cast<std::size_t>(dim), -static_cast<double>(half_cells) * h);
        return GridSpec(shape, spacing, origin);
    }

    int dim() const noexcept { return dim_; }
    std::size_t shape(int axis) const noexcept { return shape_[static_cast<std::size_t>(axis)]; }
    double spacing(int axis) const noexcept { return spacing_[axis]; }
    double origin(int axis) const noexcept { return origin_[axis]; }
    const SmallVector& spacing() const noexcept { return spacing_; }
    const SmallVector& origin() const noexcept { return origin_; }

    std::vector<std::size_t> shape_vector() const {
        return std::vector<std::size_t>(shape_.begin(), shape_.begin() + dim_);
    }

    std::size_t node_count() const noexcept {
        std::size_t n = 1;
        for (int a = 0; a < dim_; ++a) n *= shape_[static_cast<std::size_t>(a)];
        return n;
    }

    std::size_t stride(int axis) const noexcept {
        std::size_t s = 1;
        for (int a = dim_ - 1; a > axis; --a) s *= shape_[static_cast<std::size_t>(a)];
        return s;
    }

    /// Quadrature weight per node, prod h_i.
    double cell_volume() const noexcept {
        double v = 1.0;
        for (int a = 0; a < dim_; ++a) v *= spacing_[a];
        return v;
    }

    double min_spacing() const noexcept {
        double h = spacing_[0];
        for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
        return h;
    }

    std::array<std::size_t, kMaxDim> multi_index(std::size_t linear) const noexcept {
        std::array<std::size_t, kMaxDim> idx{};
        for (int a = dim_ - 1; a >= 0; --a) {
            const std::size_t n = shape_[static_cast<std::size_t>(a)];
            idx[static_cast<std::size_t>(a)] = linear % n;
            linear /= n;
        }
        return idx;
    }

    std::size_t linear_index(const std::array<std::size_t, kMaxDim>& idx) const noexcept {
        std::size_t i = 0;
        for (int a = 0; a < dim_; ++a) i = i * shape_[static_cast<std::size_t>(a)] + idx[static_cast<std::size_t>(a)];
        return i;
    }

    SmallVector position(std::size_t linear) const noexcept { return position(multi_index(linear)); }

    SmallVector position(const std::array<std::size_t, kMaxDim>& idx) const noexcept {
        SmallVector x(dim_);
        for (int a = 0; a < dim_; ++a) x[a] = origin_[a] + static_cast<double>(idx[static_cast<std::size_t>(a)]) * spacing_[a];
        return x;
    }

    /// Box spanned by the nodes.
    Box box() const {
        Box b{origin_, origin_};
        for (int a = 0; a < dim_; ++a) b.hi[a] = origin_[a] + static_cast<double>(shape_[static_cast<std::size_t>(a)] - 1) * spacing_[a];
        return b;
    }

    friend bool operator==(const GridSpec& x, const GridSpec& y) noexcept {
        if (x.dim_ != y.dim_) return false;
        for (int a = 0; a < x.dim_; ++a)
            if (x.shape_[static_cast<std::size_t>(a)] != y.shape_[static_cast<std::size_t>(a)] ||
                x.spacing_[a] != y.spacing_[a] || x.origin_[a] != y.origin_[a])
                return false;
        return true;
    }

  private:
    void validate() const {
        double total = 1.0;
        for (int a = 0; a < dim_; ++a) {
            detail::require(shape_[static_cast<std::size_t>(a)] >= 3, "GridSpec: every axis needs at least 3 nodes");
            detail::require(spacing_[a] > 0.0 && std::isfinite(spacing_[a]), "GridSpec: spacings must be positive");
            detail::require(std::isfinite(origin_[a]), "GridSpec: origin must be finite");
            total *= static_cast<double>(shape_[static_cast<std::size_t>(a)]);
        }
        detail::require(total <= static_cast<double>(node_cap()),
                        "GridSpec: node count exceeds the configured cap of " + std::to_string(node_cap()));
    }

    int dim_ = 0;
    std::array<std::size_t, kMaxDim> shape_{};
    SmallVector spacing_;
    SmallVector origin_;
};

/// Walks a contiguous range of linear indices while tracking the multi-index.
class NodeCursor {
  public:
    NodeCursor(const GridSpec& g, std::size_t start)
        : grid_(&g), linear_(start), idx_(g.multi_index(start)) {}

    std::size_t linear() const noexcept { return linear_; }
    std::size_t operator[](int axis) const noexcept { return idx_[static_cast<std::size_t>(axis)]; }
    const std::array<std::size_t, kMaxDim>& index() const noexcept { return idx_; }

    bool on_edge(int axis) const noexcept {
        const std::size_t k = idx_[static_cast<std::size_t>(axis)];
        return k == 0 || k + 1 == grid_->shape(axis);
    }

    void advance() noexcept {
        ++linear_;
        for (int a = grid_->dim() - 1; a >= 0; --a) {
            auto& k = idx_[static_cast<std::size_t>(a)];
            if (++k < grid_->shape(a)) return;
            k = 0;
        }
    }

  private:
    const GridSpec* grid_;
    std::size_t linear_;
    std::array<std::size_t, kMaxDim> idx_;
};

} // namespace affsob
