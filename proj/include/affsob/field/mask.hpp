#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "affsob/field/grid.hpp"

namespace affsob {

/// Rasterised domain on a grid. A node is *free* when it is inside and all of
/// its 2N axis neighbours exist and are inside; these carry the unknowns of
/// Dirichlet problems. Inside nodes that are not free form the boundary layer,
/// where fields are pinned to zero.
class DomainMask {
  public:
    DomainMask(GridSpec grid, std::vector<std::uint8_t> inside)
        : grid_(std::move(grid)), inside_(std::move(inside)) {
        detail::require(inside_.size() == grid_.node_count(), "DomainMask: flag count does not match the grid");
        classify();
    }

    static DomainMask full(const GridSpec& grid) {
        return DomainMask(grid, std::vector<std::uint8_t>(grid.node_count(), 1));
    }

    template <class Pred>
    static DomainMask from_predicate(const GridSpec& grid, Pred&& inside_at) {
        std::vector<std::uint8_t> flags(grid.node_count());
        for (std::size_t i = 0; i < flags.size(); ++i) flags[i] = inside_at(grid.position(i)) ? 1 : 0;
        return DomainMask(grid, std::move(flags));
    }

    static DomainMask box(const GridSpec& grid, const Box& b) {
        const double slack = 1e-9 * grid.min_spacing();
        return from_predicate(grid, [&](const SmallVector& x) {
            for (int a = 0; a < x.size(); ++a)
                if (x[a] < b.lo[a] - slack || x[a] > b.hi[a] + slack) return false;
            return true;
        });
    }

    static DomainMask ball(const GridSpec& grid, const SmallVector& center, double radius) {
        const double r2 = radius * radius * (1.0 + 1e-12);
        return from_predicate(grid, [&](const SmallVector& x) {
            const SmallVector d = x - center;
            return d.dot(d) <= r2;
        });
    }

    /// Image T(Ω₀) + y of a reference region given by a predicate in reference
    /// coordinates: node x is inside when ref(T⁻¹(x − y)) holds.
    template <class Pred>
    static DomainMask mapped(const GridSpec& grid, const SmallMatrix& t, const SmallVector& y, Pred&& ref) {
        const SmallMatrix ti = inverse(t);
        return from_predicate(grid, [&](const SmallVector& x) { return ref(ti * (x - y)); });
    }

    const GridSpec& grid() const noexcept { return grid_; }
    bool inside(std::size_t i) const noexcept { return inside_[i] != 0; }
    bool is_free(std::size_t i) const noexcept { return free_[i] != 0; }
    bool is_boundary(std::size_t i) const noexcept { return inside_[i] != 0 && free_[i] == 0; }
    std::span<const std::uint8_t> inside_flags() const noexcept { return inside_; }
    std::span<const std::uint8_t> free_flags() const noexcept { return free_; }
    std::span<const std::size_t> free_nodes() const noexcept { return free_nodes_; }
    std::span<const std::size_t> boundary_nodes() const noexcept { return boundary_nodes_; }
    std::size_t inside_count() const noexcept { return inside_count_; }

    /// Rasterised measure: inside node count times the cell volume.
    double volume() const noexcept { return static_cast<double>(inside_count_) * grid_.cell_volume(); }

    /// True when no inside node lies on the outer layer of the grid.
    bool bounded() const noexcept { return bounded_; }

    /// Nearest-node membership test for an arbitrary point; false outside the grid.
    bool contains(const SmallVector& x) const noexcept {
        std::array<std::size_t, kMaxDim> idx{};
        for (int a = 0; a < grid_.dim(); ++a) {
            const double s = std::round((x[a] - grid_.origin(a)) / grid_.spacing(a));
            if (s < 0.0 || s > static_cast<double>(grid_.shape(a) - 1)) return false;
            idx[static_cast<std::size_t>(a)] = static_cast<std::size_t>(s);
        }
        return inside_[grid_.linear_index(idx)] != 0;
    }

    /// Smallest box containing every inside node.
    Box bounding_box() const {
        Box b{SmallVector(grid_.dim(), std::numeric_limits<double>::infinity()),
              SmallVector(grid_.dim(), -std::numeric_limits<double>::infinity())};
        NodeCursor c(grid_, 0);
        for (std::size_t i = 0; i < inside_.size(); ++i, c.advance()) {
            if (!inside_[i]) continue;
            const SmallVector x = grid_.position(c.index());
            for (int a = 0; a < grid_.dim(); ++a) {
                b.lo[a] = std::min(b.lo[a], x[a]);
                b.hi[a] = std::max(b.hi[a], x[a]);
            }
        }
        return b;
    }

  private:
    void classify() {
        const std::size_t n = grid_.node_count();
        free_.assign(n, 0);
        free_nodes_.clear();
        boundary_nodes_.clear();
        inside_count_ = 0;
        bounded_ = true;
        NodeCursor c(grid_, 0);
        for (std::size_t i = 0; i < n; ++i, c.advance()) {
            if (!inside_[i]) continue;
            ++inside_count_;
            bool free = true;
            for (int a = 0; a < grid_.dim(); ++a) {
                if (c.on_edge(a)) {
                    free = false;
                    bounded_ = false;
                    break;
                }
                const std::size_t s = grid_.stride(a);
                if (!inside_[i - s] || !inside_[i + s]) free = false;
            }
            free_[i] = free ? 1 : 0;
            (free ? free_nodes_ : boundary_nodes_).push_back(i);
        }
        detail::require(!free_nodes_.empty(), "DomainMask: the mask has no interior node");
    }

    GridSpec grid_;
    std::vector<std::uint8_t> inside_;
    std::vector<std::uint8_t> free_;
    std::vector<std::size_t> free_nodes_;
    std::vector<std::size_t> boundary_nodes_;
    std::size_t inside_count_ = 0;
    bool bounded_ = true;
};

using MaskPtr = std::shared_ptr<const DomainMask>;

inline MaskPtr share(DomainMask m) { return std::make_shared<const DomainMask>(std::move(m)); }

} // namespace affsob
