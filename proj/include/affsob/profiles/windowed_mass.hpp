#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "affsob/field/scalar_field.hpp"

namespace affsob {

/// Summed-area table of h^N |u|^p for O(2^N) cube-mass queries.
class WindowedMass {
  public:
    WindowedMass(const ScalarField& u, double p) : grid_(u.grid()) {
        const int n = grid_.dim();
        std::size_t total = 1;
        for (int a = n - 1; a >= 0; --a) {
            ext_stride_[static_cast<std::size_t>(a)] = total;
            total *= grid_.shape(a) + 1;
        }
        table_.assign(total, 0.0);
        const double w = grid_.cell_volume();
        NodeCursor c(grid_, 0);
        for (std::size_t i = 0; i < u.size(); ++i, c.advance()) {
            std::size_t e = 0;
            for (int a = 0; a < n; ++a) e += (c[a] + 1) * ext_stride_[static_cast<std::size_t>(a)];
            table_[e] = w * std::pow(std::abs(u[i]), p);
        }
        for (int a = 0; a < n; ++a) {
            const std::size_t s = ext_stride_[static_cast<std::size_t>(a)];
            const std::size_t len = grid_.shape(a) + 1;
            for (std::size_t e = 0; e < total; ++e)
                if ((e / s) % len != 0) table_[e] += table_[e - s];
        }
        total_mass_ = table_.back();
    }

    double total() const noexcept { return total_mass_; }
    const GridSpec& grid() const noexcept { return grid_; }

    /// Mass of the node block [lo_a, hi_a] (inclusive, clipped to the grid).
    double block(const std::array<long, kMaxDim>& lo, const std::array<long, kMaxDim>& hi) const {
        const int n = grid_.dim();
        std::array<std::size_t, kMaxDim> l{}, h{};
        for (int a = 0; a < n; ++a) {
            const auto ua = static_cast<std::size_t>(a);
            const long last = static_cast<long>(grid_.shape(a)) - 1;
            const long lc = std::clamp(lo[ua], 0L, last), hc = std::clamp(hi[ua], 0L, last);
            if (lc > hc) return 0.0;
            l[ua] = static_cast<std::size_t>(lc);
            h[ua] = static_cast<std::size_t>(hc) + 1;
        }
        double s = 0.0;
        for (unsigned m = 0; m < (1u << static_cast<unsigned>(n)); ++m) {
            std::size_t e = 0;
            int parity = 0;
            for (int a = 0; a < n; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                if (m & (1u << static_cast<unsigned>(a))) {
                    e += l[ua] * ext_stride_[ua];
                    ++parity;
                } else {
                    e += h[ua] * ext_stride_[ua];
                }
            }
            s += (parity % 2 ? -1.0 : 1.0) * table_[e];
        }
        return s;
    }

    struct Best {
        double mass = 0.0;
        std::size_t center = 0;
    };

    /// Heaviest cube of half-width radius[a] nodes over all node centers; ties
    /// go to the lowest linear index.
    Best heaviest(const std::array<long, kMaxDim>& radius) const {
        const int n = grid_.dim();
        Best best;
        bool have = false;
        NodeCursor c(grid_, 0);
        for (std::size_t i = 0; i < grid_.node_count(); ++i, c.advance()) {
            std::array<long, kMaxDim> lo{}, hi{};
            for (int a = 0; a < n; ++a) {
                const auto ua = static_cast<std::size_t>(a);
                lo[ua] = static_cast<long>(c[a]) - radius[ua];
                hi[ua] = static_cast<long>(c[a]) + radius[ua];
            }
            const double m = block(lo, hi);
            if (!have || m > best.mass) {
                best = {m, i};
                have = true;
            }
        }
        return best;
    }

  private:
    GridSpec grid_;
    std::array<std::size_t, kMaxDim> ext_stride_{};
    std::vector<double> table_;
    double total_mass_ = 0.0;
};

} // namespace affsob
