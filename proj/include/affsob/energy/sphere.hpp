#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "affsob/energy/gram.hpp"

namespace affsob {

/// Equal-weight point set on S^{N−1}: equally spaced angles (N = 2), a
/// Fibonacci lattice (N = 3), or a product rule in Hopf coordinates with
/// sin²η uniform (N = 4). The size is at least `directions`.
inline std::vector<SmallVector> sphere_directions(int n, int directions) {
    std::vector<SmallVector> out;
    const double pi = std::numbers::pi;
    if (n == 2) {
        out.reserve(static_cast<std::size_t>(directions));
        for (int k = 0; k < directions; ++k) {
            const double t = 2.0 * pi * k / directions;
            out.push_back(SmallVector{std::cos(t), std::sin(t)});
        }
    } else if (n == 3) {
        out.reserve(static_cast<std::size_t>(directions));
        const double golden = pi * (3.0 - std::sqrt(5.0));
        for (int k = 0; k < directions; ++k) {
            const double z = 1.0 - (2.0 * k + 1.0) / directions;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            out.push_back(SmallVector{r * std::cos(golden * k), r * std::sin(golden * k), z});
        }
    } else if (n == 4) {
        const int m_angle = std::max(8, static_cast<int>(std::ceil(std::cbrt(2.0 * directions))));
        const int m_s = std::max(4, static_cast<int>(std::ceil(static_cast<double>(directions) / (m_angle * m_angle))));
        out.reserve(static_cast<std::size_t>(m_s * m_angle * m_angle));
        for (int i = 0; i < m_s; ++i) {
            const double s = (i + 0.5) / m_s;
            const double c1 = std::sqrt(1.0 - s), c2 = std::sqrt(s);
            for (int j = 0; j < m_angle; ++j)
                for (int k = 0; k < m_angle; ++k) {
                    const double p1 = 2.0 * pi * j / m_angle, p2 = 2.0 * pi * k / m_angle;
                    out.push_back(SmallVector{c1 * std::cos(p1), c1 * std::sin(p1), c2 * std::cos(p2), c2 * std::sin(p2)});
                }
        }
    } else {
        throw InvalidArgument("sphere_directions: supported dimensions are 2, 3 and 4");
    }
    return out;
}

inline int default_sphere_directions(int n) { return n == 2 ? 256 : n == 3 ? 20000 : 40000; }

/// (∫_{S^{N−1}} (ωᵀAω)^{−N/2} dS)^{−1/N} by equal-weight quadrature.
inline double j2_by_sphere_integral(const GramMatrix& a, int directions) {
    const int n = a.dim();
    detail::require(directions >= (n == 2 ? 50 : 200), "j2_by_sphere_integral: too few directions");
    if (a.degenerate()) throw DegenerateError("j2_by_sphere_integral: Gram matrix is degenerate");
    const auto dirs = sphere_directions(n, directions);
    double sum = 0.0;
    for (const auto& w : dirs) sum += std::pow(a.matrix().quadratic_form(w), -0.5 * n);
    const double integral = sum * sphere_area(n) / static_cast<double>(dirs.size());
    return std::pow(integral, -1.0 / n);
}

inline double j2_by_sphere_integral(const ScalarField& u, int directions) {
    return j2_by_sphere_integral(gram_matrix(u), directions);
}

} // namespace affsob
