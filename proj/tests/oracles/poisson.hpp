#pragma once

// Plain (2N+1)-point Dirichlet Laplacian with unpreconditioned CG. Written
// against raw arrays so it shares no code with the library operators.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

struct BoxGrid {
    int dim = 2;
    std::array<std::size_t, 4> shape{};
    double h = 0.0;

    std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= shape[static_cast<std::size_t>(a)];
        return s;
    }
    std::size_t stride(int a) const {
        std::size_t s = 1;
        for (int b = dim - 1; b > a; --b) s *= shape[static_cast<std::size_t>(b)];
        return s;
    }
};

/// Solves −Δ_h u = f on nodes flagged `unknown`, u = 0 elsewhere.
inline std::vector<double> classical_poisson(const BoxGrid& g, const std::vector<std::uint8_t>& unknown,
                                             const std::vector<double>& f, double tol = 1e-13) {
    const std::size_t n = g.size();
    const double inv_h2 = 1.0 / (g.h * g.h);
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!unknown[i]) {
                y[i] = 0.0;
                continue;
            }
            double s = 2.0 * g.dim * x[i];
            for (int a = 0; a < g.dim; ++a) {
                const std::size_t st = g.stride(a);
                s -= (unknown[i - st] ? x[i - st] : 0.0) + (unknown[i + st] ? x[i + st] : 0.0);
            }
            y[i] = s * inv_h2;
        }
    };
    std::vector<double> x(n, 0.0), r(n, 0.0), p, q(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = unknown[i] ? f[i] : 0.0;
    p = r;
    auto dot = [n](const std::vector<double>& a, const std::vector<double>& b) {
        long double s = 0;
        for (std::size_t i = 0; i < n; ++i) s += static_cast<long double>(a[i]) * b[i];
        return static_cast<double>(s);
    };
    const double r0 = std::sqrt(dot(r, r));
    double rr = r0 * r0;
    for (int it = 0; it < 100000 && std::sqrt(rr) > tol * r0; ++it) {
        apply(p, q);
        const double alpha = rr / dot(p, q);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        const double rr_new = dot(r, r);
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + (rr_new / rr) * p[i];
        rr = rr_new;
    }
    return x;
}

} // namespace oracle
