#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>

#include "affsob/core/error.hpp"

#ifndef AFFSOB_MAX_DIM
#define AFFSOB_MAX_DIM 4
#endif

namespace affsob {

/// Largest spatial dimension supported by the fixed-capacity containers.
inline constexpr int kMaxDim = AFFSOB_MAX_DIM;
static_assert(kMaxDim >= 2, "at least two dimensions are required");

/// Real N-vector with N <= kMaxDim, stored inline.
class SmallVector {
  public:
    SmallVector() = default;

    explicit SmallVector(int n, double fill = 0.0)
        : n_(n) {
        detail::require(n >= 0 && n <= kMaxDim, "SmallVector: dimension out of range");
        std::fill_n(v_.begin(), n, fill);
    }

    SmallVector(std::initializer_list<double> init)
        : n_(static_cast<int>(init.size())) {
        detail::require(n_ <= kMaxDim, "SmallVector: too many components");
        std::copy(init.begin(), init.end(), v_.begin());
    }

    static SmallVector from(std::span<const double> values) {
        SmallVector out(static_cast<int>(values.size()));
        std::copy(values.begin(), values.end(), out.v_.begin());
        return out;
    }

    static SmallVector unit(int n, int axis) {
        SmallVector out(n);
        out[axis] = 1.0;
        return out;
    }

    int size() const noexcept { return n_; }
    double& operator[](int i) noexcept { return v_[static_cast<std::size_t>(i)]; }
    double operator[](int i) const noexcept { return v_[static_cast<std::size_t>(i)]; }
    const double* begin() const noexcept { return v_.data(); }
    const double* end() const noexcept { return v_.data() + n_; }
    double* begin() noexcept { return v_.data(); }
    double* end() noexcept { return v_.data() + n_; }
    std::span<const double> span() const noexcept { return {v_.data(), static_cast<std::size_t>(n_)}; }

    double dot(const SmallVector& o) const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += v_[i] * o.v_[i];
        return s;
    }
    double norm() const noexcept { return std::sqrt(dot(*this)); }

    SmallVector& operator+=(const SmallVector& o) noexcept {
        for (int i = 0; i < n_; ++i) v_[i] += o.v_[i];
        return *this;
    }
    SmallVector& operator-=(const SmallVector& o) noexcept {
        for (int i = 0; i < n_; ++i) v_[i] -= o.v_[i];
        return *this;
    }
    SmallVector& operator*=(double s) noexcept {
        for (int i = 0; i < n_; ++i) v_[i] *= s;
        return *this;
    }
    friend SmallVector operator+(SmallVector a, const SmallVector& b) noexcept { return a += b; }
    friend SmallVector operator-(SmallVector a, const SmallVector& b) noexcept { return a -= b; }
    friend SmallVector operator*(SmallVector a, double s) noexcept { return a *= s; }
    friend SmallVector operator*(double s, SmallVector a) noexcept { return a *= s; }

    friend bool operator==(const SmallVector& a, const SmallVector& b) noexcept {
        return a.n_ == b.n_ && std::equal(a.begin(), a.end(), b.begin());
    }

  private:
    int n_ = 0;
    std::array<double, kMaxDim> v_{};
};

/// Dense real N x N matrix with N <= kMaxDim, row-major.
class SmallMatrix {
  public:
    SmallMatrix() = default;

    explicit SmallMatrix(int n, double fill = 0.0)
        : n_(n) {
        detail::require(n >= 0 && n <= kMaxDim, "SmallMatrix: dimension out of range");
        a_.fill(0.0);
        for (int i = 0; i < n; ++i) std::fill_n(a_.begin() + i * kMaxDim, n, fill);
    }

    SmallMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : n_(static_cast<int>(rows.size())) {
        detail::require(n_ <= kMaxDim, "SmallMatrix: too many rows");
        int i = 0;
        for (const auto& r : rows) {
            detail::require(static_cast<int>(r.size()) == n_, "SmallMatrix: matrix must be square");
            int j = 0;
            for (double x : r) (*this)(i, j++) = x;
            ++i;
        }
    }

    static SmallMatrix identity(int n) {
        SmallMatrix m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static SmallMatrix diagonal(const SmallVector& d) {
        SmallMatrix m(d.size());
        for (int i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    /// Row-major construction from n*n values.
    static SmallMatrix from_row_major(int n, std::span<const double> values) {
        detail::require(values.size() == static_cast<std::size_t>(n * n), "SmallMatrix: expected n*n values");
        SmallMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = values[static_cast<std::size_t>(i * n + j)];
        return m;
    }

    int size() const noexcept { return n_; }
    double& operator()(int i, int j) noexcept { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }
    double operator()(int i, int j) const noexcept { return a_[static_cast<std::size_t>(i * kMaxDim + j)]; }

    SmallVector row(int i) const {
        SmallVector r(n_);
        for (int j = 0; j < n_; ++j) r[j] = (*this)(i, j);
        return r;
    }
    SmallVector column(int j) const {
        SmallVector c(n_);
        for (int i = 0; i < n_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    SmallMatrix transpose() const {
        SmallMatrix t(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) t(i, j) = (*this)(j, i);
        return t;
    }

    double trace() const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i) s += (*this)(i, i);
        return s;
    }

    double frobenius_norm() const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += (*this)(i, j) * (*this)(i, j);
        return std::sqrt(s);
    }

    /// Largest |a_ij - a_ji|.
    double asymmetry() const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) s = std::max(s, std::abs((*this)(i, j) - (*this)(j, i)));
        return s;
    }

    SmallMatrix& operator+=(const SmallMatrix& o) noexcept {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) += o(i, j);
        return *this;
    }
    SmallMatrix& operator-=(const SmallMatrix& o) noexcept {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) -= o(i, j);
        return *this;
    }
    SmallMatrix& operator*=(double s) noexcept {
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) (*this)(i, j) *= s;
        return *this;
    }
    friend SmallMatrix operator+(SmallMatrix a, const SmallMatrix& b) noexcept { return a += b; }
    friend SmallMatrix operator-(SmallMatrix a, const SmallMatrix& b) noexcept { return a -= b; }
    friend SmallMatrix operator*(SmallMatrix a, double s) noexcept { return a *= s; }
    friend SmallMatrix operator*(double s, SmallMatrix a) noexcept { return a *= s; }

    friend SmallMatrix operator*(const SmallMatrix& a, const SmallMatrix& b) {
        SmallMatrix c(a.n_);
        for (int i = 0; i < a.n_; ++i)
            for (int k = 0; k < a.n_; ++k) {
                const double aik = a(i, k);
                for (int j = 0; j < a.n_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend SmallVector operator*(const SmallMatrix& a, const SmallVector& x) {
        SmallVector y(a.n_);
        for (int i = 0; i < a.n_; ++i) {
            double s = 0.0;
            for (int j = 0; j < a.n_; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    /// x^T M x
    double quadratic_form(const SmallVector& x) const noexcept {
        double s = 0.0;
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) s += x[i] * (*this)(i, j) * x[j];
        return s;
    }

    friend bool operator==(const SmallMatrix& a, const SmallMatrix& b) noexcept {
        if (a.n_ != b.n_) return false;
        for (int i = 0; i < a.n_; ++i)
            for (int j = 0; j < a.n_; ++j)
                if (a(i, j) != b(i, j)) return false;
        return true;
    }

  private:
    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Determinant by Gaussian elimination with partial pivoting.
inline double determinant(const SmallMatrix& m) {
    const int n = m.size();
    SmallMatrix a = m;
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (a(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < n; ++j) std::swap(a(c, j), a(piv, j));
            det = -det;
        }
        det *= a(c, c);
        for (int r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            for (int j = c; j < n; ++j) a(r, j) -= f * a(c, j);
        }
    }
    return det;
}

/// Inverse by Gauss-Jordan elimination; throws on a numerically singular matrix.
inline SmallMatrix inverse(const SmallMatrix& m) {
    const int n = m.size();
    SmallMatrix a = m;
    SmallMatrix inv = SmallMatrix::identity(n);
    const double scale = std::max(m.frobenius_norm(), 1e-300);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
        if (std::abs(a(piv, c)) <= 1e-14 * scale) throw DegenerateError("inverse: matrix is singular");
        if (piv != c)
            for (int j = 0; j < n; ++j) {
                std::swap(a(c, j), a(piv, j));
                std::swap(inv(c, j), inv(piv, j));
            }
        const double d = a(c, c);
        for (int j = 0; j < n; ++j) {
            a(c, j) /= d;
            inv(c, j) /= d;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a(r, c);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) {
                a(r, j) -= f * a(c, j);
                inv(r, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

struct SymmetricEigen {
    SmallVector values;  ///< eigenvalues, ascending
    SmallMatrix vectors; ///< orthonormal eigenvectors as columns, det = +1
    int sweeps = 0;
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Iterates until the
/// off-diagonal Frobenius mass is at most `tol` times the total Frobenius norm.
inline SymmetricEigen jacobi_eigen(const SmallMatrix& m, double tol = 1e-13, int max_sweeps = 64) {
    const int n = m.size();
    if (m.asymmetry() > 1e-12 * std::max(1.0, m.frobenius_norm()))
        throw InvalidArgument("jacobi_eigen: matrix is not symmetric");
    SmallMatrix a = m;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) a(j, i) = a(i, j) = 0.5 * (m(i, j) + m(j, i));
    SmallMatrix v = SmallMatrix::identity(n);
    const double total = a.frobenius_norm();

    auto off_mass = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    for (; sweep < max_sweeps && total > 0.0 && off_mass() > tol * total; ++sweep) {
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    // sort ascending
    std::array<int, kMaxDim> order{};
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.begin() + n, [&](int x, int y) { return a(x, x) < a(y, y); });
    SymmetricEigen out{SmallVector(n), SmallMatrix(n), sweep};
    for (int k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    if (determinant(out.vectors) < 0.0)
        for (int i = 0; i < n; ++i) out.vectors(i, 0) = -out.vectors(i, 0);
    return out;
}

/// Orthogonal factor of a Gram-Schmidt QR factorisation, normalised to det = +1.
inline SmallMatrix orthogonal_factor(const SmallMatrix& m) {
    const int n = m.size();
    SmallMatrix q(n);
    for (int j = 0; j < n; ++j) {
        SmallVector c = m.column(j);
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k < j; ++k) {
                const SmallVector qk = q.column(k);
                c -= qk * qk.dot(c);
            }
        const double nrm = c.norm();
        if (nrm <= 1e-300) throw DegenerateError("orthogonal_factor: rank-deficient input");
        for (int i = 0; i < n; ++i) q(i, j) = c[i] / nrm;
    }
    if (determinant(q) < 0.0)
        for (int i = 0; i < n; ++i) q(i, 0) = -q(i, 0);
    return q;
}

/// Spectral condition number of a general matrix, via the eigenvalues of M^T M.
inline double condition_number(const SmallMatrix& m) {
    const auto eig = jacobi_eigen(m.transpose() * m);
    const double lo = eig.values[0], hi = eig.values[m.size() - 1];
    if (lo <= 0.0) return INFINITY;
    return std::sqrt(hi / lo);
}

} // namespace affsob
