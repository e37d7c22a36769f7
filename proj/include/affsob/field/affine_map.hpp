#pragma once

#include <cmath>

#include "affsob/core/error.hpp"
#include "affsob/core/small_matrix.hpp"

namespace affsob {

/// x ↦ T x + y with invertible T.
class AffineMap {
  public:
    AffineMap() = default;

    explicit AffineMap(SmallMatrix matrix)
        : AffineMap(matrix, SmallVector(matrix.size(), 0.0)) {}

    AffineMap(SmallMatrix matrix, SmallVector translation)
        : matrix_(std::move(matrix)), translation_(std::move(translation)) {
        detail::require(matrix_.size() == translation_.size(), "AffineMap: matrix and translation sizes differ");
        det_ = determinant(matrix_);
        detail::require(std::isfinite(det_) && std::abs(det_) > 1e-300, "AffineMap: matrix is not invertible");
        inverse_ = inverse(matrix_);
    }

    static AffineMap identity(int n) { return AffineMap(SmallMatrix::identity(n)); }

    static AffineMap translation(const SmallVector& y) { return AffineMap(SmallMatrix::identity(y.size()), y); }

    int dim() const noexcept { return matrix_.size(); }
    const SmallMatrix& matrix() const noexcept { return matrix_; }
    const SmallMatrix& inverse_matrix() const noexcept { return inverse_; }
    const SmallVector& translation() const noexcept { return translation_; }
    double det() const noexcept { return det_; }

    bool is_unimodular(double tol = 1e-12) const noexcept { return std::abs(det_ - 1.0) <= tol; }

    SmallVector operator()(const SmallVector& x) const { return matrix_ * x + translation_; }

    /// Preimage T⁻¹(z − y).
    SmallVector preimage(const SmallVector& z) const { return inverse_ * (z - translation_); }

    /// (this ∘ other)(x) = T(T' x + y') + y.
    AffineMap compose(const AffineMap& other) const {
        return AffineMap(matrix_ * other.matrix_, matrix_ * other.translation_ + translation_);
    }

    /// Throws PreconditionError unless |det − 1| ≤ tol.
    const AffineMap& require_unimodular(double tol = 1e-12) const {
        if (!is_unimodular(tol)) throw PreconditionError("AffineMap: determinant differs from 1");
        return *this;
    }

  private:
    SmallMatrix matrix_;
    SmallVector translation_;
    SmallMatrix inverse_;
    double det_ = 1.0;
};

using UnimodularTransform = AffineMap;

} // namespace affsob
