#pragma once

#include <vector>

#include "affsob/energy/transform.hpp"
#include "affsob/field/resample.hpp"

namespace affsob {

struct NormalizedElement {
    AffineMap transform;  ///< T_k, the normalizing transform of A[u_k]
    ScalarField field;    ///< u_k∘T_k on the adapted grid (u_k itself when degenerate)
    bool degenerate = false;
};

/// Puts every element in the SL(N) position where its Gram matrix is a
/// multiple of the identity, so that ‖∇(u_k∘T_k)‖₂² = E₂(u_k). Degenerate
/// elements are passed through unchanged and flagged.
inline std::vector<NormalizedElement> normalize_sequence(const std::vector<ScalarField>& fields) {
    std::vector<NormalizedElement> out;
    out.reserve(fields.size());
    for (const auto& u : fields) {
        const GramMatrix a = gram_matrix(u);
        if (a.degenerate()) {
            out.push_back({AffineMap::identity(u.dim()), u, true});
            continue;
        }
        const NormalizingTransform t = normalizing_transform(a);
        if (a.isotropic()) {
            out.push_back({t.composed, u.without_mask(), false});
            continue;
        }
        out.push_back({t.composed, resample(u, t.composed, adapted_grid(u.grid(), t.composed)), false});
    }
    return out;
}

} // namespace affsob
