#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "affsob/energy/gram.hpp"
#include "affsob/energy/transform.hpp"
#include "affsob/field/io.hpp"
#include "affsob/field/quadrature.hpp"
#include "affsob/field/resample.hpp"

namespace affsob {

/// ‖∇(u∘T)‖₂² with u∘T sampled on the adapted grid of T.
inline double transformed_gradient_norm_sq(const ScalarField& u, const AffineMap& t) {
    return gradient_norm_sq(resample(u, t, adapted_grid(u.grid(), t)));
}

struct SampledMinimum {
    double sampled_min = 0.0;   ///< min over random T of ‖∇(u∘T)‖₂²
    double at_normalizer = 0.0; ///< ‖∇(u∘T_u)‖₂² at the normalizing transform
    double energy = 0.0;        ///< E₂(u)
    double identity_value = 0.0;///< ‖∇u‖₂²
    std::vector<double> samples;
};

/// Compares ‖∇(u∘T)‖₂² over seeded random T ∈ SL(N) (condition number at most
/// cond_cap) with its value at the normalizing transform. Sample k uses the
/// seed derive_seed(seed, k).
inline SampledMinimum energy_via_sampled_min(const ScalarField& u, int n_samples, std::uint64_t seed,
                                             double cond_cap = 100.0) {
    detail::require(n_samples >= 1, "energy_via_sampled_min: need at least one sample");
    const GramMatrix a = gram_matrix(u);
    if (a.degenerate()) throw DegenerateError("energy_via_sampled_min: Gram matrix is degenerate");
    SampledMinimum out;
    out.energy = affine_energy(a);
    out.identity_value = a.trace();
    out.at_normalizer = transformed_gradient_norm_sq(u, normalizing_transform(a).composed);
    out.samples.resize(static_cast<std::size_t>(n_samples));
    for (int k = 0; k < n_samples; ++k) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
        const AffineMap t(random_unimodular(u.dim(), rng, cond_cap));
        out.samples[static_cast<std::size_t>(k)] = transformed_gradient_norm_sq(u, t);
    }
    out.sampled_min = *std::min_element(out.samples.begin(), out.samples.end());
    return out;
}

/// ‖u‖_{2*} / J₂(u), 2* = 2N/(N−2).
inline double sobolev_ratio(const ScalarField& u) {
    const int n = u.dim();
    detail::require(n >= 3, "sobolev_ratio: the critical exponent needs N >= 3");
    const GramMatrix a = gram_matrix(u);
    const J2Value j = affine_sobolev_j2(a);
    if (j.degenerate) throw DegenerateError("sobolev_ratio: Gram matrix is degenerate");
    return lp_norm(u, 2.0 * n / (n - 2.0)) / j.value;
}

struct EnergyRow {
    std::string field_id;
    int dim = 0;
    double h = 0.0;
    double e2 = 0.0;
    double j2 = 0.0;
    double grad_norm_sq = 0.0;
    double det_a = 0.0;
    bool degenerate = false;
};

inline EnergyRow energy_row(const std::string& id, const ScalarField& u) {
    const GramMatrix a = gram_matrix(u);
    const J2Value j = affine_sobolev_j2(a);
    return {id, u.dim(), u.grid().min_spacing(), affine_energy(a), j.value, a.trace(), a.det(), j.degenerate};
}

inline std::string energy_csv_header() { return "field_id,N,h,E2,J2,grad_norm_sq,det_A,degenerate_flag"; }

inline std::string energy_csv_line(const EnergyRow& r) {
    using detail::format_g17;
    return r.field_id + ',' + std::to_string(r.dim) + ',' + format_g17(r.h) + ',' + format_g17(r.e2) + ',' +
           format_g17(r.j2) + ',' + format_g17(r.grad_norm_sq) + ',' + format_g17(r.det_a) + ',' +
           (r.degenerate ? "1" : "0");
}

/// Row-major matrix text with 17 significant digits, rows separated by ';'.
inline std::string format_matrix(const SmallMatrix& m) {
    std::string s;
    for (int i = 0; i < m.size(); ++i) {
        if (i) s += ';';
        for (int j = 0; j < m.size(); ++j) {
            if (j) s += ',';
            s += detail::format_g17(m(i, j));
        }
    }
    return s;
}

} // namespace affsob
