#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "affsob/energy/gram.hpp"
#include "affsob/field/quadrature.hpp"
#include "affsob/field/resample.hpp"
#include "affsob/profiles/windowed_mass.hpp"

namespace affsob {

enum class ScaleClass { fixed, shrinking, expanding };

inline std::string to_string(ScaleClass c) {
    switch (c) {
    case ScaleClass::fixed: return "fixed";
    case ScaleClass::shrinking: return "shrinking";
    case ScaleClass::expanding: return "expanding";
    }
    return "fixed";
}

/// Fixed if every scale is equal, otherwise by the sign of last − first
/// (concentrating profiles have growing j).
inline ScaleClass classify_scales(const std::vector<int>& scales) {
    if (scales.empty() || std::all_of(scales.begin(), scales.end(), [&](int j) { return j == scales.front(); }))
        return ScaleClass::fixed;
    return scales.back() > scales.front() ? ScaleClass::shrinking
           : scales.back() < scales.front() ? ScaleClass::expanding
                                            : ScaleClass::fixed;
}

struct ProfileItem {
    int index = 0;
    ScalarField profile;             ///< w, on a cube of half-width `profile_halfwidth`
    std::vector<SmallVector> shifts; ///< y_k, one per tail element
    std::vector<int> scales;         ///< j_k, one per tail element
    double mass = 0.0;               ///< ‖w‖_p^p
    double grad_norm_sq = 0.0;       ///< ‖∇w‖₂²
    ScaleClass scale_class = ScaleClass::fixed;
};

struct ProfileOptions {
    double p = 0.0;                ///< 0 selects 2N/(N−2) (requires N ≥ 3)
    int max_profiles = 4;
    double threshold = 0.01;       ///< relative to the mean L^p mass of the tail
    int tail = 5;                  ///< K, number of trailing elements averaged
    int j_min = 1, j_max = 0;      ///< scale search range; j_min > j_max selects ±⌊log₂(max shape)/2⌋
    double window = 1.0;           ///< window side at j = 0
    double drop = 0.1;             ///< η: a finer window must keep (1 − η) of the next coarser one
    double profile_halfwidth = 1.0;
    std::size_t profile_node_cap = std::size_t{1} << 21;
};

struct ProfileExtraction {
    std::vector<ProfileItem> items;
    double total_mass = 0.0;             ///< mean ‖u_k‖_p^p over the tail
    double residual_mass = 0.0;          ///< mean ‖r_k‖_p^p over the tail after extraction
    std::vector<double> residual_history; ///< residual mass before each accepted extraction and after the last
    std::size_t tail_start = 0;
    std::vector<ScalarField> residuals;
};

namespace detail {

struct Detection {
    int scale = 0;
    SmallVector center;
    double mass = 0.0;
};

inline std::array<long, kMaxDim> window_radius(const GridSpec& g, double side) {
    std::array<long, kMaxDim> r{};
    for (int a = 0; a < g.dim(); ++a) r[static_cast<std::size_t>(a)] = static_cast<long>(std::floor(0.5 * side / g.spacing(a) + 1e-9));
    return r;
}

/// Localizes the finest concentrated window, then reads the dyadic scale off
/// the L^p-weighted radius ρ inside a window twice as large: j = round(log₂(W / (4ρ))).
inline std::optional<Detection> detect(const ScalarField& r, double p, const ProfileOptions& o, double min_mass) {
    const WindowedMass wm(r, p);
    if (wm.total() < min_mass) return std::nullopt;
    const GridSpec& g = r.grid();
    const int n = g.dim();
    double coarser = wm.total();
    std::array<long, kMaxDim> prev{};
    bool have_prev = false;
    std::optional<std::pair<int, WindowedMass::Best>> chosen;
    for (int j = o.j_min; j <= o.j_max; ++j) {
        const double side = std::ldexp(o.window, -j);
        const auto rad = window_radius(g, side);
        bool resolved = true;
        for (int a = 0; a < n; ++a) resolved = resolved && rad[static_cast<std::size_t>(a)] >= 1;
        if (!resolved) break;
        if (have_prev && rad == prev) continue;
        const auto best = wm.heaviest(rad);
        if (best.mass >= min_mass && best.mass >= (1.0 - o.drop) * coarser) chosen = std::make_pair(j, best);
        coarser = best.mass;
        prev = rad;
        have_prev = true;
    }
    if (!chosen) return std::nullopt;
    const SmallVector c = g.position(chosen->second.center);
    const auto rad = window_radius(g, 2.0 * std::ldexp(o.window, -chosen->first));
    double m0 = 0.0, m2 = 0.0;
    NodeCursor cur(g, 0);
    const auto mid = g.multi_index(chosen->second.center);
    for (std::size_t i = 0; i < r.size(); ++i, cur.advance()) {
        bool in = true;
        for (int a = 0; a < n && in; ++a)
            in = std::labs(static_cast<long>(cur[a]) - static_cast<long>(mid[static_cast<std::size_t>(a)])) <=
                 rad[static_cast<std::size_t>(a)];
        if (!in) continue;
        const double w = std::pow(std::abs(r[i]), p);
        const SmallVector d = g.position(cur.index()) - c;
        m0 += w;
        m2 += w * d.dot(d);
    }
    if (!(m0 > 0.0) || !(m2 > 0.0)) return std::nullopt;
    const double rho = std::sqrt(m2 / m0);
    Detection det;
    det.scale = static_cast<int>(std::lround(std::log2(0.25 * o.window / rho)));
    det.scale = std::clamp(det.scale, -40, 40);
    det.center = c;
    det.mass = chosen->second.mass;
    return det;
}

} // namespace detail

/// Greedy profile deflation over the last K elements: detect a concentration
/// window per element, average the recentred and rescaled pieces
/// 2^{−(N−2)j/2} r_k(2^{−j}x + y_k) into a profile w (weighted by sampling
/// density after rescaling, so coarse pieces count less), subtract its rescaled copies,
/// and repeat while the residual mass decreases and stays above the threshold.
/// Items are returned in order of decreasing mass.
inline ProfileExtraction extract_profiles(const std::vector<ScalarField>& fields, ProfileOptions o) {
    ProfileExtraction out;
    if (fields.empty()) return out;
    const int n = fields.front().dim();
    for (const auto& f : fields) detail::require(f.dim() == n, "extract_profiles: fields have different dimensions");
    if (o.p <= 0.0) {
        detail::require(n >= 3, "extract_profiles: the critical exponent needs N >= 3");
        o.p = 2.0 * n / (n - 2.0);
    }
    detail::require(o.p >= 1.0, "extract_profiles: p must be at least 1");
    detail::require(o.threshold > 0.0, "extract_profiles: threshold must be positive");
    detail::require(o.tail >= 1 && o.max_profiles >= 0, "extract_profiles: tail must be positive");
    detail::require(o.window > 0.0 && o.drop > 0.0 && o.drop < 1.0 && o.profile_halfwidth > 0.0,
                    "extract_profiles: window, drop and profile size must be positive (drop below 1)");
    if (o.j_min > o.j_max) {
        std::size_t s = 0;
        for (const auto& f : fields)
            for (int a = 0; a < n; ++a) s = std::max(s, f.grid().shape(a));
        const int j = static_cast<int>(std::floor(0.5 * std::log2(static_cast<double>(s))));
        o.j_min = -j;
        o.j_max = j;
    }

    const std::size_t k0 = fields.size() > static_cast<std::size_t>(o.tail) ? fields.size() - static_cast<std::size_t>(o.tail) : 0;
    out.tail_start = k0;
    std::vector<ScalarField> res;
    for (std::size_t k = k0; k < fields.size(); ++k) res.push_back(fields[k].without_mask());
    const auto kk = static_cast<double>(res.size());
    auto mean_mass = [&](const std::vector<ScalarField>& v) {
        double s = 0.0;
        for (const auto& f : v) s += integrate_abs_pow(f, o.p);
        return s / kk;
    };
    out.total_mass = mean_mass(res);
    double current = out.total_mass;
    out.residual_history.push_back(current);
    const double min_mass = o.threshold * out.total_mass;

    for (int item = 0; item < o.max_profiles && current >= min_mass && out.total_mass > 0.0; ++item) {
        std::vector<detail::Detection> dets;
        for (const auto& r : res) {
            auto d = detail::detect(r, o.p, o, min_mass);
            if (!d) break;
            dets.push_back(*d);
        }
        if (dets.size() != res.size()) break;

        double hw = INFINITY;
        for (std::size_t k = 0; k < res.size(); ++k)
            for (int a = 0; a < n; ++a) hw = std::min(hw, std::ldexp(res[k].grid().spacing(a), dets[k].scale));
        const double cells = std::ceil(o.profile_halfwidth / hw);
        const double cap_cells = 0.5 * (std::pow(static_cast<double>(o.profile_node_cap), 1.0 / n) - 1.0);
        const auto half_cells = static_cast<std::size_t>(std::max(2.0, std::min(cells, std::floor(cap_cells))));
        const GridSpec pg = GridSpec::centered(n, half_cells, o.profile_halfwidth / static_cast<double>(half_cells));

        std::vector<double> acc(pg.node_count(), 0.0), weight(res.size());
        double weight_sum = 0.0;
        for (std::size_t k = 0; k < res.size(); ++k) {
            double hk = INFINITY;
            for (int a = 0; a < n; ++a) hk = std::min(hk, std::ldexp(res[k].grid().spacing(a), dets[k].scale));
            weight_sum += weight[k] = std::pow(hw / hk, n);
        }
        for (std::size_t k = 0; k < res.size(); ++k) {
            const int j = dets[k].scale;
            const SmallVector y = dets[k].center * (-std::ldexp(1.0, j));
            const ScalarField piece = dyadic_rescale(res[k], -j, y, pg);
            const double c = weight[k] / weight_sum;
            for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += c * piece[i];
        }
        ScalarField w(pg, std::move(acc));
        const double mass = integrate_abs_pow(w, o.p);
        if (mass < min_mass) break;

        std::vector<ScalarField> next;
        next.reserve(res.size());
        for (std::size_t k = 0; k < res.size(); ++k)
            next.push_back(res[k].plus(dyadic_rescale(w, dets[k].scale, dets[k].center, res[k].grid()), -1.0));
        const double after = mean_mass(next);
        if (!(after < current)) break;

        ProfileItem it;
        it.profile = std::move(w);
        it.mass = mass;
        it.grad_norm_sq = gradient_norm_sq(it.profile);
        for (const auto& d : dets) {
            it.shifts.push_back(d.center);
            it.scales.push_back(d.scale);
        }
        it.scale_class = classify_scales(it.scales);
        out.items.push_back(std::move(it));
        res = std::move(next);
        current = after;
        out.residual_history.push_back(current);
    }
    std::stable_sort(out.items.begin(), out.items.end(), [](const ProfileItem& a, const ProfileItem& b) { return a.mass > b.mass; });
    for (std::size_t i = 0; i < out.items.size(); ++i) out.items[i].index = static_cast<int>(i);
    out.residual_mass = current;
    out.residuals = std::move(res);
    return out;
}

inline std::vector<ProfileItem> extract_profiles(const std::vector<ScalarField>& fields, double p, int max_profiles,
                                                 double threshold) {
    ProfileOptions o;
    o.p = p;
    o.max_profiles = max_profiles;
    o.threshold = threshold;
    return extract_profiles(fields, o).items;
}

struct MassAccount {
    std::vector<double> masses;
    double total = 0.0;
    double deficit = 0.0;
    double profile_energy = 0.0; ///< Σ ‖∇w‖₂²
    double max_energy = 0.0;     ///< max_k E₂(u_k)
    bool energy_bounded = false; ///< profile_energy ≤ (1 + energy_tol) max_energy
};

/// Brezis–Lieb style accounting 1 = Σ t_n + deficit for fields with ‖u_k‖_p = 1.
inline MassAccount brezis_lieb_masses(const std::vector<ProfileItem>& items, const std::vector<ScalarField>& fields, double p,
                                      double norm_tol = 1e-6, double energy_tol = 0.05) {
    MassAccount m;
    for (const auto& u : fields) {
        const double norm = lp_norm(u, p);
        if (std::abs(norm - 1.0) > norm_tol) throw PreconditionError("brezis_lieb_masses: input fields must satisfy ||u||_p = 1");
        m.max_energy = std::max(m.max_energy, affine_energy(gram_matrix(u)));
    }
    for (const auto& it : items) {
        m.masses.push_back(it.mass);
        m.total += it.mass;
        m.profile_energy += it.grad_norm_sq;
    }
    m.deficit = 1.0 - m.total;
    m.energy_bounded = m.profile_energy <= (1.0 + energy_tol) * m.max_energy;
    return m;
}

} // namespace affsob
