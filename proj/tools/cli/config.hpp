#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "affsob/affsob.hpp"
#include "json.hpp"

namespace affsob::cli {

using json = nlohmann::json;

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline void need(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

inline const json& field_of(const json& j, const char* key) {
    need(j.is_object() && j.contains(key), std::string("missing key '") + key + "'");
    return j.at(key);
}

template <class T>
T value_or(const json& j, const char* key, T fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

inline SmallVector to_vector(const json& j) {
    need(j.is_array() && !j.empty() && j.size() <= static_cast<std::size_t>(kMaxDim), "expected a numeric array of length 1..4");
    SmallVector v(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j[i].get<double>();
    return v;
}

inline SmallVector to_vector(const json& j, int n, double fill) {
    if (j.is_number()) return SmallVector(n, j.get<double>());
    if (j.is_null()) return SmallVector(n, fill);
    SmallVector v = to_vector(j);
    need(v.size() == n, "vector length differs from the dimension");
    return v;
}

inline SmallMatrix to_matrix(const json& j, int n) {
    need(j.is_array() && j.size() == static_cast<std::size_t>(n), "matrix must have N rows");
    SmallMatrix m(n);
    for (int r = 0; r < n; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        need(row.is_array() && row.size() == static_cast<std::size_t>(n), "matrix rows must have N entries");
        for (int c = 0; c < n; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

inline json from_matrix(const SmallMatrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.size(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.size(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

inline json from_vector(const SmallVector& v) {
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

/// {"shape": [n1, ...], "spacing": h | [h1, ...], "origin": [...]}; shape counts
/// nodes per axis and the origin defaults to the centered placement.
inline GridSpec parse_grid(const json& j) {
    const json& shape = field_of(j, "shape");
    need(shape.is_array() && shape.size() >= 2 && shape.size() <= static_cast<std::size_t>(kMaxDim),
         "grid.shape must list 2 to 4 node counts");
    const int n = static_cast<int>(shape.size());
    std::vector<std::size_t> s;
    for (const auto& x : shape) {
        need(x.is_number_integer() && x.get<long>() >= 3, "grid.shape entries must be integers >= 3");
        s.push_back(x.get<std::size_t>());
    }
    const SmallVector h = to_vector(field_of(j, "spacing"), n, 0.0);
    SmallVector o(n);
    if (j.contains("origin")) {
        o = to_vector(j.at("origin"), n, 0.0);
    } else {
        for (int a = 0; a < n; ++a) o[a] = -0.5 * static_cast<double>(s[static_cast<std::size_t>(a)] - 1) * h[a];
    }
    std::vector<double> hv(h.begin(), h.end()), ov(o.begin(), o.end());
    return GridSpec(s, hv, ov);
}

inline ScalarField load_field_file(const std::filesystem::path& base, const std::string& path) {
    const std::filesystem::path p = std::filesystem::path(path).is_absolute() ? std::filesystem::path(path) : base / path;
    return load_afld(p);
}

/// {"kind": "box", "lo", "hi"} | {"kind": "ball", "center", "radius"} | {"kind": "full"} | {"kind": "file", "path"}.
inline MaskPtr parse_mask(const json& j, const GridSpec& g, const std::filesystem::path& base) {
    const std::string kind = field_of(j, "kind").get<std::string>();
    const int n = g.dim();
    if (kind == "box") return share(DomainMask::box(g, Box{to_vector(field_of(j, "lo"), n, 0.0), to_vector(field_of(j, "hi"), n, 0.0)}));
    if (kind == "ball")
        return share(DomainMask::ball(g, to_vector(j.value("center", json()), n, 0.0), field_of(j, "radius").get<double>()));
    if (kind == "full") return share(DomainMask::full(g));
    if (kind == "file") {
        const ScalarField f = load_field_file(base, field_of(j, "path").get<std::string>());
        need(f.masked(), "mask file carries no mask");
        need(f.grid() == g, "mask file grid differs from the problem grid");
        return f.mask();
    }
    throw ConfigError("unknown mask kind '" + kind + "'");
}

/// Analytic or stored scalar field. Kinds: file, const, gaussian
/// (a·exp(−(x−c)ᵀQ(x−c)/2)), bump (a·(1 − |x−c|²/r²)₊^k), radial
/// (Σ_i c_i |x|^{2i}), bubble ((1 + |x|²)^{−(N−2)/2}).
inline ScalarField parse_field(const json& j, const GridSpec* default_grid, const std::filesystem::path& base) {
    const std::string kind = field_of(j, "kind").get<std::string>();
    if (kind == "file") return load_field_file(base, field_of(j, "path").get<std::string>());
    need(j.contains("grid") || default_grid != nullptr, "field needs a grid");
    const GridSpec g = j.contains("grid") ? parse_grid(j.at("grid")) : *default_grid;
    const int n = g.dim();
    const double amp = j.value("amplitude", 1.0);
    const SmallVector c = to_vector(j.value("center", json()), n, 0.0);
    if (kind == "const") {
        const double v = field_of(j, "value").get<double>();
        return ScalarField::sample(g, [&](const SmallVector&) { return v; });
    }
    if (kind == "gaussian") {
        const SmallMatrix q = j.contains("matrix") ? to_matrix(j.at("matrix"), n) : SmallMatrix::identity(n) * j.value("alpha", 1.0);
        return ScalarField::sample(g, [&](const SmallVector& x) {
            const SmallVector d = x - c;
            return amp * std::exp(-0.5 * d.dot(q * d));
        });
    }
    if (kind == "bump") {
        const double r = j.value("radius", 1.0);
        const double k = j.value("power", 4.0);
        need(r > 0.0, "bump radius must be positive");
        return ScalarField::sample(g, [&](const SmallVector& x) {
            const SmallVector d = x - c;
            const double t = 1.0 - d.dot(d) / (r * r);
            return t > 0.0 ? amp * std::pow(t, k) : 0.0;
        });
    }
    if (kind == "radial") {
        const auto coef = field_of(j, "coefficients").get<std::vector<double>>();
        return ScalarField::sample(g, [&](const SmallVector& x) {
            const SmallVector d = x - c;
            double s = 0.0, pw = 1.0;
            for (double ci : coef) {
                s += ci * pw;
                pw *= d.dot(d);
            }
            return s;
        });
    }
    if (kind == "bubble") {
        need(n >= 3, "bubble fields need N >= 3");
        return ScalarField::sample(g, [&](const SmallVector& x) {
            const SmallVector d = x - c;
            return amp * std::pow(1.0 + d.dot(d), -0.5 * (n - 2.0));
        });
    }
    throw ConfigError("unknown field kind '" + kind + "'");
}

/// Potential: {"kind": "const", "value"} | {"kind": "well", "depth", "width", "center"}
/// (1 − depth·exp(−|x−c|²/width²)) | {"kind": "file", "path"}.
inline ScalarField parse_potential(const json& j, const GridSpec& g, const std::filesystem::path& base) {
    const std::string kind = field_of(j, "kind").get<std::string>();
    if (kind == "well") {
        const double depth = field_of(j, "depth").get<double>();
        const double width = j.value("width", 1.0);
        need(width > 0.0, "well width must be positive");
        const SmallVector c = to_vector(j.value("center", json()), g.dim(), 0.0);
        return ScalarField::sample(g, [&](const SmallVector& x) {
            const SmallVector d = x - c;
            return 1.0 - depth * std::exp(-d.dot(d) / (width * width));
        });
    }
    return parse_field(j, &g, base);
}

inline SolverConfig parse_solver(const json& j, std::uint64_t seed) {
    SolverConfig c;
    c.damping = j.value("damping", c.damping);
    c.max_outer = j.value("max_outer", c.max_outer);
    c.outer_tol = j.value("outer_tol", c.outer_tol);
    c.inner_tol = j.value("inner_tol", c.inner_tol);
    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        c.outer_tol = t.value("outer", c.outer_tol);
        c.inner_tol = t.value("inner", c.inner_tol);
    }
    c.inner_max_iter = j.value("inner_max_iter", c.inner_max_iter);
    c.p = j.value("p", c.p);
    c.starts = j.value("starts", j.value("seeds", c.starts));
    c.positivity_projection = j.value("positivity_projection", c.positivity_projection);
    c.box_halfwidth = j.value("box_halfwidth", c.box_halfwidth);
    c.regularization = j.value("regularization", c.regularization);
    c.classical = j.value("classical", c.classical);
    c.check_truncation = j.value("check_truncation", c.check_truncation);
    c.seed = seed;
    try {
        c.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline std::vector<AffineMap> parse_maps(const json& j, int n) {
    std::vector<AffineMap> maps;
    if (j.is_array()) {
        for (const auto& m : j)
            maps.emplace_back(to_matrix(field_of(m, "matrix"), n), to_vector(m.value("translation", json()), n, 0.0));
        return maps;
    }
    const std::string kind = field_of(j, "kind").get<std::string>();
    const int count = field_of(j, "count").get<int>();
    need(count >= 1, "map count must be positive");
    if (kind == "translations") {
        const SmallVector step = to_vector(field_of(j, "step"), n, 0.0);
        for (int k = 0; k < count; ++k) maps.push_back(AffineMap::translation(step * static_cast<double>(k)));
        return maps;
    }
    if (kind == "diagonal_shears") {
        for (int k = 1; k <= count; ++k) {
            SmallMatrix d = SmallMatrix::identity(n);
            d(0, 0) = k;
            for (int a = 1; a < n; ++a) d(a, a) = std::pow(static_cast<double>(k), -1.0 / (n - 1));
            maps.emplace_back(d);
        }
        return maps;
    }
    throw ConfigError("unknown map generator '" + kind + "'");
}

} // namespace affsob::cli
