#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "affsob/field/scalar_field.hpp"

namespace affsob {

namespace detail {

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

template <class Seq, class Fmt>
std::string join(const Seq& xs, Fmt&& fmt) {
    std::string s;
    bool first = true;
    for (const auto& x : xs) {
        if (!first) s += ',';
        s += fmt(x);
        first = false;
    }
    return s;
}

inline void put_le(std::ostream& os, double x) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
    unsigned char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<unsigned char>(bits >> (8 * k));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_le(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("AFLD: truncated value block");
    std::uint64_t bits = 0;
    for (int k = 0; k < 8; ++k) bits |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return std::bit_cast<double>(bits);
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw IoError("AFLD: malformed number '" + item + "'");
        out.push_back(v);
    }
    return out;
}

} // namespace detail

/// Header line of the AFLD format (without the trailing newline).
inline std::string afld_header(const ScalarField& u) {
    const GridSpec& g = u.grid();
    std::vector<double> h(g.spacing().begin(), g.spacing().end()), o(g.origin().begin(), g.origin().end());
    return "AFLD v1 N=" + std::to_string(g.dim()) +
           " shape=" + detail::join(g.shape_vector(), [](std::size_t s) { return std::to_string(s); }) +
           " spacing=" + detail::join(h, detail::format_g17) + " origin=" + detail::join(o, detail::format_g17) +
           " masked=" + (u.masked() ? "1" : "0");
}

/// Header line, then node values as little-endian float64, then (if masked)
/// the inside flags as float64 0/1.
inline void write_afld(std::ostream& os, const ScalarField& u) {
    os << afld_header(u) << '\n';
    for (double v : u.values()) detail::put_le(os, v);
    if (u.masked())
        for (std::uint8_t f : u.mask()->inside_flags()) detail::put_le(os, f ? 1.0 : 0.0);
    if (!os) throw IoError("AFLD: write failed");
}

inline ScalarField read_afld(std::istream& is) {
    std::string header;
    if (!std::getline(is, header)) throw IoError("AFLD: missing header");
    std::stringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "AFLD" || version != "v1") throw IoError("AFLD: not an AFLD v1 stream");
    int dim = -1, masked = -1;
    std::vector<double> shape_d, spacing, origin;
    std::string tok;
    try {
        while (hs >> tok) {
            const auto eq = tok.find('=');
            if (eq == std::string::npos) throw IoError("AFLD: malformed header token '" + tok + "'");
            const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
            if (key == "N") dim = std::stoi(val);
            else if (key == "shape") shape_d = detail::parse_list(val);
            else if (key == "spacing") spacing = detail::parse_list(val);
            else if (key == "origin") origin = detail::parse_list(val);
            else if (key == "masked") masked = std::stoi(val);
            else throw IoError("AFLD: unknown header key '" + key + "'");
        }
    } catch (const std::logic_error& e) {
        throw IoError(std::string("AFLD: malformed header: ") + e.what());
    }
    if (dim < 2 || masked < 0 || masked > 1 || shape_d.size() != static_cast<std::size_t>(dim))
        throw IoError("AFLD: incomplete header");
    std::vector<std::size_t> shape;
    for (double s : shape_d) shape.push_back(static_cast<std::size_t>(s));
    GridSpec grid;
    try {
        grid = GridSpec(shape, spacing, origin);
    } catch (const InvalidArgument& e) {
        throw IoError(std::string("AFLD: invalid grid: ") + e.what());
    }
    std::vector<double> values(grid.node_count());
    for (double& v : values) v = detail::get_le(is);
    MaskPtr mask;
    if (masked) {
        std::vector<std::uint8_t> flags(grid.node_count());
        for (auto& f : flags) f = detail::get_le(is) != 0.0 ? 1 : 0;
        mask = share(DomainMask(grid, std::move(flags)));
    }
    return ScalarField(grid, std::move(values), std::move(mask));
}

inline void save_afld(const std::filesystem::path& path, const ScalarField& u) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    write_afld(os, u);
}

inline ScalarField load_afld(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open " + path.string());
    return read_afld(is);
}

/// CSV of the axis-aligned slice through node `fixed` (one index per axis; the
/// axes listed in `free_axes` vary). Columns: coordinates of the free axes, value.
inline void write_csv_slice(std::ostream& os, const ScalarField& u, std::array<std::size_t, kMaxDim> fixed,
                            std::vector<int> free_axes) {
    const GridSpec& g = u.grid();
    detail::require(!free_axes.empty() && free_axes.size() <= 2, "write_csv_slice: one or two free axes");
    for (int a = 0; a < g.dim(); ++a)
        detail::require(fixed[static_cast<std::size_t>(a)] < g.shape(a), "write_csv_slice: index out of range");
    const char* names[] = {"x1", "x2", "x3", "x4"};
    for (int a : free_axes) os << names[a] << ',';
    os << "value\n";
    const int a0 = free_axes[0];
    const int a1 = free_axes.size() > 1 ? free_axes[1] : -1;
    const std::size_t n1 = a1 >= 0 ? g.shape(a1) : 1;
    for (std::size_t i = 0; i < g.shape(a0); ++i)
        for (std::size_t k = 0; k < n1; ++k) {
            auto idx = fixed;
            idx[static_cast<std::size_t>(a0)] = i;
            if (a1 >= 0) idx[static_cast<std::size_t>(a1)] = k;
            const SmallVector x = g.position(idx);
            os << detail::format_g17(x[a0]) << ',';
            if (a1 >= 0) os << detail::format_g17(x[a1]) << ',';
            os << detail::format_g17(u[g.linear_index(idx)]) << '\n';
        }
}

} // namespace affsob
