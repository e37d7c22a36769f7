#pragma once

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"

namespace affsob::cli {

struct RunOptions {
    std::filesystem::path base; ///< directory of the config file, for relative paths
    std::uint64_t seed = 1;
    bool emit_fields = false;
};

struct Outcome {
    json report;
    std::vector<std::pair<std::string, std::string>> text_files; ///< name, content
    std::vector<std::pair<std::string, ScalarField>> fields;      ///< stored under fields/<name>.afld
    int status = 0;
};

inline json gram_json(const GramMatrix& a) {
    return {{"matrix", from_matrix(a.matrix())}, {"det", a.det()}, {"trace", a.trace()}, {"degenerate", a.degenerate()}};
}

inline json grid_json(const GridSpec& g) {
    std::vector<double> h(g.spacing().begin(), g.spacing().end()), o(g.origin().begin(), g.origin().end());
    return {{"shape", g.shape_vector()}, {"spacing", h}, {"origin", o}};
}

inline std::string trace_csv(const std::vector<TraceEntry>& trace) {
    std::string s = "iter,residual_norm,energy\n";
    for (const auto& t : trace)
        s += std::to_string(t.iter) + ',' + detail::format_g17(t.residual_norm) + ',' + detail::format_g17(t.energy) + '\n';
    return s;
}

inline json solve_json(const SolveReport& r) {
    json starts = json::array();
    for (const auto& s : r.starts)
        starts.push_back({{"seed", s.seed}, {"objective", s.objective}, {"iterations", s.iterations}, {"converged", s.converged},
                          {"restarts", s.restarts}});
    json j = {{"problem", r.problem},
              {"objective", r.objective},
              {"converged", r.converged},
              {"monotone", r.monotone},
              {"iterations", r.trace.empty() ? 0 : r.trace.back().iter},
              {"pde_residual", r.pde_residual},
              {"pre_rescale_residual", r.pre_rescale_residual},
              {"lagrange_multiplier", r.lagrange_multiplier},
              {"lambda_positive", r.lambda_positive},
              {"rescale_factor", r.rescale_factor},
              {"objective_negative", r.objective_negative},
              {"degenerate_objective", r.degenerate_objective},
              {"regularized_steps", r.regularized_steps},
              {"gram", gram_json(r.gram)},
              {"starts", starts}};
    if (r.truncation.performed)
        j["truncation"] = {{"enlarged_objective", r.truncation.enlarged_objective},
                           {"relative_change", r.truncation.relative_change},
                           {"sensitive", r.truncation.sensitive}};
    if (r.minimizer.size() > 0) {
        j["grid"] = grid_json(r.minimizer.grid());
        j["minimizer_max"] = r.minimizer.max_abs();
    }
    return j;
}

inline Outcome solver_outcome(const SolveReport& r, const RunOptions& opt, int status) {
    Outcome o;
    o.report = solve_json(r);
    o.text_files.emplace_back("trace.csv", trace_csv(r.trace));
    if (opt.emit_fields && r.minimizer.size() > 0) {
        o.fields.emplace_back("minimizer", r.minimizer);
        if (r.rescaled.size() > 0 && r.problem != "poisson") o.fields.emplace_back("rescaled", r.rescaled);
    }
    o.status = status;
    return o;
}

/// Runs a solver, turning non-convergence into status 2 with the partial report.
inline Outcome run_solver(const std::function<SolveReport()>& solve, const RunOptions& opt) {
    try {
        return solver_outcome(solve(), opt, 0);
    } catch (const SolverConvergenceError& e) {
        Outcome o = solver_outcome(e.report(), opt, 2);
        o.report["error"] = e.what();
        return o;
    }
}

inline std::vector<std::pair<std::string, ScalarField>> parse_field_list(const json& cfg, const RunOptions& opt) {
    std::vector<std::pair<std::string, ScalarField>> out;
    const json& fields = field_of(cfg, "fields");
    need(fields.is_array() && !fields.empty(), "'fields' must be a nonempty array");
    for (std::size_t i = 0; i < fields.size(); ++i) {
        const json& f = fields[i];
        const std::string id = f.value("id", "field" + std::to_string(i));
        out.emplace_back(id, parse_field(f, nullptr, opt.base));
    }
    return out;
}

inline Outcome cmd_energy(const json& cfg, const RunOptions& opt) {
    Outcome o;
    std::string csv = energy_csv_header() + '\n';
    json rows = json::array();
    for (const auto& [id, u] : parse_field_list(cfg, opt)) {
        const GramMatrix a = gram_matrix(u);
        const EnergyRow row = energy_row(id, u);
        csv += energy_csv_line(row) + '\n';
        rows.push_back({{"field_id", id},
                        {"N", row.dim},
                        {"h", row.h},
                        {"E2", row.e2},
                        {"J2", row.j2},
                        {"grad_norm_sq", row.grad_norm_sq},
                        {"det_A", row.det_a},
                        {"degenerate", row.degenerate},
                        {"gram", from_matrix(a.matrix())}});
    }
    o.report = {{"fields", rows}};
    o.text_files.emplace_back("energy.csv", csv);
    return o;
}

inline Outcome cmd_j2_check(const json& cfg, const RunOptions& opt) {
    Outcome o;
    json rows = json::array();
    double worst = 0.0;
    for (const auto& [id, u] : parse_field_list(cfg, opt)) {
        const GramMatrix a = gram_matrix(u);
        const int dirs = cfg.value("directions", default_sphere_directions(u.dim()));
        json row = {{"field_id", id}, {"degenerate", a.degenerate()}};
        if (!a.degenerate()) {
            const double closed = affine_sobolev_j2(a).value;
            const double sphere = j2_by_sphere_integral(a, dirs);
            const double rel = std::abs(sphere - closed) / closed;
            worst = std::max(worst, rel);
            row["closed_form"] = closed;
            row["sphere_integral"] = sphere;
            row["directions"] = dirs;
            row["relative_difference"] = rel;
        }
        rows.push_back(row);
    }
    o.report = {{"fields", rows}, {"max_relative_difference", worst}, {"agree_1e-3", worst <= 1e-3}};
    return o;
}

inline Outcome cmd_invariance(const json& cfg, const RunOptions& opt) {
    Outcome o;
    const int samples = cfg.value("samples", 200);
    const double cap = cfg.value("cond_cap", 100.0);
    need(samples >= 1 && cap >= 1.0, "samples must be positive and cond_cap at least 1");
    json rows = json::array();
    for (const auto& [id, u] : parse_field_list(cfg, opt)) {
        const SampledMinimum s = energy_via_sampled_min(u, samples, opt.seed, cap);
        rows.push_back({{"field_id", id},
                        {"E2", s.energy},
                        {"at_normalizer", s.at_normalizer},
                        {"sampled_min", s.sampled_min},
                        {"identity_value", s.identity_value},
                        {"samples", s.samples},
                        {"normalizer_below_samples", s.at_normalizer <= s.sampled_min * (1.0 + 1e-9)}});
    }
    o.report = {{"fields", rows}};
    return o;
}

inline Outcome cmd_poisson(const json& cfg, const RunOptions& opt) {
    const GridSpec g = parse_grid(field_of(cfg, "grid"));
    const MaskPtr mask = parse_mask(field_of(cfg, "mask"), g, opt.base);
    const ScalarField f = parse_field(field_of(cfg, "f"), &g, opt.base);
    need(f.grid() == g, "f uses a different grid");
    const SolverConfig sc = parse_solver(cfg, opt.seed);
    return run_solver([&] { return solve_affine_poisson(f, mask, sc); }, opt);
}

inline Outcome cmd_ground_state(const json& cfg, const RunOptions& opt) {
    const GridSpec g = parse_grid(field_of(cfg, "grid"));
    const MaskPtr mask = parse_mask(field_of(cfg, "mask"), g, opt.base);
    const SolverConfig sc = parse_solver(cfg, opt.seed);
    try {
        sc.validate_exponent(g.dim());
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    Outcome o = run_solver([&] { return ground_state(sc.p, mask, sc); }, opt);
    if (cfg.value("compare_classical", false) && o.status == 0) {
        SolverConfig c2 = sc;
        c2.classical = true;
        const SolveReport rc = ground_state(sc.p, mask, c2);
        o.report["classical_objective"] = rc.objective;
        o.report["affine_below_classical"] = o.report["objective"].get<double>() <= rc.objective + 1e-6;
    }
    return o;
}

inline Outcome cmd_penalty(const json& cfg, const RunOptions& opt) {
    const GridSpec g = parse_grid(field_of(cfg, "grid"));
    const ScalarField v = parse_potential(field_of(cfg, "V"), g, opt.base);
    const SolverConfig sc = parse_solver(cfg, opt.seed);
    try {
        sc.validate_exponent(g.dim());
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return run_solver([&] { return penalty_ground_state(v, sc.p, sc); }, opt);
}

inline Outcome cmd_critical_check(const json& cfg, const RunOptions&) {
    Outcome o;
    const int n = cfg.value("N", 3);
    std::vector<SmallMatrix> ts;
    for (const auto& t : field_of(cfg, "transforms")) ts.push_back(to_matrix(t, n));
    const BubbleReport r = critical_bubble_check(n, ts, cfg.value("cutoff", 8.0), cfg.value("h", 0.125), cfg.value("tolerance", 0.02));
    json cases = json::array();
    for (const auto& c : r.cases)
        cases.push_back({{"transform", from_matrix(c.transform)},
                         {"affine_quotient", c.affine_quotient},
                         {"gradient_quotient", c.gradient_quotient},
                         {"orthogonal", c.orthogonal},
                         {"nodes", c.nodes}});
    o.report = {{"N", r.dim},
                {"cutoff", r.cutoff},
                {"h", r.spacing},
                {"sobolev_constant", r.sobolev_constant},
                {"identity_quotient", r.identity_quotient},
                {"affine_spread", r.affine_spread},
                {"affine_constant", r.affine_constant},
                {"gradient_exceeds", r.gradient_exceeds},
                {"cases", cases}};
    return o;
}

inline Outcome cmd_profiles(const json& cfg, const RunOptions& opt) {
    Outcome o;
    std::vector<ScalarField> fields;
    for (auto& [id, u] : parse_field_list(cfg, opt)) fields.push_back(std::move(u));
    if (cfg.value("normalize", true)) {
        std::vector<ScalarField> norm;
        for (auto& e : normalize_sequence(fields)) norm.push_back(std::move(e.field));
        fields = std::move(norm);
    }
    ProfileOptions po;
    po.p = cfg.value("p", 0.0);
    po.max_profiles = cfg.value("max_profiles", po.max_profiles);
    po.threshold = cfg.value("threshold", po.threshold);
    po.tail = cfg.value("tail", po.tail);
    po.j_min = cfg.value("j_min", po.j_min);
    po.j_max = cfg.value("j_max", po.j_max);
    po.window = cfg.value("window", po.window);
    po.drop = cfg.value("drop", po.drop);
    po.profile_halfwidth = cfg.value("profile_halfwidth", po.profile_halfwidth);
    const ProfileExtraction ex = extract_profiles(fields, po);
    json items = json::array();
    for (const auto& it : ex.items) {
        json shifts = json::array();
        for (const auto& y : it.shifts) shifts.push_back(from_vector(y));
        items.push_back({{"index", it.index},
                         {"mass", it.mass},
                         {"scale_class", to_string(it.scale_class)},
                         {"shifts", shifts},
                         {"scales", it.scales},
                         {"grad_norm_sq", it.grad_norm_sq}});
        if (opt.emit_fields) o.fields.emplace_back("profile" + std::to_string(it.index), it.profile);
    }
    o.report = {{"items", items},
                {"residual_mass", ex.residual_mass},
                {"total_mass", ex.total_mass},
                {"tail_start", ex.tail_start},
                {"residual_history", ex.residual_history}};
    return o;
}

/// Log-strip region {|x̄| < 1/(1 + log|x₁|)} where 1 + log|x₁| > 0.
inline bool in_log_strip(const SmallVector& x) {
    const double a = std::abs(x[0]);
    if (a <= 0.0) return false;
    const double d = 1.0 + std::log(a);
    if (d <= 0.0) return false;
    double r2 = 0.0;
    for (int i = 1; i < x.size(); ++i) r2 += x[i] * x[i];
    return std::sqrt(r2) * d < 1.0;
}

inline Outcome cmd_liminf(const json& cfg, const RunOptions& opt) {
    Outcome o;
    const json& region = field_of(cfg, "region");
    const std::string kind = region.value("kind", "mask");
    const std::size_t samples = cfg.value("samples", std::size_t{100000});
    std::vector<std::size_t> prefixes = cfg.value("prefixes", std::vector<std::size_t>{});
    json rows = json::array();
    auto emit = [&](const LiminfEstimate& e) {
        rows.push_back({{"prefix", e.prefix},
                        {"estimate", e.estimate},
                        {"standard_error", e.standard_error},
                        {"window_lo", from_vector(e.window.lo)},
                        {"window_hi", from_vector(e.window.hi)},
                        {"window_volume", e.window_volume},
                        {"hits", e.hits},
                        {"samples", e.samples}});
    };
    if (kind == "log_strip") {
        const int n = region.value("N", 2);
        const std::vector<AffineMap> maps = parse_maps(field_of(cfg, "maps"), n);
        const json& w = field_of(cfg, "window");
        const Box window{to_vector(field_of(w, "lo"), n, 0.0), to_vector(field_of(w, "hi"), n, 0.0)};
        if (prefixes.empty()) prefixes.push_back(maps.size());
        for (std::size_t p : prefixes)
            emit(liminf_measure_estimate(in_log_strip, std::nullopt, maps, p, samples, window, opt.seed));
    } else {
        const GridSpec g = parse_grid(field_of(region, "grid"));
        const MaskPtr mask = parse_mask(field_of(region, "mask"), g, opt.base);
        const std::vector<AffineMap> maps = parse_maps(field_of(cfg, "maps"), g.dim());
        if (prefixes.empty()) prefixes.push_back(maps.size());
        for (std::size_t p : prefixes) emit(liminf_measure_estimate(*mask, maps, p, samples, opt.seed));
        o.report["mask_volume"] = mask->volume();
    }
    o.report["estimates"] = rows;
    return o;
}

using Command = Outcome (*)(const json&, const RunOptions&);

inline const std::map<std::string, Command>& commands() {
    static const std::map<std::string, Command> table = {
        {"energy", cmd_energy},           {"j2-check", cmd_j2_check},     {"invariance", cmd_invariance},
        {"poisson", cmd_poisson},         {"ground-state", cmd_ground_state}, {"penalty", cmd_penalty},
        {"critical-check", cmd_critical_check}, {"profiles", cmd_profiles}, {"liminf", cmd_liminf},
    };
    return table;
}

} // namespace affsob::cli
