#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cli/commands.hpp"

namespace fs = std::filesystem;
using affsob::cli::json;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kConvergence = 2, kConfig = 3, kIo = 4 };

void write_atomic(const fs::path& path, const std::function<void(std::ostream&)>& body) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw affsob::IoError("cannot open " + tmp.string());
        body(os);
        os.flush();
        if (!os) throw affsob::IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw affsob::IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& s) {
    write_atomic(path, [&](std::ostream& os) { os << s; });
}

void write_outputs(const fs::path& out, const std::string& command, const affsob::cli::Outcome& o, std::uint64_t seed,
                   int threads, double seconds) {
    json report = o.report;
    report["command"] = command;
    report["seed"] = seed;
    write_text(out / "report.json", report.dump(2) + "\n");
    for (const auto& [name, text] : o.text_files) write_text(out / name, text);
    for (const auto& [name, field] : o.fields)
        write_atomic(out / "fields" / (name + ".afld"), [&](std::ostream& os) { affsob::write_afld(os, field); });
    const json meta = {{"version", kVersion}, {"command", command}, {"seed", seed}, {"threads", threads}, {"wall_seconds", seconds}};
    write_text(out / "meta.json", meta.dump(2) + "\n");
}

json read_config(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw affsob::cli::ConfigError("cannot read config " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return json::parse(ss.str());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine Sobolev energies, variational solvers and profile extraction"};
    app.set_version_flag("--version", kVersion);
    std::string command, config, out = "out";
    std::uint64_t seed = 1;
    int threads = 1;
    bool emit_fields = false;
    app.add_option("command", command, "energy | j2-check | invariance | poisson | ground-state | penalty | "
                                       "critical-check | profiles | liminf")
        ->required();
    app.add_option("--config", config, "JSON configuration file")->required();
    app.add_option("--out", out, "output directory");
    app.add_option("--seed", seed, "base random seed");
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    app.add_flag("--emit-fields", emit_fields, "write fields/*.afld");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    affsob::set_thread_count(threads);
    const auto& table = affsob::cli::commands();
    const auto it = table.find(command);
    if (it == table.end()) {
        std::cerr << "error: unknown command '" << command << "'\n";
        return kConfig;
    }

    const auto t0 = std::chrono::steady_clock::now();
    affsob::cli::Outcome outcome;
    try {
        const fs::path cfg_path(config);
        const json cfg = read_config(cfg_path);
        affsob::cli::RunOptions opt;
        opt.base = cfg_path.has_parent_path() ? cfg_path.parent_path() : fs::path(".");
        opt.seed = seed;
        opt.emit_fields = emit_fields;
        outcome = it->second(cfg, opt);
    } catch (const affsob::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const affsob::InvalidArgument& e) {
        std::cerr << "invalid argument: " << e.what() << '\n';
        return kConfig;
    } catch (const affsob::PreconditionError& e) {
        std::cerr << "precondition failed: " << e.what() << '\n';
        return kConfig;
    } catch (const affsob::DegenerateError& e) {
        std::cerr << "degenerate input: " << e.what() << '\n';
        return kConfig;
    } catch (const affsob::ConvergenceError& e) {
        std::cerr << "no convergence: " << e.what() << '\n';
        return kConvergence;
    } catch (const affsob::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    try {
        write_outputs(out, command, outcome, seed, threads, seconds);
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIo;
    }
    if (outcome.status == kConvergence) std::cerr << "no convergence: " << outcome.report.value("error", "") << '\n';
    return outcome.status;
}
