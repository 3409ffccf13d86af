#pragma once

// Experiment configuration: line-oriented `section.key = value` text.
//
//   # comment
//   domain.dims = 1
//   domain.lx   = pi
//   domain.nx   = 64
//   init.u      = cos 1 0.5 1
//   init.w      = constant 0.3
//
// Unknown keys, duplicate keys and malformed values are errors carrying the
// line number. Lengths accept `pi`, `2pi`, `2*pi`, `pi/2` and `3*pi/4`.

#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "chemolab/error.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/solver.hpp"
#include "chemolab/state.hpp"

namespace chemolab {

/// Initial profile of one field.
struct InitSpec {
    enum class Kind { Constant, Cosine, File };
    Kind kind = Kind::Constant;
    double c = 0.0;   // constant level
    double a = 0.0;   // cosine amplitude
    int kx = 0;       // c + a cos(kx pi x / Lx) cos(ky pi y / Ly)
    int ky = 0;
    std::string path;             // as written in the config
    std::vector<double> values;   // file contents, cell order i + nx * j

    static InitSpec constant(double c) { return {Kind::Constant, c, 0.0, 0, 0, {}, {}}; }
    static InitSpec cosine(double c, double a, int kx, int ky = 0) { return {Kind::Cosine, c, a, kx, ky, {}, {}}; }
};

struct AuditConfig {
    double slack = 0.1;
    /// Fit floor relative to the largest sample of each distance series.
    double floor = 1e-10;
    double window = 0.5;
    /// Relative drift allowed for the integrals of u and v + w.
    double conservation_tol = 1e-8;
};

struct TheoryConfig {
    double k_safety = 2.0;
    /// Exponent p of the gradient norm in the envelope constant; 0 means 3n.
    double p = 0.0;
    double n_effective = 4.0;
    /// Fixed k_i; 0 means "estimate from the semigroup probes".
    std::array<double, 4> k{0.0, 0.0, 0.0, 0.0};
    std::size_t k_samples = 100;
    double smallness_eps = 1e-2;
};

struct OutputConfig {
    std::string dir = ".";
    std::string stem = "run";
};

struct ExperimentConfig {
    int dims = 1;
    double lx = std::numbers::pi;
    double ly = std::numbers::pi;
    std::size_t nx = 64;
    std::size_t ny = 1;
    std::array<InitSpec, 4> init{};  // u, v, w, z
    SolverConfig solver;
    AuditConfig audit;
    TheoryConfig theory;
    std::uint64_t seed = 0;
    OutputConfig output;

    Domain domain() const { return dims == 1 ? Domain(lx, nx) : Domain(lx, ly, nx, ny); }
    double effective_p() const { return theory.p > 0.0 ? theory.p : 3.0 * dims; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
    std::istringstream in(s);
    std::vector<std::string> out;
    for (std::string tok; in >> tok;) out.push_back(tok);
    return out;
}

[[noreturn]] inline void config_fail(std::size_t line, const std::string& what) {
    throw Error(ErrorKind::ConfigError, "line " + std::to_string(line) + ": " + what);
}

inline bool parse_plain_real(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && errno == 0;
}

}  // namespace detail

/// Real number, optionally a rational multiple of pi.
inline double parse_real(const std::string& text, std::size_t line) {
    const std::string s = detail::trim(text);
    double v = 0.0;
    if (detail::parse_plain_real(s, v)) return v;
    const auto at = s.find("pi");
    if (at == std::string::npos) detail::config_fail(line, "expected a number, got '" + s + "'");
    std::string head = s.substr(0, at), tail = s.substr(at + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    double factor = 1.0, divisor = 1.0;
    if (!head.empty() && !detail::parse_plain_real(head, factor)) {
        detail::config_fail(line, "expected a number, got '" + s + "'");
    }
    if (!tail.empty()) {
        if (tail[0] != '/' || !detail::parse_plain_real(tail.substr(1), divisor) || divisor == 0.0) {
            detail::config_fail(line, "expected a number, got '" + s + "'");
        }
    }
    return factor * std::numbers::pi / divisor;
}

inline long long parse_integer(const std::string& text, std::size_t line) {
    const std::string s = detail::trim(text);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || errno != 0) {
        detail::config_fail(line, "expected an integer, got '" + s + "'");
    }
    return v;
}

inline std::size_t parse_count(const std::string& text, std::size_t line) {
    const long long v = parse_integer(text, line);
    if (v < 0) detail::config_fail(line, "expected a nonnegative integer, got '" + detail::trim(text) + "'");
    return static_cast<std::size_t>(v);
}

inline std::uint64_t parse_seed(const std::string& text, std::size_t line) {
    const std::string s = detail::trim(text);
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 0);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size() || errno != 0) {
        detail::config_fail(line, "expected an unsigned 64-bit seed, got '" + s + "'");
    }
    return static_cast<std::uint64_t>(v);
}

/// `constant c` | `cos c a kx [ky]` | `file path`
inline InitSpec parse_init_spec(const std::string& text, std::size_t line, const std::filesystem::path& base_dir) {
    const auto tok = detail::split_ws(text);
    if (tok.empty()) detail::config_fail(line, "empty initial-data spec");
    auto to_int = [&](const std::string& s) { return static_cast<int>(parse_integer(s, line)); };
    if (tok[0] == "constant") {
        if (tok.size() != 2) detail::config_fail(line, "expected 'constant <value>'");
        return InitSpec::constant(parse_real(tok[1], line));
    }
    if (tok[0] == "cos") {
        if (tok.size() != 4 && tok.size() != 5) detail::config_fail(line, "expected 'cos <c> <a> <kx> [ky]'");
        InitSpec s = InitSpec::cosine(parse_real(tok[1], line), parse_real(tok[2], line), to_int(tok[3]),
                                      tok.size() == 5 ? to_int(tok[4]) : 0);
        if (s.kx < 0 || s.ky < 0) detail::config_fail(line, "wavenumbers must be >= 0");
        return s;
    }
    if (tok[0] == "file") {
        if (tok.size() != 2) detail::config_fail(line, "expected 'file <path>'");
        InitSpec s;
        s.kind = InitSpec::Kind::File;
        s.path = tok[1];
        const std::filesystem::path p = std::filesystem::path(s.path).is_absolute() ? std::filesystem::path(s.path) : base_dir / s.path;
        std::ifstream in(p);
        if (!in) detail::config_fail(line, "cannot open initial-data file '" + p.string() + "'");
        for (std::string t; in >> t;) {
            double v = 0.0;
            if (!detail::parse_plain_real(t, v)) detail::config_fail(line, "non-numeric entry '" + t + "' in " + s.path);
            s.values.push_back(v);
        }
        return s;
    }
    detail::config_fail(line, "unknown initial-data kind '" + tok[0] + "'");
}

inline std::string to_string(const InitSpec& s) {
    auto num = [](double x) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return std::string(buf);
    };
    switch (s.kind) {
        case InitSpec::Kind::Constant:
            return "constant " + num(s.c);
        case InitSpec::Kind::Cosine:
            return "cos " + num(s.c) + " " + num(s.a) + " " + std::to_string(s.kx) + " " + std::to_string(s.ky);
        case InitSpec::Kind::File:
            return "file " + s.path;
    }
    return {};
}

inline GridField build_field(const Domain& d, const InitSpec& s, const char* name) {
    switch (s.kind) {
        case InitSpec::Kind::Constant:
            return GridField(d, s.c);
        case InitSpec::Kind::Cosine: {
            const double lx = d.length(0), ly = d.length(1);
            return sample(d, [&](double x, double y) {
                const double cy = d.dims() == 2 ? std::cos(s.ky * std::numbers::pi * y / ly) : 1.0;
                return s.c + s.a * std::cos(s.kx * std::numbers::pi * x / lx) * cy;
            });
        }
        case InitSpec::Kind::File:
            if (s.values.size() != d.size()) {
                throw Error(ErrorKind::InvalidInitialData, std::string(name) + "0 file has " +
                                                               std::to_string(s.values.size()) + " values, grid has " +
                                                               std::to_string(d.size()) + " cells");
            }
            return GridField(d, s.values);
    }
    throw Error(ErrorKind::InternalError, "unhandled init kind");
}

/// Initial quad described by the config, validated.
inline ValidatedQuad build_initial(const ExperimentConfig& cfg) {
    const Domain d = cfg.domain();
    return validate_initial(FieldQuad(build_field(d, cfg.init[0], "u"), build_field(d, cfg.init[1], "v"),
                                      build_field(d, cfg.init[2], "w"), build_field(d, cfg.init[3], "z")));
}

/// Parses and validates a config. Relative `file` paths resolve against base_dir.
inline ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = ".") {
    ExperimentConfig cfg;
    using Setter = std::function<void(const std::string&, std::size_t)>;
    auto real = [](double& dst) { return Setter([&dst](const std::string& v, std::size_t l) { dst = parse_real(v, l); }); };
    auto count = [](std::size_t& dst) {
        return Setter([&dst](const std::string& v, std::size_t l) { dst = parse_count(v, l); });
    };
    auto init = [&](std::size_t f) {
        return Setter([&cfg, &base_dir, f](const std::string& v, std::size_t l) {
            cfg.init[f] = parse_init_spec(v, l, base_dir);
        });
    };
    const std::map<std::string, Setter> setters = {
        {"domain.dims", [&](const std::string& v, std::size_t l) { cfg.dims = static_cast<int>(parse_integer(v, l)); }},
        {"domain.lx", real(cfg.lx)},
        {"domain.ly", real(cfg.ly)},
        {"domain.nx", count(cfg.nx)},
        {"domain.ny", count(cfg.ny)},
        {"init.u", init(0)},
        {"init.v", init(1)},
        {"init.w", init(2)},
        {"init.z", init(3)},
        {"solver.t_end", real(cfg.solver.t_end)},
        {"solver.dt_max", real(cfg.solver.dt_max)},
        {"solver.cfl_safety", real(cfg.solver.cfl_safety)},
        {"solver.tol_lin", real(cfg.solver.tol_lin)},
        {"solver.sample_every", real(cfg.solver.sample_every)},
        {"solver.blowup_threshold", real(cfg.solver.blowup_threshold)},
        {"solver.criterion_epsilon", real(cfg.solver.criterion_epsilon)},
        {"audit.slack", real(cfg.audit.slack)},
        {"audit.floor", real(cfg.audit.floor)},
        {"audit.window", real(cfg.audit.window)},
        {"audit.conservation_tol", real(cfg.audit.conservation_tol)},
        {"theory.k_safety", real(cfg.theory.k_safety)},
        {"theory.p", real(cfg.theory.p)},
        {"theory.n_effective", real(cfg.theory.n_effective)},
        {"theory.k1", real(cfg.theory.k[0])},
        {"theory.k2", real(cfg.theory.k[1])},
        {"theory.k3", real(cfg.theory.k[2])},
        {"theory.k4", real(cfg.theory.k[3])},
        {"theory.k_samples", count(cfg.theory.k_samples)},
        {"theory.smallness_eps", real(cfg.theory.smallness_eps)},
        {"run.seed", [&](const std::string& v, std::size_t l) { cfg.seed = parse_seed(v, l); }},
        {"output.dir", [&](const std::string& v, std::size_t) { cfg.output.dir = detail::trim(v); }},
        {"output.stem", [&](const std::string& v, std::size_t) { cfg.output.stem = detail::trim(v); }},
    };

    std::map<std::string, std::size_t> seen;
    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) detail::config_fail(line_no, "expected 'section.key = value'");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) detail::config_fail(line_no, "unknown key '" + key + "'");
        if (auto prev = seen.find(key); prev != seen.end()) {
            detail::config_fail(line_no, "duplicate key '" + key + "' (first set on line " +
                                             std::to_string(prev->second) + ")");
        }
        if (value.empty()) detail::config_fail(line_no, "missing value for '" + key + "'");
        seen.emplace(key, line_no);
        it->second(value, line_no);
    }

    auto require = [&](const char* key) {
        if (!seen.count(key)) {
            throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_no) + ": missing required key '" +
                                                    std::string(key) + "'");
        }
    };
    require("domain.nx");
    require("init.u");
    if (cfg.dims == 2) require("domain.ny");
    if (cfg.dims == 1) {
        for (const char* key : {"domain.ly", "domain.ny"}) {
            if (seen.count(key)) detail::config_fail(seen[key], std::string(key) + " needs domain.dims = 2");
        }
        cfg.ny = 1;
    }
    for (int f = 0; f < 4; ++f) {
        if (cfg.dims == 1 && cfg.init[f].ky != 0) {
            throw Error(ErrorKind::ConfigError, std::string("init.") + field_names[f] + ": ky needs domain.dims = 2");
        }
    }

    // Structural checks: domain, data, solver and audit parameters.
    cfg.domain();
    build_initial(cfg);
    cfg.solver.validate();
    if (!(cfg.audit.slack >= 0.0 && cfg.audit.slack < 0.5)) {
        throw Error(ErrorKind::ConfigError, "audit.slack must be in [0, 0.5)");
    }
    if (!(cfg.audit.floor >= 0.0 && cfg.audit.floor < 1.0)) {
        throw Error(ErrorKind::ConfigError, "audit.floor must be in [0, 1)");
    }
    if (!(cfg.audit.window > 0.0 && cfg.audit.window <= 1.0)) {
        throw Error(ErrorKind::ConfigError, "audit.window must be in (0, 1]");
    }
    if (!(cfg.audit.conservation_tol > 0.0)) throw Error(ErrorKind::ConfigError, "audit.conservation_tol must be > 0");
    if (!(cfg.theory.k_safety >= 1.0)) throw Error(ErrorKind::ConfigError, "theory.k_safety must be >= 1");
    if (cfg.theory.p != 0.0 && !(cfg.theory.p > 2.0 && std::isfinite(cfg.theory.p))) {
        throw Error(ErrorKind::ConfigError, "theory.p must be 0 (auto) or finite and > 2");
    }
    if (!(cfg.theory.n_effective >= 4.0)) throw Error(ErrorKind::ConfigError, "theory.n_effective must be >= 4");
    for (double k : cfg.theory.k) {
        if (!(k >= 0.0) || !std::isfinite(k)) throw Error(ErrorKind::ConfigError, "theory.k_i must be >= 0 (0 = estimate)");
    }
    if (cfg.theory.k_samples < 1) throw Error(ErrorKind::ConfigError, "theory.k_samples must be >= 1");
    if (!(cfg.theory.smallness_eps > 0.0)) throw Error(ErrorKind::ConfigError, "theory.smallness_eps must be > 0");
    if (cfg.output.stem.empty()) throw Error(ErrorKind::ConfigError, "output.stem must not be empty");
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace chemolab
