// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "chemolab/experiment.hpp"

using namespace chemolab;
using std::numbers::pi;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) pass = false;
        if (!detail.empty()) detail += "; ";
        detail += (ok ? "" : "FAILED ") + what;
    }
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

const char* cosine_config =
    "domain.nx = 64\n"
    "init.u = cos 1 0.5 1\n"
    "init.v = constant 1\n"
    "init.w = constant 0.3\n"
    "init.z = constant 1\n"
    "solver.t_end = 30\n"
    "solver.sample_every = 0.1\n"
    "audit.slack = 0.1\n"
    "theory.k_safety = 2\n"
    "run.seed = 20240611\n";

FieldQuad cosine_quad(const Domain& d) {
    return FieldQuad(sample(d, [&](double x) { return 1.0 + 0.5 * std::cos(pi * x / d.length(0)); }),
                     GridField(d, 1.0), GridField(d, 0.3), GridField(d, 1.0));
}

double report_number(const Report& r, const std::string& key) {
    const Report::Value* v = r.find(key);
    if (!v) return std::nan("");
    return std::strtod(Report::format(*v).c_str(), nullptr);
}

std::string report_string(const Report& r, const std::string& key) {
    const Report::Value* v = r.find(key);
    return v ? Report::format(*v) : "<missing>";
}

Verdict constant_closed_form() {
    Verdict v;
    const Domain d(pi, 64);
    SolverConfig cfg;
    cfg.t_end = 5.0;
    cfg.dt_max = 1e-3;
    cfg.sample_every = 0.5;
    const auto start = Clock::now();
    const RunResult r = run(FieldQuad::constant(d, 1.0, 1.0, 0.5, 1.0), cfg);
    const double elapsed = seconds_since(start);
    double eu = 0, ev = 0, ew = 0, ez = 0;
    const double t = r.final_state.time;
    for (std::size_t k = 0; k < d.size(); ++k) {
        eu = std::max(eu, std::abs(r.final_state.u[k] - 1.0));
        ev = std::max(ev, std::abs(r.final_state.v[k] - (1.0 + 0.5 * (1.0 - std::exp(-t)))));
        ew = std::max(ew, std::abs(r.final_state.w[k] - 0.5 * std::exp(-t)));
        ez = std::max(ez, std::abs(r.final_state.z[k] - 1.0));
    }
    v.require(t == 5.0, "t_end reached");
    v.require(ev <= 1e-2, "v err " + num(ev));
    v.require(eu <= 1e-10 && ew <= 1e-10 && ez <= 1e-10, "u/w/z err " + num(std::max({eu, ew, ez})));
    v.require(elapsed < 5.0, "runtime " + num(elapsed) + " s");
    return v;
}

Verdict conservation() {
    Verdict v;
    struct Case {
        const char* name;
        Domain d;
        FieldQuad q0;
        double t_end;
    };
    const Domain d1(pi, 64), d2(pi, pi / 2, 32, 16);
    const std::vector<Case> cases = {
        {"constant", d1, FieldQuad::constant(d1, 1.0, 1.0, 0.5, 1.0), 5.0},
        {"cosine 1d", d1, cosine_quad(d1), 30.0},
        {"cosine 2d", d2, cosine_quad(d2), 10.0},
    };
    for (const Case& c : cases) {
        SolverConfig cfg;
        cfg.t_end = c.t_end;
        const RunResult r = run(c.q0, cfg);
        const ConservationAudit a = audit_conservation(r.series, 1e-8);
        bool w_mono = true;
        for (std::size_t i = 1; i < r.samples.size(); ++i) w_mono = w_mono && r.samples[i].w_inf <= r.samples[i - 1].w_inf;
        v.require(a.drift_u <= 1e-8 && a.drift_vw <= 1e-8,
                  std::string(c.name) + " drift " + num(std::max(a.drift_u, a.drift_vw)));
        v.require(w_mono, std::string(c.name) + " w_inf nonincreasing");
        v.require(r.min_over_steps >= 0.0, std::string(c.name) + " min " + num(r.min_over_steps));
    }
    return v;
}

struct CosineRun {
    SimulationOutcome out;
    double seconds = 0.0;
};

const CosineRun& cosine_run() {
    static const CosineRun cached = [] {
        CosineRun c;
        const auto start = Clock::now();
        c.out = cmd_simulate(parse_config(cosine_config));
        c.seconds = seconds_since(start);
        return c;
    }();
    return cached;
}

Verdict convergence_and_rates() {
    Verdict v;
    const CosineRun& c = cosine_run();
    const TimeSeries& ts = c.out.series;
    double last = 0.0;
    for (int f = 0; f < 4; ++f) last = std::max(last, ts.dist[f].back());
    v.require(ts.times.back() == 30.0 && last < 1e-6, "final distance " + num(last));
    const double expected[4] = {1.0 / 6.0, 1.0 / 3.0, 0.5, 1.0 / 6.0};
    for (int f = 0; f < 4; ++f) {
        const std::string key = std::string("rates.fit.") + field_names[f];
        const double rate = report_number(c.out.report, key + ".rate");
        const double bound = report_number(c.out.report, key + ".bound");
        v.require(std::abs(bound - expected[f]) < 1e-15 && rate >= 0.9 * bound,
                  std::string(field_names[f]) + " rate " + num(rate) + " vs " + num(bound));
    }
    v.require(c.seconds < 60.0, "runtime " + num(c.seconds) + " s");
    return v;
}

Verdict envelopes() {
    Verdict v;
    const Report& r = cosine_run().out.report;
    v.require(report_string(r, "flags.t0_reached") == "true", "t0 " + report_string(r, "flags.t0"));
    v.require(report_string(r, "k.safety_factor") == "2", "k safety factor 2");
    for (int f = 0; f < 4; ++f) {
        const std::string key = std::string("envelope.") + field_names[f];
        v.require(report_string(r, key + ".pass") == "true",
                  std::string(field_names[f]) + " margin " + num(report_number(r, key + ".worst_margin")));
    }
    return v;
}

// Dense scan on (0, 100] with step 1e-5, then golden refinement.
double b_oracle(double ubar0) {
    auto g = [ubar0](double s) { return (s + 2.0 * std::sqrt(s)) * std::exp(-ubar0 * s / 3.0); };
    double best = 0.0, arg = 0.0;
    for (long i = 1; i <= 10000000; ++i) {
        const double s = 1e-5 * static_cast<double>(i);
        const double val = g(s);
        if (val > best) {
            best = val;
            arg = s;
        }
    }
    double a = arg - 1e-5, b = arg + 1e-5;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 100; ++it) {
        const double c = b - phi * (b - a), d = a + phi * (b - a);
        if (g(c) > g(d)) {
            b = d;
        } else {
            a = c;
        }
    }
    return std::max(best, g(0.5 * (a + b)));
}

Verdict theory_constants() {
    Verdict v;
    const double b = constant_B(3.0), bo = b_oracle(3.0);
    v.require(std::abs(b - bo) <= 1e-4, "B(3) " + num(b) + " vs " + num(bo));
    double worst = 0.0;
    for (double mu : {0.25, 0.5, 1.0, 2.0}) {
        worst = std::max(worst, std::abs(constant_D_for_mu(mu) / constant_D_closed_form(mu) - 1.0));
    }
    v.require(worst <= 1e-6, "D rel err " + num(worst));
    const double a1 = constant_A(4.0, 1.0, {64}), a2 = constant_A(4.0, 1.0, {128}), a3 = constant_A(4.0, 1.0, {256});
    const double drift = std::max(std::abs(a2 - a1), std::abs(a3 - a2)) / a3;
    v.require(drift < 1e-3, "A(4,1) refinement drift " + num(drift));
    return v;
}

GridField random_field(const Domain& d, std::uint64_t seed) {
    CounterStream s(seed, 0);
    GridField f(d);
    for (double& x : f.values) x = s.uniform();
    return f;
}

Verdict semigroup_probes() {
    Verdict v;
    for (const Domain& d : {Domain(pi, 64), Domain(pi, pi / 2, 32, 16)}) {
        const std::string tag = d.dims() == 1 ? "1d" : "2d";
        const HeatPropagator heat(d);
        const GridField f = random_field(d, 11);
        const GridField a = heat.propagate(heat.propagate(f, 0.3), 0.45), b = heat.propagate(f, 0.75);
        double e = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) e = std::max(e, std::abs(a[k] - b[k]));
        v.require(e <= 1e-10, tag + " semigroup " + num(e));

        const GridField mode = cosine_mode(d, 1);
        const GridField p = heat.propagate(mode, 1.0);
        const double decay = std::exp(-lambda1_discrete(d));
        double em = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) em = std::max(em, std::abs(p[k] - decay * mode[k]));
        v.require(em <= 1e-13, tag + " eigenmode " + num(em));

        const auto tg = default_t_grid(lambda1_discrete(d));
        for (const SmoothingEstimateKind& kind : envelope_probe_kinds(d.dims())) {
            const double k1 = estimate_k(kind, d, 100, tg, 42).estimated_constant;
            const double k2 = estimate_k(kind, d, 200, tg, 42).estimated_constant;
            const double change = std::abs(k2 - k1) / k1;
            v.require(std::isfinite(k1) && std::isfinite(k2) && k1 > 0.0 && change < 0.1,
                      tag + " kind " + to_string(kind.kind) + " k " + num(k2) + " change " + num(change));
        }
    }
    return v;
}

Verdict convolution_verifier() {
    Verdict v;
    const double r = convolution_bound_ratio(0, 0, 2, 1).sup_ratio;
    v.require(std::abs(r - 2.0) <= 1e-4, "closed-form sup " + num(r));
    ConvolutionOptions coarse, fine;
    coarse.panels = 32;
    fine.panels = 64;
    const double a = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3, coarse).sup_ratio;
    const double b = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3, fine).sup_ratio;
    const double c = convolution_bound_ratio(0.5, 0.5, 1.0, 0.3).sup_ratio;
    v.require(std::isfinite(c) && c > 0.0, "singular sup " + num(c));
    v.require(std::abs(a - b) / b < 1e-2 && std::abs(b - c) / c < 1e-2,
              "quadrature change " + num(std::max(std::abs(a - b) / b, std::abs(b - c) / c)));
    return v;
}

std::string read_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Verdict determinism() {
    Verdict v;
    const auto root = std::filesystem::temp_directory_path() / "chemolab_acceptance";
    std::filesystem::remove_all(root);
    ExperimentConfig cfg = parse_config(cosine_config);
    cfg.solver.t_end = 10.0;
    for (const char* dir : {"a", "b"}) {
        const SimulationOutcome out = cmd_simulate(cfg);
        write_file(root / dir / "run.csv", series_csv(out.series));
        write_file(root / dir / "run.report", out.report.text());
        write_file(root / dir / "run.json", out.report.json_text());
    }
    for (const char* file : {"run.csv", "run.report", "run.json"}) {
        const std::string a = read_bytes(root / "a" / file), b = read_bytes(root / "b" / file);
        v.require(!a.empty() && a == b, std::string(file) + " identical");
    }
    std::filesystem::remove_all(root);
    return v;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"constant-data closed form", constant_closed_form},
        {"conservation, w monotone, positivity", conservation},
        {"convergence and decay rates", convergence_and_rates},
        {"envelope audit", envelopes},
        {"theory-constant oracles", theory_constants},
        {"semigroup probes", semigroup_probes},
        {"convolution bound verifier", convolution_verifier},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.pass = false;
            v.detail = std::string("exception: ") + e.what();
        }
        if (!v.pass) ++failures;
        std::printf("%s %zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
