#pragma once

// Experiment orchestration behind the command-line tool: single audited
// runs, theory constants, smallness sweeps, CSV re-audits and semigroup probes.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdlib>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "chemolab/config.hpp"
#include "chemolab/random.hpp"
#include "chemolab/rates.hpp"
#include "chemolab/report.hpp"
#include "chemolab/semigroup.hpp"
#include "chemolab/solver.hpp"
#include "chemolab/theory.hpp"

namespace chemolab {

enum ExitCode : int {
    exit_success = 0,
    exit_audit_failure = 2,
    exit_blowup = 3,
    exit_config_error = 4,
    exit_numerical_failure = 5,
};

inline int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NumericalFailure:
        case ErrorKind::SolverFailure:
            return exit_numerical_failure;
        case ErrorKind::InternalError:
            return 1;
        default:
            return exit_config_error;
    }
}

// ---------------------------------------------------------------------------
// k_i estimation

/// Probe kinds and exponents behind k1..k4 in a domain of dimension n.
inline std::array<SmoothingEstimateKind, 4> envelope_probe_kinds(int n) {
    const double p = 3.0 * n;
    return {{{SmoothingKind::MeanZero, infinity, infinity},
             {SmoothingKind::Gradient, p, p},
             {SmoothingKind::GradientFromGradient, p, p},
             {SmoothingKind::Divergence, infinity, p}}};
}

/// Seed handed to the probe of stream `index`: first value of counter stream
/// `index` under the run seed.
inline std::uint64_t probe_seed(std::uint64_t seed, std::uint64_t index) {
    return CounterStream(seed, index).next_u64();
}

struct KChoice {
    std::array<double, 4> k{};          // values used by the envelopes
    std::array<double, 4> estimate{};   // raw probe sup (0 when fixed in config)
    std::array<bool, 4> fixed{};
};

inline KChoice choose_k(const Domain& d, const TheoryConfig& th, std::uint64_t seed) {
    KChoice out;
    const auto kinds = envelope_probe_kinds(d.dims());
    const auto tg = default_t_grid(lambda1_discrete(d));
    for (std::size_t i = 0; i < 4; ++i) {
        if (th.k[i] > 0.0) {
            out.k[i] = th.k[i];
            out.fixed[i] = true;
            continue;
        }
        out.estimate[i] = estimate_k(kinds[i], d, th.k_samples, tg, probe_seed(seed, i)).estimated_constant;
        out.k[i] = th.k_safety * out.estimate[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Report sections

inline void report_config(Report& r, const ExperimentConfig& c) {
    r.set("config.domain.dims", c.dims);
    r.set("config.domain.lx", c.lx);
    if (c.dims == 2) r.set("config.domain.ly", c.ly);
    r.set("config.domain.nx", c.nx);
    if (c.dims == 2) r.set("config.domain.ny", c.ny);
    for (std::size_t f = 0; f < 4; ++f) r.set(std::string("config.init.") + field_names[f], to_string(c.init[f]));
    r.set("config.solver.t_end", c.solver.t_end);
    r.set("config.solver.dt_max", c.solver.dt_max);
    r.set("config.solver.cfl_safety", c.solver.cfl_safety);
    r.set("config.solver.tol_lin", c.solver.tol_lin);
    r.set("config.solver.sample_every", c.solver.sample_every);
    r.set("config.solver.blowup_threshold", c.solver.blowup_threshold);
    r.set("config.solver.criterion_epsilon", c.solver.criterion_epsilon);
    r.set("config.audit.slack", c.audit.slack);
    r.set("config.audit.floor", c.audit.floor);
    r.set("config.audit.window", c.audit.window);
    r.set("config.audit.conservation_tol", c.audit.conservation_tol);
    r.set("config.theory.k_safety", c.theory.k_safety);
    r.set("config.theory.p", c.effective_p());
    r.set("config.theory.n_effective", c.theory.n_effective);
    for (std::size_t i = 0; i < 4; ++i) r.set("config.theory.k" + std::to_string(i + 1), c.theory.k[i]);
    r.set("config.theory.k_samples", c.theory.k_samples);
    r.set("config.theory.smallness_eps", c.theory.smallness_eps);
    r.set("config.run.seed", Report::Value(c.seed));
    r.set("config.output.dir", c.output.dir);
    r.set("config.output.stem", c.output.stem);
}

inline void report_rate_bounds(Report& r, const std::string& prefix, const RateBounds& b) {
    for (std::size_t f = 0; f < 4; ++f) r.set(prefix + "." + field_names[f], b[f]);
    r.set(prefix + ".z_reading", z_rate_reading);
}

inline void report_envelope(Report& r, const std::string& prefix, const EnvelopeInputs& in, const EnvelopeBounds& e) {
    r.set(prefix + ".input.lambda1", in.lambda1);
    r.set(prefix + ".input.ubar0", in.ubar0);
    r.set(prefix + ".input.vbar0", in.vbar0);
    r.set(prefix + ".input.wbar0", in.wbar0);
    r.set(prefix + ".input.w0_inf", in.w0_inf);
    r.set(prefix + ".input.grad_v_t0", in.grad_v_t0);
    r.set(prefix + ".input.measure", in.measure);
    r.set(prefix + ".input.p", in.p);
    r.set(prefix + ".input.t0", in.t0);
    for (std::size_t i = 0; i < 4; ++i) r.set(prefix + ".input.k" + std::to_string(i + 1), in.k[i]);
    r.set(prefix + ".branch", to_string(e.branch));
    r.set(prefix + ".branch_rule", "A if lambda1 < ubar0/2, else B");
    if (e.branch == GradientBranch::A) {
        r.set(prefix + ".A", e.A);
    } else {
        r.set(prefix + ".B", e.B);
    }
    r.set(prefix + ".C", e.C);
    r.set(prefix + ".D", e.D);
    for (std::size_t f = 0; f < 4; ++f) r.set(prefix + ".m" + std::to_string(f + 1), e.m[f]);
}

inline void report_formulas(Report& r, const std::string& prefix) {
    r.set(prefix + ".rate_u", "min{lambda1, ubar0/3} / 2");
    r.set(prefix + ".rate_v", "min{lambda1, ubar0/3}");
    r.set(prefix + ".rate_w", "ubar0 / 2");
    r.set(prefix + ".rate_z", z_rate_reading);
    r.set(prefix + ".A", "sup_s int_0^s (1 + tau^(-1/2)) exp(-(lambda1 - ubar0/2) tau - (ubar0/2 - lambda1/2) s) dtau");
    r.set(prefix + ".B", "sup_s (s + 2 sqrt(s)) exp(-ubar0 s / 3)");
    r.set(prefix + ".C", "2 k3 |grad v(t0)|_p + 1.5 k2 ubar0 |w0|_inf |Omega|^(1/p) max{A, B}");
    r.set(prefix + ".D", "int_0^inf (1 + s^(-2/3)) exp(-mu s) ds, mu = lambda1 - min{lambda1, ubar0/3}/2");
    r.set(prefix + ".m1", "(5 k1 + 1.5 k4 C D) ubar0");
    r.set(prefix + ".m2", "6 k1 (vbar0 + wbar0) + (36 k1 / e + 1) |w0|_inf");
    r.set(prefix + ".m3", "|w0|_inf");
    r.set(prefix + ".m4", "ubar0 (2.5 + 2 k1 (3 + (10 k1 + 3 k4 C D) / (2 (lambda1 + 1) - min{lambda1, ubar0/3})))");
}

// ---------------------------------------------------------------------------
// Rate audit shared by simulate and rates

struct RateAudit {
    bool pass = true;
    Report report;
};

/// Fits every distance series and compares against the bounds. A series whose
/// largest sample is at rounding level relative to `scale` counts as already
/// at equilibrium.
inline RateAudit audit_rates(const TimeSeries& ts, const RateBounds& bounds, const AuditConfig& ac, double scale) {
    RateAudit out;
    for (std::size_t f = 0; f < 4; ++f) {
        const std::string key = std::string("fit.") + field_names[f];
        const auto& y = ts.dist[f];
        const double peak = y.empty() ? 0.0 : *std::max_element(y.begin(), y.end());
        if (peak <= 1e-12 * (1.0 + scale)) {
            out.report.set(key + ".status", "at_equilibrium");
            out.report.set(key + ".max_distance", peak);
            out.report.set(key + ".pass", true);
            continue;
        }
        FitOptions opt;
        opt.floor = ac.floor * peak;
        opt.window = ac.window;
        try {
            const RateFit fit = fit_exponential_rate(ts.times, y, opt);
            std::array<RateFit, 4> one{};
            one[f] = fit;
            const RateVerdict v = compare_rates(one, bounds, ac.slack)[f];
            out.report.set(key + ".status", "fitted");
            out.report.set(key + ".rate", fit.rate);
            out.report.set(key + ".bound", v.bound);
            out.report.set(key + ".required", (1.0 - ac.slack) * v.bound);
            out.report.set(key + ".intercept", fit.intercept);
            out.report.set(key + ".r_squared", fit.r_squared);
            out.report.set(key + ".t_start", fit.t_start);
            out.report.set(key + ".t_end", fit.t_end);
            out.report.set(key + ".points", fit.points_used);
            out.report.set(key + ".non_exponential_tail", v.non_exponential_tail);
            out.report.set(key + ".pass", v.pass);
            out.pass = out.pass && v.pass;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::InsufficientData) throw;
            out.report.set(key + ".status", "insufficient_data");
            out.report.set(key + ".detail", e.what());
            out.report.set(key + ".pass", false);
            out.pass = false;
        }
    }
    return out;
}

struct ConservationAudit {
    double drift_u = 0.0;   // max relative change of the u integral over samples
    double drift_vw = 0.0;
    bool w_inf_nonincreasing = true;
    double min_sample = 0.0;
    bool pass = true;
};

inline double relative_change(double now, double ref) {
    return std::abs(now - ref) / (std::abs(ref) > 0.0 ? std::abs(ref) : 1.0);
}

inline ConservationAudit audit_conservation(const TimeSeries& ts, double tol) {
    ConservationAudit a;
    if (ts.size() == 0) return a;
    a.min_sample = *std::min_element(ts.min_all.begin(), ts.min_all.end());
    for (std::size_t i = 0; i < ts.size(); ++i) {
        a.drift_u = std::max(a.drift_u, relative_change(ts.mass_u[i], ts.mass_u[0]));
        a.drift_vw = std::max(a.drift_vw, relative_change(ts.mass_vw[i], ts.mass_vw[0]));
    }
    a.pass = a.drift_u <= tol && a.drift_vw <= tol && a.min_sample >= 0.0;
    return a;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulationOutcome {
    Report report;
    TimeSeries series;
    int exit_code = exit_success;
};

inline SimulationOutcome cmd_simulate(const ExperimentConfig& cfg) {
    SimulationOutcome out;
    Report& r = out.report;
    report_config(r, cfg);
    const Domain d = cfg.domain();
    const ValidatedQuad q0 = build_initial(cfg);
    const Equilibrium eq = equilibrium_of(q0.quad);
    const double lambda1 = lambda1_analytic(d);
    r.set("grid.lambda1_analytic", lambda1);
    r.set("grid.lambda1_discrete", lambda1_discrete(d));
    r.set("equilibrium.u", eq.u_star);
    r.set("equilibrium.v", eq.v_star);
    r.set("equilibrium.w", eq.w_star);
    r.set("equilibrium.z", eq.z_star);
    r.set("flags.degenerate", q0.degenerate);

    RunResult run_result;
    try {
        run_result = run(q0.quad, cfg.solver);
    } catch (const NumericalFailure& e) {
        r.set("flags.numerical_failure", true);
        r.set("flags.numerical_failure_detail", e.what());
        r.set("flags.numerical_failure_time", e.last_good().time);
        r.set("audit.status", "skipped: numerical failure");
        out.exit_code = exit_numerical_failure;
        r.set("exit_code", out.exit_code);
        return out;
    }
    const RunResult& rr = run_result;
    out.series = rr.series;
    r.set("flags.numerical_failure", false);
    r.set("flags.blown_up", rr.blown_up);
    r.set("flags.t0_reached", rr.t0.has_value());
    if (rr.t0) {
        r.set("flags.t0", *rr.t0);
    } else {
        r.set("flags.t0", "not reached");
    }
    r.set("run.steps", rr.steps);
    r.set("run.final_time", rr.final_state.time);
    r.set("run.samples", rr.series.size());
    r.set("run.blowup_threshold", resolved_blowup_threshold(cfg.solver, eq.u_star));
    r.set("run.max_u_inf", rr.max_u_inf);

    const ConservationAudit cons = audit_conservation(rr.series, cfg.audit.conservation_tol);
    bool w_mono = true;
    for (std::size_t i = 1; i < rr.samples.size(); ++i) w_mono = w_mono && rr.samples[i].w_inf <= rr.samples[i - 1].w_inf;
    const double step_drift_u = rr.max_step_drift_u / (std::abs(integral(q0.quad.u)) > 0 ? integral(q0.quad.u) : 1.0);
    const double mvw0 = integral(q0.quad.v) + integral(q0.quad.w);
    const double step_drift_vw = rr.max_step_drift_vw / (mvw0 > 0 ? mvw0 : 1.0);
    const bool cons_pass = cons.pass && w_mono && rr.min_over_steps >= 0.0;
    r.set("conservation.drift_u", cons.drift_u);
    r.set("conservation.drift_vw", cons.drift_vw);
    r.set("conservation.max_step_drift_u", step_drift_u);
    r.set("conservation.max_step_drift_vw", step_drift_vw);
    r.set("conservation.w_inf_nonincreasing", w_mono);
    r.set("conservation.min_over_steps", rr.min_over_steps);
    r.set("conservation.pass", cons_pass);

    if (rr.blown_up) {
        r.set("audit.status", "skipped: blow-up proxy exceeded");
        out.exit_code = exit_blowup;
        r.set("exit_code", out.exit_code);
        return out;
    }

    bool all_pass = cons_pass;
    if (q0.degenerate) {
        r.set("rates.status", "skipped: u0 vanishes identically, decay bounds are vacuous");
        r.set("envelope.status", "skipped: u0 vanishes identically");
    } else {
        const RateBounds bounds = theoretical_rates(lambda1, eq.u_star);
        report_rate_bounds(r, "rates.bound", bounds);
        const double scale = std::max({eq.u_star, eq.v_star, max_abs(q0.quad.w), 1.0});
        const RateAudit ra = audit_rates(rr.series, bounds, cfg.audit, scale);
        r.merge("rates", ra.report);
        r.set("rates.pass", ra.pass);
        all_pass = all_pass && ra.pass;

        if (!rr.t0) {
            r.set("envelope.status", "t0 not reached");
        } else {
            const KChoice kc = choose_k(d, cfg.theory, cfg.seed);
            r.set("k.safety_factor", cfg.theory.k_safety);
            r.set("k.note", "estimated k are sample suprema, i.e. lower bounds of the true constants");
            for (std::size_t i = 0; i < 4; ++i) {
                const std::string key = "k.k" + std::to_string(i + 1);
                r.set(key + ".source", kc.fixed[i] ? "config" : "estimated");
                if (!kc.fixed[i]) r.set(key + ".estimate", kc.estimate[i]);
                r.set(key + ".value", kc.k[i]);
            }
            EnvelopeInputs in;
            in.k = kc.k;
            in.lambda1 = lambda1;
            in.ubar0 = eq.u_star;
            in.vbar0 = mean(q0.quad.v);
            in.wbar0 = mean(q0.quad.w);
            in.w0_inf = max_abs(q0.quad.w);
            in.p = cfg.effective_p();
            in.grad_v_t0 = gradient_norm(rr.state_at_t0->v, in.p);
            in.measure = d.measure();
            in.t0 = *rr.t0;
            const EnvelopeBounds env = envelope_coefficients(in);
            report_envelope(r, "envelope", in, env);
            const EnvelopeVerdict ev = envelope_check(rr.series, env, bounds);
            r.set("envelope.samples_checked", ev.samples_checked);
            for (std::size_t f = 0; f < 4; ++f) {
                r.set(std::string("envelope.") + field_names[f] + ".pass", ev.pass[f]);
                r.set(std::string("envelope.") + field_names[f] + ".worst_margin", ev.worst_margin[f]);
            }
            r.set("envelope.pass", ev.all_pass());
            all_pass = all_pass && ev.all_pass();
        }
    }
    r.set("audit.status", all_pass ? "pass" : "fail");
    out.exit_code = all_pass ? exit_success : exit_audit_failure;
    r.set("exit_code", out.exit_code);
    return out;
}

// ---------------------------------------------------------------------------
// bounds

inline Report cmd_bounds(const EnvelopeInputs& in) {
    Report r;
    const RateBounds b = theoretical_rates(in.lambda1, in.ubar0);
    report_rate_bounds(r, "rates", b);
    const EnvelopeBounds e = envelope_coefficients(in);
    report_envelope(r, "envelope", in, e);
    report_formulas(r, "formula");
    return r;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
    double scale = 0.0;
    std::string status = "ok";  // ok | blown_up | failed: <reason>
    SmallnessResult smallness;
    double max_u_inf = 0.0;
    std::optional<double> time_to_converge;
    bool blown_up = false;
};

/// Data at scale s: u0 -> s u0, z0 -> s z0, v0 -> mean(v0) + s (v0 - mean(v0)); w0 unchanged.
inline FieldQuad scaled_initial(const FieldQuad& q, double s) {
    FieldQuad out = q;
    const double vm = mean(q.v);
    for (std::size_t k = 0; k < q.u.size(); ++k) {
        out.u[k] = s * q.u[k];
        out.z[k] = s * q.z[k];
        out.v[k] = vm + s * (q.v[k] - vm);
    }
    return out;
}

inline SweepRow sweep_row(const ExperimentConfig& cfg, const FieldQuad& base, double s) {
    SweepRow row;
    row.scale = s;
    try {
        const FieldQuad q = scaled_initial(base, s);
        row.smallness = smallness_check(q.u, q.z, q.v, cfg.theory.n_effective, cfg.theory.smallness_eps);
        const RunResult rr = run(q, cfg.solver);
        row.max_u_inf = rr.max_u_inf;
        row.blown_up = rr.blown_up;
        if (rr.blown_up) row.status = "blown_up";
        for (const Diagnostics& dg : rr.samples) {
            if (dg.dist.u < 1e-4 && dg.dist.v < 1e-4 && dg.dist.w < 1e-4 && dg.dist.z < 1e-4) {
                row.time_to_converge = dg.time;
                break;
            }
        }
    } catch (const Error& e) {
        row.status = std::string("failed: ") + e.what();
    }
    return row;
}

inline std::size_t sweep_threads(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("CHEMOLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return std::min(n, std::max<std::size_t>(jobs, 1));
}

/// One independent run per scale; rows come back in scale order whatever the
/// completion order.
inline std::vector<SweepRow> cmd_sweep(const ExperimentConfig& cfg, const std::vector<double>& scales) {
    for (double s : scales) {
        if (!(s >= 0.0) || !std::isfinite(s)) throw Error(ErrorKind::ConfigError, "sweep scales must be >= 0");
    }
    const FieldQuad base = build_initial(cfg).quad;
    std::vector<SweepRow> rows(scales.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < scales.size();) rows[i] = sweep_row(cfg, base, scales[i]);
    };
    std::vector<std::thread> pool;
    const std::size_t threads = sweep_threads(scales.size());
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "scale,status,u_small,z_small,grad_v_small,u_norm,z_norm,grad_v_norm,max_u_inf,time_to_converge,blown_up\n";
    for (const SweepRow& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        std::replace(status.begin(), status.end(), '"', '\'');
        out += format_double(r.scale) + ",\"" + status + "\"," + (r.smallness.u_small ? "true" : "false") + "," +
               (r.smallness.z_small ? "true" : "false") + "," + (r.smallness.grad_v_small ? "true" : "false") + "," +
               format_double(r.smallness.u_norm) + "," + format_double(r.smallness.z_norm) + "," +
               format_double(r.smallness.grad_v_norm) + "," + format_double(r.max_u_inf) + "," +
               (r.time_to_converge ? format_double(*r.time_to_converge) : std::string("never")) + "," +
               (r.blown_up ? "true" : "false") + "\n";
    }
    return out;
}

inline Report sweep_report(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
    Report r;
    report_config(r, cfg);
    r.set("sweep.rows", rows.size());
    r.set("sweep.n_effective", cfg.theory.n_effective);
    r.set("sweep.eps", cfg.theory.smallness_eps);
    r.set("sweep.scaling", "u0 -> s u0, z0 -> s z0, v0 -> mean(v0) + s (v0 - mean(v0)), w0 fixed");
    bool monotone = true;
    std::string violations;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const bool ordered = rows[i].scale >= rows[i - 1].scale;
        const bool ok = rows[i].status.rfind("failed", 0) != 0 && rows[i - 1].status.rfind("failed", 0) != 0;
        if (ordered && ok && rows[i].max_u_inf < rows[i - 1].max_u_inf) {
            monotone = false;
            violations += (violations.empty() ? "" : ";") + std::to_string(i);
        }
    }
    r.set("sweep.max_u_inf_nondecreasing", monotone);
    r.set("sweep.max_u_inf_violations", violations.empty() ? std::string("none") : violations);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string key = "sweep.row" + std::to_string(i);
        const SweepRow& row = rows[i];
        r.set(key + ".scale", row.scale);
        r.set(key + ".status", row.status);
        r.set(key + ".u_small", row.smallness.u_small);
        r.set(key + ".z_small", row.smallness.z_small);
        r.set(key + ".grad_v_small", row.smallness.grad_v_small);
        r.set(key + ".max_u_inf", row.max_u_inf);
        if (row.time_to_converge) {
            r.set(key + ".time_to_converge", *row.time_to_converge);
        } else {
            r.set(key + ".time_to_converge", "never");
        }
        r.set(key + ".blown_up", row.blown_up);
    }
    return r;
}

// ---------------------------------------------------------------------------
// rates (re-audit a CSV)

struct RatesOutcome {
    Report report;
    int exit_code = exit_success;
};

inline RatesOutcome cmd_rates(const TimeSeries& ts, double lambda1, double ubar0, const AuditConfig& ac) {
    RatesOutcome out;
    Report& r = out.report;
    r.set("input.lambda1", lambda1);
    r.set("input.ubar0", ubar0);
    r.set("input.samples", ts.size());
    r.set("config.audit.slack", ac.slack);
    r.set("config.audit.floor", ac.floor);
    r.set("config.audit.window", ac.window);
    const ConservationAudit cons = audit_conservation(ts, ac.conservation_tol);
    r.set("conservation.drift_u", cons.drift_u);
    r.set("conservation.drift_vw", cons.drift_vw);
    r.set("conservation.min_sample", cons.min_sample);
    r.set("conservation.pass", cons.pass);
    const RateBounds bounds = theoretical_rates(lambda1, ubar0);
    report_rate_bounds(r, "rates.bound", bounds);
    double scale = std::max(ubar0, 1.0);
    const RateAudit ra = audit_rates(ts, bounds, ac, scale);
    r.merge("rates", ra.report);
    r.set("rates.pass", ra.pass);
    const bool pass = cons.pass && ra.pass;
    r.set("audit.status", pass ? "pass" : "fail");
    out.exit_code = pass ? exit_success : exit_audit_failure;
    r.set("exit_code", out.exit_code);
    return out;
}

// ---------------------------------------------------------------------------
// semigroup-check

struct SemigroupOutcome {
    Report report;
    int exit_code = exit_success;
};

inline SemigroupOutcome cmd_semigroup_check(const Domain& d, const std::vector<SmoothingEstimateKind>& kinds,
                                            std::size_t samples, std::uint64_t seed) {
    for (const auto& k : kinds) k.validate();
    SemigroupOutcome out;
    Report& r = out.report;
    r.set("domain.dims", d.dims());
    r.set("domain.lx", d.length(0));
    if (d.dims() == 2) r.set("domain.ly", d.length(1));
    r.set("domain.nx", d.cells(0));
    if (d.dims() == 2) r.set("domain.ny", d.cells(1));
    r.set("lambda1_discrete", lambda1_discrete(d));
    r.set("samples", samples);
    r.set("seed", Report::Value(seed));
    r.set("note", "estimates are sample suprema, i.e. lower bounds of the true constants");
    const auto tg = default_t_grid(lambda1_discrete(d));
    bool all_finite = true;
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        const auto& k = kinds[i];
        const std::string key = "probe" + std::to_string(i);
        r.set(key + ".kind", to_string(k.kind));
        r.set(key + ".p", k.p);
        r.set(key + ".q", k.q);
        r.set(key + ".time_power", k.power(d.dims()));
        try {
            const SmoothingReport rep = estimate_k(k, d, samples, tg, probe_seed(seed, i));
            const bool finite = std::isfinite(rep.estimated_constant);
            r.set(key + ".estimate", rep.estimated_constant);
            r.set(key + ".worst_field", rep.worst_field);
            r.set(key + ".worst_t", rep.worst_t);
            r.set(key + ".finite", finite);
            all_finite = all_finite && finite;
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::NumericalFailure) throw;
            r.set(key + ".finite", false);
            r.set(key + ".detail", e.what());
            all_finite = false;
        }
    }
    r.set("all_finite", all_finite);
    out.exit_code = all_finite ? exit_success : exit_audit_failure;
    r.set("exit_code", out.exit_code);
    return out;
}

}  // namespace chemolab
