#pragma once

// IMEX time stepping of the four-field tumor invasion system
//
//   u_t = Delta u - div(u grad v)
//   v_t = Delta v + w z
//   w_t = -w z
//   z_t = Delta z - z + u
//
// with zero-flux boundaries. Diffusion and the z decay are implicit,
// chemotaxis and the u -> z source are explicit, w is updated exactly.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "chemolab/error.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/rates.hpp"
#include "chemolab/state.hpp"

namespace chemolab {

struct SolverConfig {
    double t_end = 10.0;
    double dt_max = 1e-2;
    double cfl_safety = 0.5;
    double tol_lin = 1e-12;
    double sample_every = 0.1;
    /// Absolute cap on ||u||_inf + ||v||_{W^{1,inf}} + ||z||_inf. Zero means
    /// 1e6 * ubar0 (or 1e6 when ubar0 = 0).
    double blowup_threshold = 0.0;
    /// The criterion monitor tracks ||u||_{L^{n/4 + eps}}.
    double criterion_epsilon = 0.75;

    void validate() const {
        auto bad = [](const std::string& what) { throw Error(ErrorKind::InvalidParameters, what); };
        if (!(t_end > 0.0)) bad("t_end must be > 0");
        if (!(dt_max > 0.0)) bad("dt_max must be > 0");
        if (!(cfl_safety > 0.0 && cfl_safety <= 1.0)) bad("cfl_safety must be in (0, 1]");
        if (!(tol_lin > 0.0)) bad("tol_lin must be > 0");
        if (!(sample_every > 0.0)) bad("sample_every must be > 0");
        if (blowup_threshold < 0.0) bad("blowup_threshold must be >= 0");
        if (!(criterion_epsilon > 0.0)) bad("criterion_epsilon must be > 0");
    }
};

struct Diagnostics {
    double time = 0.0;
    EquilibriumDistance dist;
    double mass_u = 0.0;
    double mass_vw = 0.0;
    double min_all = 0.0;
    double w_inf = 0.0;
    double criterion_norm = 0.0;  // ||u||_{L^{n/4 + eps}}
    double v_w1inf = 0.0;
    double z_inf = 0.0;
    bool blown_up = false;
    bool t0_reached = false;
};

/// Raised when a step produces NaN/Inf or a materially negative value.
class NumericalFailure : public Error {
public:
    NumericalFailure(const std::string& what, FieldQuad last_good)
        : Error(ErrorKind::NumericalFailure, what), last_good_(std::move(last_good)) {}

    const FieldQuad& last_good() const { return last_good_; }

private:
    FieldQuad last_good_;
};

inline double resolved_blowup_threshold(const SolverConfig& cfg, double ubar0) {
    if (cfg.blowup_threshold > 0.0) return cfg.blowup_threshold;
    return ubar0 > 0.0 ? 1e6 * ubar0 : 1e6;
}

/// Advective step limit: dt_max capped by safety * min_a h_a / (2 n max|grad v| + 1e-14).
/// A donor cell has 2n faces, so the n factor bounds its total outflow.
inline double cfl_dt(const FieldQuad& q, const SolverConfig& cfg) {
    const Domain& d = q.domain();
    const double g = max_gradient(q.v);
    double h = d.spacing(0);
    if (d.dims() == 2) h = std::min(h, d.spacing(1));
    const double adv = cfg.cfl_safety * h / (2.0 * d.dims() * g + 1e-14);
    return std::min(cfg.dt_max, adv);
}

/// Full step limit: cfl_dt and dt <= 0.5 / max z for the explicit sources.
inline double stable_dt(const FieldQuad& q, const SolverConfig& cfg) {
    const double zmax = max_value(q.z);
    double dt = cfl_dt(q, cfg);
    if (zmax > 0.0) dt = std::min(dt, 0.5 / zmax);
    return dt;
}

/// Donor-cell chemotactic flux u_face * grad v at interior faces.
inline FaceField chemotactic_flux(const GridField& u, const GridField& v) {
    const Domain& d = u.domain;
    FaceField flux = gradient_faces(v);
    const std::size_t nx = d.cells(0), ny = d.cells(1);
    auto upwind = [](double g, double lower, double upper) {
        // Mass moves toward higher v; the donor is the cell it leaves.
        if (g > 0.0) return g * lower;
        if (g < 0.0) return g * upper;
        return 0.0;
    };
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 1; i < nx; ++i) flux.x(i, j) = upwind(flux.x(i, j), u.at(i - 1, j), u.at(i, j));
    }
    if (d.dims() == 2) {
        for (std::size_t j = 1; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) flux.y(i, j) = upwind(flux.y(i, j), u.at(i, j - 1), u.at(i, j));
        }
    }
    return flux;
}

namespace detail {

// Round-off from the 2D cosine-basis solve can leave values like -1e-18 where
// the solution is zero; anything larger is a real failure.
inline void settle_signs(GridField& f, const char* name, const FieldQuad& last_good) {
    double scale = 0.0;
    for (double x : f.values) {
        if (!std::isfinite(x)) throw NumericalFailure(std::string("non-finite value in ") + name, last_good);
        scale = std::max(scale, std::abs(x));
    }
    const double tiny = 1e-13 * scale;
    for (double& x : f.values) {
        if (x < 0.0) {
            if (x < -tiny) {
                throw NumericalFailure(std::string("negative value ") + std::to_string(x) + " in " + name, last_good);
            }
            x = 0.0;
        }
    }
}

}  // namespace detail

/// One IMEX step of length dt.
inline FieldQuad step(const FieldQuad& q, double dt, double tol_lin = 1e-12) {
    if (!(dt > 0.0)) throw Error(ErrorKind::InvalidParameters, "dt must be > 0");
    const Domain& d = q.domain();

    // u: explicit donor-cell chemotaxis, implicit diffusion.
    const GridField div_flux = divergence(chemotactic_flux(q.u, q.v));
    GridField rhs_u = q.u;
    for (std::size_t k = 0; k < rhs_u.size(); ++k) rhs_u[k] -= dt * div_flux[k];

    // w: exact exponential decay; v gains exactly what w loses.
    GridField w_new(d), rhs_v = q.v;
    for (std::size_t k = 0; k < w_new.size(); ++k) {
        w_new[k] = q.w[k] * std::exp(-dt * q.z[k]);
        rhs_v[k] += q.w[k] - w_new[k];
    }

    // z: implicit decay and diffusion, explicit source u^n.
    GridField rhs_z = q.z;
    for (std::size_t k = 0; k < rhs_z.size(); ++k) rhs_z[k] += dt * q.u[k];

    FieldQuad next;
    try {
        next = FieldQuad(solve_helmholtz(dt, rhs_u, tol_lin), solve_helmholtz(dt, rhs_v, tol_lin), std::move(w_new),
                         solve_shifted_helmholtz(dt, dt, rhs_z, tol_lin), q.time + dt);
    } catch (const NumericalFailure&) {
        throw;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::SolverFailure) throw NumericalFailure(e.what(), q);
        throw;
    }
    detail::settle_signs(next.u, "u", q);
    detail::settle_signs(next.v, "v", q);
    detail::settle_signs(next.w, "w", q);
    detail::settle_signs(next.z, "z", q);
    return next;
}

inline double criterion_exponent(const Domain& d, const SolverConfig& cfg) {
    return d.dims() / 4.0 + cfg.criterion_epsilon;
}

/// ubar0/2 <= u, z <= 3 ubar0/2 everywhere.
inline bool in_t0_bracket(const FieldQuad& q, double ubar0) {
    if (!(ubar0 > 0.0)) return false;
    const double lo = 0.5 * ubar0, hi = 1.5 * ubar0;
    return min_value(q.u) >= lo && max_value(q.u) <= hi && min_value(q.z) >= lo && max_value(q.z) <= hi;
}

inline Diagnostics monitor(const FieldQuad& q, const SolverConfig& cfg, const Equilibrium& e) {
    Diagnostics dg;
    dg.time = q.time;
    dg.dist = distance_to_equilibrium(q, e);
    dg.mass_u = integral(q.u);
    dg.mass_vw = integral(q.v) + integral(q.w);
    dg.min_all = std::min({min_value(q.u), min_value(q.v), min_value(q.w), min_value(q.z)});
    dg.w_inf = max_abs(q.w);
    dg.criterion_norm = lp_norm(q.u, criterion_exponent(q.domain(), cfg));
    dg.v_w1inf = w1inf_norm(q.v);
    dg.z_inf = max_abs(q.z);
    dg.blown_up = max_abs(q.u) + dg.v_w1inf + dg.z_inf > resolved_blowup_threshold(cfg, e.u_star);
    dg.t0_reached = in_t0_bracket(q, e.u_star);
    return dg;
}

struct RunResult {
    FieldQuad final_state;
    Equilibrium equilibrium;
    std::vector<Diagnostics> samples;
    TimeSeries series;
    bool blown_up = false;
    std::optional<double> t0;
    std::optional<FieldQuad> state_at_t0;
    std::size_t steps = 0;
    /// Smallest field value seen after any step.
    double min_over_steps = 0.0;
    /// Largest per-step change of the integrals of u and v + w.
    double max_step_drift_u = 0.0;
    double max_step_drift_vw = 0.0;
    /// Largest ||u||_inf seen at any step.
    double max_u_inf = 0.0;
};

namespace detail {

inline void record(RunResult& r, const Diagnostics& dg) {
    r.samples.push_back(dg);
    TimeSeries& ts = r.series;
    ts.times.push_back(dg.time);
    ts.dist[0].push_back(dg.dist.u);
    ts.dist[1].push_back(dg.dist.v);
    ts.dist[2].push_back(dg.dist.w);
    ts.dist[3].push_back(dg.dist.z);
    ts.mass_u.push_back(dg.mass_u);
    ts.mass_vw.push_back(dg.mass_vw);
    ts.min_all.push_back(dg.min_all);
    ts.criterion_norm.push_back(dg.criterion_norm);
}

}  // namespace detail

/// Integrates from q0 to cfg.t_end, sampling diagnostics every
/// cfg.sample_every. Stops early (blown_up = true) when the extendibility
/// proxy exceeds the threshold.
inline RunResult run(const FieldQuad& q0, const SolverConfig& cfg) {
    cfg.validate();
    const ValidatedQuad valid = validate_initial(q0);
    RunResult r;
    r.equilibrium = equilibrium_of(valid.quad);
    FieldQuad q = valid.quad;
    q.time = 0.0;

    const double threshold = resolved_blowup_threshold(cfg, r.equilibrium.u_star);
    r.min_over_steps = std::min({min_value(q.u), min_value(q.v), min_value(q.w), min_value(q.z)});
    r.max_u_inf = max_abs(q.u);

    auto observe = [&](const FieldQuad& s) {
        Diagnostics dg = monitor(s, cfg, r.equilibrium);
        if (r.blown_up) dg.blown_up = true;
        if (!r.t0 && dg.t0_reached) {
            r.t0 = dg.time;
            r.series.t0 = dg.time;
            r.state_at_t0 = s;
        }
        if (r.t0) dg.t0_reached = true;
        detail::record(r, dg);
        return dg;
    };

    observe(q);
    std::size_t next_index = 1;
    const double eps_t = 1e-12 * cfg.t_end;
    while (q.time < cfg.t_end - eps_t) {
        const double next_sample = std::min(cfg.sample_every * static_cast<double>(next_index), cfg.t_end);
        double dt = stable_dt(q, cfg);
        bool hits_sample = false;
        if (q.time + dt >= next_sample - eps_t) {
            dt = next_sample - q.time;
            hits_sample = true;
        }
        const double mu = integral(q.u), mvw = integral(q.v) + integral(q.w);
        FieldQuad next = step(q, dt, cfg.tol_lin);
        if (hits_sample) next.time = next_sample;
        q = std::move(next);
        ++r.steps;

        r.min_over_steps = std::min({r.min_over_steps, min_value(q.u), min_value(q.v), min_value(q.w), min_value(q.z)});
        r.max_step_drift_u = std::max(r.max_step_drift_u, std::abs(integral(q.u) - mu));
        r.max_step_drift_vw = std::max(r.max_step_drift_vw, std::abs(integral(q.v) + integral(q.w) - mvw));
        r.max_u_inf = std::max(r.max_u_inf, max_abs(q.u));

        const bool blown = max_abs(q.u) + w1inf_norm(q.v) + max_abs(q.z) > threshold;
        if (blown) r.blown_up = true;
        if (hits_sample || blown) {
            observe(q);
            if (hits_sample) ++next_index;
        }
        if (blown) break;
    }
    r.final_state = std::move(q);
    return r;
}

}  // namespace chemolab
