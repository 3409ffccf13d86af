#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "chemolab/error.hpp"
#include "chemolab/grid.hpp"

namespace chemolab {

inline constexpr double infinity = std::numeric_limits<double>::infinity();

/// Tumor cells u, active ECM v, ECM w, enzymes z at one time.
struct FieldQuad {
    GridField u, v, w, z;
    double time = 0.0;

    FieldQuad() = default;
    FieldQuad(GridField u_, GridField v_, GridField w_, GridField z_, double t = 0.0)
        : u(std::move(u_)), v(std::move(v_)), w(std::move(w_)), z(std::move(z_)), time(t) {
        if (!(u.domain == v.domain && u.domain == w.domain && u.domain == z.domain)) {
            throw Error(ErrorKind::InvalidParameters, "fields of a quad must share one domain");
        }
    }

    /// Spatially constant data.
    static FieldQuad constant(const Domain& d, double u0, double v0, double w0, double z0) {
        return {GridField(d, u0), GridField(d, v0), GridField(d, w0), GridField(d, z0)};
    }

    const Domain& domain() const { return u.domain; }

    std::array<const GridField*, 4> fields() const { return {&u, &v, &w, &z}; }
};

inline constexpr std::array<const char*, 4> field_names = {"u", "v", "w", "z"};

struct Equilibrium {
    double u_star = 0.0;
    double v_star = 0.0;
    double w_star = 0.0;
    double z_star = 0.0;
};

struct ValidatedQuad {
    FieldQuad quad;
    /// u0 vanishes identically: ubar0 = 0 and the decay-rate bounds are vacuous.
    bool degenerate = false;
};

/// Rejects negative or non-finite initial values, naming the field and cell.
inline ValidatedQuad validate_initial(const FieldQuad& q) {
    const auto fs = q.fields();
    for (std::size_t f = 0; f < fs.size(); ++f) {
        const auto& vals = fs[f]->values;
        if (vals.size() != q.domain().size()) {
            throw Error(ErrorKind::InvalidInitialData, std::string(field_names[f]) + "0 has the wrong size");
        }
        for (std::size_t k = 0; k < vals.size(); ++k) {
            if (!std::isfinite(vals[k]) || vals[k] < 0.0) {
                throw Error(ErrorKind::InvalidInitialData, std::string(field_names[f]) + "0 at cell " +
                                                               std::to_string(k) + " is " + std::to_string(vals[k]) +
                                                               " (must be finite and >= 0)");
            }
        }
    }
    const bool degenerate = std::all_of(q.u.values.begin(), q.u.values.end(), [](double x) { return x == 0.0; });
    return {q, degenerate};
}

/// Midpoint-rule integral over the domain.
inline double integral(const GridField& f) {
    double s = 0.0;
    for (double x : f.values) s += x;
    return s * f.domain.cell_volume();
}

inline double mean(const GridField& f) { return integral(f) / f.domain.measure(); }

inline double max_abs(const GridField& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
}

inline double min_value(const GridField& f) { return *std::min_element(f.values.begin(), f.values.end()); }
inline double max_value(const GridField& f) { return *std::max_element(f.values.begin(), f.values.end()); }

namespace detail {

inline void check_exponent(double p) {
    if (!(p >= 1.0)) throw Error(ErrorKind::InvalidExponent, "L^p exponent must be >= 1, got " + std::to_string(p));
}

// Scaled by the max so large p cannot overflow.
template <class Range>
double scaled_pnorm(const Range& values, double p, double weight) {
    double m = 0.0;
    for (double x : values) m = std::max(m, std::abs(x));
    if (m == 0.0) return 0.0;
    if (std::isinf(p)) return m;
    double s = 0.0;
    for (double x : values) s += std::pow(std::abs(x) / m, p);
    return m * std::pow(s * weight, 1.0 / p);
}

}  // namespace detail

/// Discrete L^p(Omega) norm; p = infinity gives the max norm.
inline double lp_norm(const GridField& f, double p) {
    detail::check_exponent(p);
    return detail::scaled_pnorm(f.values, p, f.domain.cell_volume());
}

/// L^p norm of a face field: every interior face carries one cell volume, and
/// the axis contributions are combined in l^p.
inline double lp_norm(const FaceField& g, double p) {
    detail::check_exponent(p);
    const Domain& d = g.domain;
    std::vector<double> all;
    all.reserve(d.face_count(0) + (d.dims() == 2 ? d.face_count(1) : 0));
    for (int a = 0; a < d.dims(); ++a) all.insert(all.end(), g.axis[a].begin(), g.axis[a].end());
    return detail::scaled_pnorm(all, p, d.cell_volume());
}

/// ||grad f||_{L^p} from face differences.
inline double gradient_norm(const GridField& f, double p) { return lp_norm(gradient_faces(f), p); }

/// max_faces |grad f|
inline double max_gradient(const GridField& f) { return gradient_norm(f, infinity); }

/// Discrete W^{1,inf} proxy: ||f||_inf + max_faces |grad f|.
inline double w1inf_norm(const GridField& f) { return max_abs(f) + max_gradient(f); }

inline Equilibrium equilibrium_of(const FieldQuad& q0) {
    const double ubar = mean(q0.u);
    return {ubar, mean(q0.v) + mean(q0.w), 0.0, ubar};
}

struct EquilibriumDistance {
    double u = 0.0, v = 0.0, w = 0.0, z = 0.0;
};

/// Sup-norm distances of each field to the constant equilibrium.
inline EquilibriumDistance distance_to_equilibrium(const FieldQuad& q, const Equilibrium& e) {
    auto dist = [](const GridField& f, double c) {
        double m = 0.0;
        for (double x : f.values) m = std::max(m, std::abs(x - c));
        return m;
    };
    return {dist(q.u, e.u_star), dist(q.v, e.v_star), dist(q.w, e.w_star), dist(q.z, e.z_star)};
}

}  // namespace chemolab
