#pragma once

// Spectral Neumann heat semigroup on the grid and numerical probes of the
// L^p-L^q smoothing estimates
//
//   ||e^{t Delta} f||_p          <= k1 (1 + t^{-n/2 (1/q - 1/p)})       e^{-lambda1 t} ||f||_q   (mean-zero f)
//   ||grad e^{t Delta} f||_p     <= k2 (1 + t^{-1/2 - n/2 (1/q - 1/p)}) e^{-lambda1 t} ||f||_q
//   ||grad e^{t Delta} f||_p     <= k3 (1 + t^{-n/2 (1/q - 1/p)})       e^{-lambda1 t} ||grad f||_q
//   ||e^{t Delta} div f||_p      <= k4 (1 + t^{-1/2 - n/2 (1/q - 1/p)}) e^{-lambda1 t} ||f||_q
//
// The probes return sup-ratios over finite test sets, i.e. lower bounds on k_i.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "chemolab/error.hpp"
#include "chemolab/grid.hpp"
#include "chemolab/quadrature.hpp"
#include "chemolab/random.hpp"
#include "chemolab/state.hpp"

namespace chemolab {

/// Applies e^{t Delta_h} through the tensor-product cosine eigenbasis.
class HeatPropagator {
public:
    explicit HeatPropagator(const Domain& d) : domain_(d), bx_(d.cells(0), d.spacing(0)) {
        if (d.dims() == 2) by_ = CosineBasis(d.cells(1), d.spacing(1));
    }

    const Domain& domain() const { return domain_; }

    /// Cosine coefficients of f (orthonormal basis).
    std::vector<double> forward(const GridField& f) const {
        std::vector<double> c = f.values;
        detail::for_each_line(domain_, 0, c, [&](std::size_t, auto in, auto out) { bx_.forward(in, out); });
        if (domain_.dims() == 2) {
            detail::for_each_line(domain_, 1, c, [&](std::size_t, auto in, auto out) { by_.forward(in, out); });
        }
        return c;
    }

    GridField inverse(std::vector<double> c) const {
        if (domain_.dims() == 2) {
            detail::for_each_line(domain_, 1, c, [&](std::size_t, auto in, auto out) { by_.inverse(in, out); });
        }
        detail::for_each_line(domain_, 0, c, [&](std::size_t, auto in, auto out) { bx_.inverse(in, out); });
        return GridField(domain_, std::move(c));
    }

    /// Eigenvalue of -Delta_h for coefficient slot k.
    double eigenvalue(std::size_t k) const {
        const std::size_t nx = domain_.cells(0);
        const double mx = bx_.eigenvalues[k % nx];
        return domain_.dims() == 2 ? mx + by_.eigenvalues[k / nx] : mx;
    }

    std::vector<double> decay(const std::vector<double>& coef, double t) const {
        std::vector<double> out(coef.size());
        for (std::size_t k = 0; k < coef.size(); ++k) out[k] = coef[k] * std::exp(-eigenvalue(k) * t);
        // The constant mode is untouched, so the mean is preserved exactly.
        out[0] = coef[0];
        return out;
    }

    GridField propagate(const GridField& f, double t) const {
        if (t < 0.0) throw Error(ErrorKind::InvalidParameters, "heat propagation time must be >= 0");
        if (t == 0.0) return f;
        GridField out = inverse(decay(forward(f), t));
        // Restore the mean bit-for-bit lost in the round trip.
        const double shift = mean(f) - mean(out);
        for (double& x : out.values) x += shift;
        return out;
    }

private:
    Domain domain_;
    CosineBasis bx_;
    CosineBasis by_;
};

inline GridField heat_propagate(const GridField& f, double t) { return HeatPropagator(f.domain).propagate(f, t); }

enum class SmoothingKind {
    MeanZero,              // (i)   Lp from Lq, mean-zero f
    Gradient,              // (ii)  grad Lp from Lq
    GradientFromGradient,  // (iii) grad Lp from grad Lq
    Divergence,            // (iv)  Lp from div of a vector field
};

inline const char* to_string(SmoothingKind k) {
    switch (k) {
        case SmoothingKind::MeanZero: return "i";
        case SmoothingKind::Gradient: return "ii";
        case SmoothingKind::GradientFromGradient: return "iii";
        case SmoothingKind::Divergence: return "iv";
    }
    return "?";
}

inline SmoothingKind parse_smoothing_kind(const std::string& s) {
    if (s == "i" || s == "1") return SmoothingKind::MeanZero;
    if (s == "ii" || s == "2") return SmoothingKind::Gradient;
    if (s == "iii" || s == "3") return SmoothingKind::GradientFromGradient;
    if (s == "iv" || s == "4") return SmoothingKind::Divergence;
    throw Error(ErrorKind::InvalidKind, "unknown smoothing kind '" + s + "'");
}

struct SmoothingEstimateKind {
    SmoothingKind kind = SmoothingKind::MeanZero;
    double p = 2.0;
    double q = 2.0;

    /// Exponent constraints: (i),(ii) 1<=q<=p<=inf; (iii) 2<=q<=p<inf; (iv) 1<q<=p<=inf.
    void validate() const {
        auto fail = [&](const char* rule) {
            throw Error(ErrorKind::InvalidKind, std::string("kind ") + to_string(kind) + " requires " + rule +
                                                    " (p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
        };
        if (!(q <= p)) fail("q <= p");
        switch (kind) {
            case SmoothingKind::MeanZero:
            case SmoothingKind::Gradient:
                if (!(q >= 1.0)) fail("1 <= q <= p <= inf");
                break;
            case SmoothingKind::GradientFromGradient:
                if (!(q >= 2.0) || std::isinf(p)) fail("2 <= q <= p < inf");
                break;
            case SmoothingKind::Divergence:
                if (!(q > 1.0)) fail("1 < q <= p <= inf");
                break;
        }
    }

    /// Power of t^{-1} in the (1 + t^{-power}) factor.
    double power(int n) const {
        const double inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; }(q) -
                           [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; }(p);
        const double base = 0.5 * n * inv;
        const bool extra_half = kind == SmoothingKind::Gradient || kind == SmoothingKind::Divergence;
        return extra_half ? 0.5 + base : base;
    }
};

/// Either a scalar test field (kinds i-iii) or a face vector field (kind iv).
struct SmoothingTestField {
    GridField scalar;
    FaceField vector;
    std::string description;
};

/// One ratio LHS / [(1 + t^{-power}) e^{-lambda1 t} RHS] for a given field.
/// Returns nothing useful (0) when the RHS norm vanishes.
inline double smoothing_ratio(const SmoothingEstimateKind& k, const SmoothingTestField& f, double t,
                              const HeatPropagator& heat, double lambda1) {
    k.validate();
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameters, "smoothing ratio needs t > 0");
    const int n = heat.domain().dims();
    double lhs = 0.0, rhs = 0.0;
    switch (k.kind) {
        case SmoothingKind::MeanZero: {
            const double m = mean(f.scalar);
            if (std::abs(m) > 1e-12 * std::max(1.0, max_abs(f.scalar))) {
                throw Error(ErrorKind::InvalidParameters, "kind i requires a mean-zero field (mean = " +
                                                              std::to_string(m) + ")");
            }
            rhs = lp_norm(f.scalar, k.q);
            lhs = lp_norm(heat.propagate(f.scalar, t), k.p);
            break;
        }
        case SmoothingKind::Gradient:
            rhs = lp_norm(f.scalar, k.q);
            lhs = gradient_norm(heat.propagate(f.scalar, t), k.p);
            break;
        case SmoothingKind::GradientFromGradient:
            rhs = gradient_norm(f.scalar, k.q);
            lhs = gradient_norm(heat.propagate(f.scalar, t), k.p);
            break;
        case SmoothingKind::Divergence:
            rhs = lp_norm(f.vector, k.q);
            lhs = lp_norm(heat.propagate(divergence(f.vector), t), k.p);
            break;
    }
    if (rhs == 0.0) return 0.0;
    return lhs / ((1.0 + std::pow(t, -k.power(n))) * std::exp(-lambda1 * t) * rhs);
}

namespace detail {

inline std::size_t structured_count(const Domain& d) {
    // modes per axis, point masses, steps
    const std::size_t modes = 6 * static_cast<std::size_t>(d.dims());
    return modes + 3 + 2;
}

inline GridField point_mass(const Domain& d, std::size_t cell) {
    GridField f(d);
    f[cell] = 1.0 / d.cell_volume();
    return f;
}

inline GridField step_field(const Domain& d, double frac) {
    return sample(d, [&](double x, auto... rest) {
        (void)sizeof...(rest);
        return x < frac * d.length(0) ? 1.0 : 0.0;
    });
}

inline void remove_mean(GridField& f) {
    const double m = mean(f);
    for (double& x : f.values) x -= m;
}

/// Scalar test field number `index`. The first structured_count(d) entries
/// are deterministic extremal candidates; the rest are random.
inline SmoothingTestField scalar_test_field(const Domain& d, std::size_t index, std::uint64_t seed) {
    SmoothingTestField out;
    const std::size_t modes = 6;
    std::size_t idx = index;
    if (idx < modes * static_cast<std::size_t>(d.dims())) {
        const int axis = static_cast<int>(idx / modes);
        const int n = static_cast<int>(d.cells(axis));
        const int wavenumbers[modes] = {1, 2, 3, n / 4, n / 2, n - 1};
        const int kk = wavenumbers[idx % modes];
        out.scalar = cosine_mode(d, kk, axis);
        out.description = "cos mode k=" + std::to_string(kk) + " axis " + std::to_string(axis);
        return out;
    }
    idx -= modes * static_cast<std::size_t>(d.dims());
    if (idx < 3) {
        const std::size_t cells[3] = {0, d.size() / 2 + d.cells(0) / 2, d.size() - 1};
        out.scalar = point_mass(d, cells[idx]);
        out.description = "point mass at cell " + std::to_string(cells[idx]);
        return out;
    }
    idx -= 3;
    if (idx < 2) {
        const double frac = idx == 0 ? 0.5 : 0.125;
        out.scalar = step_field(d, frac);
        out.description = "step at x=" + std::to_string(frac) + "L";
        return out;
    }
    CounterStream rng(seed, index);
    GridField f(d);
    if (index % 2 == 0) {
        // rough: iid uniform values
        for (double& x : f.values) x = rng.uniform(-1.0, 1.0);
        out.description = "random iid #" + std::to_string(index);
    } else {
        // smooth: a few low cosine modes with random amplitudes
        for (int m = 1; m <= 8; ++m) {
            const int axis = d.dims() == 2 && rng.uniform() < 0.5 ? 1 : 0;
            const double amp = rng.uniform(-1.0, 1.0) / m;
            const GridField mode = cosine_mode(d, m, axis);
            for (std::size_t c = 0; c < f.size(); ++c) f[c] += amp * mode[c];
        }
        out.description = "random smooth #" + std::to_string(index);
    }
    out.scalar = std::move(f);
    return out;
}

inline SmoothingTestField vector_test_field(const Domain& d, std::size_t index, std::uint64_t seed) {
    SmoothingTestField out;
    out.vector = FaceField(d);
    auto zero_boundary = [&](FaceField& g) {
        const std::size_t nx = d.cells(0), ny = d.cells(1);
        for (std::size_t j = 0; j < ny; ++j) g.x(0, j) = g.x(nx, j) = 0.0;
        if (d.dims() == 2) {
            for (std::size_t i = 0; i < nx; ++i) g.y(i, 0) = g.y(i, ny) = 0.0;
        }
    };
    const std::size_t structured = structured_count(d);
    if (index < structured) {
        // gradients of the structured scalar fields plus single-face spikes
        if (index + 3 < structured) {
            const auto s = scalar_test_field(d, index, seed);
            out.vector = gradient_faces(s.scalar);
            out.description = "grad of " + s.description;
        } else {
            const std::size_t which = index + 3 - structured;
            const std::size_t i = which == 0 ? 1 : (which == 1 ? d.cells(0) / 2 : d.cells(0) - 1);
            out.vector.x(i, d.cells(1) / 2) = 1.0;
            out.description = "face spike at x-face " + std::to_string(i);
        }
        return out;
    }
    CounterStream rng(seed, index);
    for (int a = 0; a < d.dims(); ++a) {
        for (double& x : out.vector.axis[a]) x = rng.uniform(-1.0, 1.0);
    }
    zero_boundary(out.vector);
    out.description = "random face field #" + std::to_string(index);
    return out;
}

}  // namespace detail

/// 40 log-spaced times in [1e-3 / lambda1, 20 / lambda1].
inline std::vector<double> default_t_grid(double lambda1, std::size_t points = 40) {
    std::vector<double> t(points);
    const double lo = 1e-3 / lambda1, hi = 20.0 / lambda1;
    for (std::size_t i = 0; i < points; ++i) {
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(points - 1));
    }
    return t;
}

struct SmoothingReport {
    SmoothingEstimateKind kind;
    /// Sup of observed ratios: a lower bound for the true constant.
    double estimated_constant = 0.0;
    std::size_t sample_count = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    std::size_t t_count = 0;
    std::string worst_field;
    double worst_t = 0.0;
};

/// Sup of smoothing ratios over `samples` test fields and all times in t_grid,
/// with lambda1 = lambda1_discrete(domain).
inline SmoothingReport estimate_k(const SmoothingEstimateKind& kind, const Domain& domain, std::size_t samples,
                                  const std::vector<double>& t_grid, std::uint64_t seed = 0) {
    kind.validate();
    if (samples < 1) throw Error(ErrorKind::InvalidParameters, "estimate_k needs at least one sample");
    if (t_grid.empty()) throw Error(ErrorKind::InvalidParameters, "t grid must not be empty");
    for (double t : t_grid) {
        if (!(t > 0.0)) throw Error(ErrorKind::InvalidParameters, "t grid must be positive");
    }
    const HeatPropagator heat(domain);
    const double lambda1 = lambda1_discrete(domain);
    SmoothingReport rep;
    rep.kind = kind;
    rep.sample_count = samples;
    rep.t_min = *std::min_element(t_grid.begin(), t_grid.end());
    rep.t_max = *std::max_element(t_grid.begin(), t_grid.end());
    rep.t_count = t_grid.size();
    for (std::size_t s = 0; s < samples; ++s) {
        SmoothingTestField f = kind.kind == SmoothingKind::Divergence ? detail::vector_test_field(domain, s, seed)
                                                                      : detail::scalar_test_field(domain, s, seed);
        if (kind.kind == SmoothingKind::MeanZero) detail::remove_mean(f.scalar);
        for (double t : t_grid) {
            const double r = smoothing_ratio(kind, f, t, heat, lambda1);
            if (!std::isfinite(r)) {
                throw Error(ErrorKind::NumericalFailure, "non-finite smoothing ratio for " + f.description);
            }
            if (r > rep.estimated_constant) {
                rep.estimated_constant = r;
                rep.worst_field = f.description;
                rep.worst_t = t;
            }
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Algebraic convolution bound:
//   int_0^t (1 + (t-s)^{-alpha}) e^{-gamma (t-s)} (1 + s^{-beta}) e^{-delta s} ds
//     <= C (1 + t^{min{0, 1-alpha-beta}}) e^{-min{gamma, delta} t}

struct ConvolutionOptions {
    double horizon = 0.0;        // 0 -> 20 / min{gamma, delta}
    std::size_t t_points = 400;
    std::size_t panels = 0;      // 0 -> refine until rel_tol; otherwise fixed panels
    double rel_tol = 1e-10;
};

struct ConvolutionResult {
    double sup_ratio = 0.0;
    double argmax_t = 0.0;
};

/// Ratio integral / [(1 + t^{min{0,1-alpha-beta}}) e^{-min{gamma,delta} t}] at one t.
inline double convolution_ratio_at(double alpha, double beta, double gamma, double delta, double t,
                                   const ConvolutionOptions& opt = {}) {
    const double m = std::min(gamma, delta);
    // e^{m t} folded into the integrand: every exponent stays <= 0.
    // Each half is integrated in the variable that vanishes at its singular
    // end, so t - s is never formed by cancellation near s = t.
    auto kernel = [&](double r, double s) {
        return (1.0 + std::pow(r, -alpha)) * (1.0 + std::pow(s, -beta)) *
               std::exp(-(gamma - m) * r - (delta - m) * s);
    };
    auto eval = [&](std::size_t panels) {
        return quad::left_singular([&](double s) { return kernel(t - s, s); }, 0.0, 0.5 * t, beta, panels) +
               quad::left_singular([&](double r) { return kernel(r, t - r); }, 0.0, 0.5 * t, alpha, panels);
    };
    const double integral = opt.panels > 0 ? eval(opt.panels) : quad::refine(eval, opt.rel_tol);
    return integral / (1.0 + std::pow(t, std::min(0.0, 1.0 - alpha - beta)));
}

inline ConvolutionResult convolution_bound_ratio(double alpha, double beta, double gamma, double delta,
                                                 ConvolutionOptions opt = {}) {
    if (!(alpha < 1.0) || !(beta < 1.0) || !(gamma > 0.0) || !(delta > 0.0) || gamma == delta) {
        throw Error(ErrorKind::InvalidParameters,
                    "convolution bound needs alpha < 1, beta < 1, gamma > 0, delta > 0, gamma != delta");
    }
    if (opt.horizon <= 0.0) opt.horizon = 20.0 / std::min(gamma, delta);
    ConvolutionResult best;
    const double lo = opt.horizon * 1e-8;
    std::vector<double> ts(opt.t_points);
    std::size_t arg = 0;
    for (std::size_t i = 0; i < opt.t_points; ++i) {
        ts[i] = lo * std::pow(opt.horizon / lo, static_cast<double>(i) / static_cast<double>(opt.t_points - 1));
        const double r = convolution_ratio_at(alpha, beta, gamma, delta, ts[i], opt);
        if (!std::isfinite(r)) throw Error(ErrorKind::NumericalFailure, "non-finite convolution ratio");
        if (r > best.sup_ratio) {
            best = {r, ts[i]};
            arg = i;
        }
    }
    if (arg > 0 && arg + 1 < opt.t_points) {
        const double a = ts[arg - 1], b = ts[arg + 1];
        double x = a, y = b;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 60; ++it) {
            const double c = y - g * (y - x), d = x + g * (y - x);
            if (convolution_ratio_at(alpha, beta, gamma, delta, c, opt) >
                convolution_ratio_at(alpha, beta, gamma, delta, d, opt)) {
                y = d;
            } else {
                x = c;
            }
        }
        const double tm = 0.5 * (x + y);
        const double r = convolution_ratio_at(alpha, beta, gamma, delta, tm, opt);
        if (r > best.sup_ratio) best = {r, tm};
    }
    return best;
}

}  // namespace chemolab
