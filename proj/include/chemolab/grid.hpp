#pragma once

// Cell-centered rectangular grids with zero-flux (Neumann) boundaries.
//
// Cells are indexed i + N_0 * j. Faces live between neighbouring cells; the
// boundary faces of every axis carry zero flux, which makes the discrete
// divergence of any face field sum to zero over the domain.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "chemolab/error.hpp"

namespace chemolab {

class Domain {
public:
    static constexpr std::size_t min_cells = 4;

    Domain() : Domain(std::numbers::pi, 64) {}

    /// 1D interval (0, length) split into `cells` cells.
    Domain(double length, std::size_t cells) : Domain(1, {length, 1.0}, {cells, 1}) {}

    /// 2D rectangle (0, lx) x (0, ly).
    Domain(double lx, double ly, std::size_t nx, std::size_t ny) : Domain(2, {lx, ly}, {nx, ny}) {}

    Domain(int dims, std::array<double, 2> lengths, std::array<std::size_t, 2> cells)
        : dims_(dims), lengths_(lengths), cells_(cells) {
        if (dims != 1 && dims != 2) {
            throw Error(ErrorKind::InvalidDomain, "dimension must be 1 or 2, got " + std::to_string(dims));
        }
        if (dims == 1) {
            lengths_[1] = 1.0;
            cells_[1] = 1;
        }
        for (int a = 0; a < dims; ++a) {
            if (!(lengths_[a] > 0.0) || !std::isfinite(lengths_[a])) {
                throw Error(ErrorKind::InvalidDomain, "axis " + std::to_string(a) + " length must be positive");
            }
            if (cells_[a] < min_cells) {
                throw Error(ErrorKind::InvalidDomain, "axis " + std::to_string(a) + " needs at least " +
                                                          std::to_string(min_cells) + " cells, got " +
                                                          std::to_string(cells_[a]));
            }
        }
    }

    int dims() const { return dims_; }
    double length(int axis) const { return lengths_[axis]; }
    std::size_t cells(int axis) const { return cells_[axis]; }
    double spacing(int axis) const { return lengths_[axis] / static_cast<double>(cells_[axis]); }
    std::size_t size() const { return cells_[0] * cells_[1]; }

    /// |Omega|
    double measure() const { return dims_ == 1 ? lengths_[0] : lengths_[0] * lengths_[1]; }
    double cell_volume() const { return measure() / static_cast<double>(size()); }

    /// Cell-center coordinate along an axis.
    double center(int axis, std::size_t i) const { return (static_cast<double>(i) + 0.5) * spacing(axis); }

    std::size_t index(std::size_t i, std::size_t j = 0) const { return i + cells_[0] * j; }

    /// Number of faces normal to `axis`, boundary faces included.
    std::size_t face_count(int axis) const {
        return axis == 0 ? (cells_[0] + 1) * cells_[1] : cells_[0] * (cells_[1] + 1);
    }

    bool operator==(const Domain&) const = default;

private:
    int dims_;
    std::array<double, 2> lengths_;
    std::array<std::size_t, 2> cells_;
};

struct GridField {
    Domain domain;
    std::vector<double> values;

    GridField() = default;
    explicit GridField(const Domain& d, double fill = 0.0) : domain(d), values(d.size(), fill) {}
    GridField(const Domain& d, std::vector<double> v) : domain(d), values(std::move(v)) {
        if (values.size() != domain.size()) {
            throw Error(ErrorKind::InvalidParameters, "field has " + std::to_string(values.size()) +
                                                          " values, domain has " + std::to_string(domain.size()) +
                                                          " cells");
        }
    }

    std::size_t size() const { return values.size(); }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }
    double& at(std::size_t i, std::size_t j) { return values[domain.index(i, j)]; }
    double at(std::size_t i, std::size_t j) const { return values[domain.index(i, j)]; }

    bool all_finite() const {
        return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
    }
};

/// Per-axis face values. Axis 0 faces are indexed i + (N_0 + 1) * j with i in
/// [0, N_0]; axis 1 faces are indexed i + N_0 * j with j in [0, N_1].
struct FaceField {
    Domain domain;
    std::array<std::vector<double>, 2> axis;

    FaceField() = default;
    explicit FaceField(const Domain& d) : domain(d) {
        for (int a = 0; a < d.dims(); ++a) axis[a].assign(d.face_count(a), 0.0);
    }

    double& x(std::size_t i, std::size_t j) { return axis[0][i + (domain.cells(0) + 1) * j]; }
    double x(std::size_t i, std::size_t j) const { return axis[0][i + (domain.cells(0) + 1) * j]; }
    double& y(std::size_t i, std::size_t j) { return axis[1][i + domain.cells(0) * j]; }
    double y(std::size_t i, std::size_t j) const { return axis[1][i + domain.cells(0) * j]; }
};

template <class F>
GridField sample(const Domain& d, F&& fn) {
    GridField f(d);
    for (std::size_t j = 0; j < d.cells(1); ++j) {
        for (std::size_t i = 0; i < d.cells(0); ++i) {
            if constexpr (std::is_invocable_v<F&, double, double>) {
                f.at(i, j) = d.dims() == 1 ? fn(d.center(0, i), 0.0) : fn(d.center(0, i), d.center(1, j));
            } else {
                f.at(i, j) = fn(d.center(0, i));  // x-only profile, constant in y
            }
        }
    }
    return f;
}

/// Samples of cos(k pi x / L) along `axis` (a Neumann eigenvector of the stencil).
inline GridField cosine_mode(const Domain& d, int k, int axis = 0) {
    GridField f(d);
    const double L = d.length(axis);
    for (std::size_t j = 0; j < d.cells(1); ++j) {
        for (std::size_t i = 0; i < d.cells(0); ++i) {
            const double x = d.center(axis, axis == 0 ? i : j);
            f.at(i, j) = std::cos(k * std::numbers::pi * x / L);
        }
    }
    return f;
}

/// First nonzero Neumann eigenvalue of -Delta on the rectangle.
inline double lambda1_analytic(const Domain& d) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < d.dims(); ++a) best = std::min(best, std::pow(std::numbers::pi / d.length(a), 2));
    return best;
}

/// Eigenvalue of the cell-centered 1D stencil for mode k on n cells of width h.
inline double stencil_eigenvalue(std::size_t k, std::size_t n, double h) {
    const double s = std::sin(static_cast<double>(k) * std::numbers::pi / (2.0 * static_cast<double>(n)));
    return 4.0 * s * s / (h * h);
}

/// First nonzero eigenvalue of -Delta_h (cell-centered Neumann stencil).
inline double lambda1_discrete(const Domain& d) {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < d.dims(); ++a) {
        const double h = d.spacing(a);
        best = std::min(best, (2.0 / (h * h)) * (1.0 - std::cos(std::numbers::pi * h / d.length(a))));
    }
    return best;
}

/// Forward differences at interior faces, zero at boundary faces.
inline FaceField gradient_faces(const GridField& f) {
    const Domain& d = f.domain;
    FaceField g(d);
    const std::size_t nx = d.cells(0), ny = d.cells(1);
    const double hx = d.spacing(0);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 1; i < nx; ++i) g.x(i, j) = (f.at(i, j) - f.at(i - 1, j)) / hx;
    }
    if (d.dims() == 2) {
        const double hy = d.spacing(1);
        for (std::size_t j = 1; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) g.y(i, j) = (f.at(i, j) - f.at(i, j - 1)) / hy;
        }
    }
    return g;
}

/// Cell divergence of face fluxes. Boundary face entries are ignored (treated
/// as zero), so the result always integrates to zero.
inline GridField divergence(const FaceField& flux) {
    const Domain& d = flux.domain;
    GridField out(d);
    const std::size_t nx = d.cells(0), ny = d.cells(1);
    const double hx = d.spacing(0);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            const double right = i + 1 < nx ? flux.x(i + 1, j) : 0.0;
            const double left = i > 0 ? flux.x(i, j) : 0.0;
            out.at(i, j) = (right - left) / hx;
        }
    }
    if (d.dims() == 2) {
        const double hy = d.spacing(1);
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const double top = j + 1 < ny ? flux.y(i, j + 1) : 0.0;
                const double bottom = j > 0 ? flux.y(i, j) : 0.0;
                out.at(i, j) += (top - bottom) / hy;
            }
        }
    }
    return out;
}

inline GridField apply_laplacian(const GridField& f) { return divergence(gradient_faces(f)); }

// ---------------------------------------------------------------------------
// Cosine eigenbasis of the 1D cell-centered Neumann stencil.

struct CosineBasis {
    std::size_t n = 0;
    std::vector<double> modes;        // row k holds the orthonormal mode k
    std::vector<double> eigenvalues;  // mu_k of -Delta_h

    CosineBasis() = default;
    CosineBasis(std::size_t cells, double h) : n(cells), modes(cells * cells), eigenvalues(cells) {
        const double nd = static_cast<double>(cells);
        for (std::size_t k = 0; k < cells; ++k) {
            const double c = k == 0 ? std::sqrt(1.0 / nd) : std::sqrt(2.0 / nd);
            for (std::size_t i = 0; i < cells; ++i) {
                modes[k * cells + i] =
                    c * std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(i) + 0.5) / nd);
            }
            eigenvalues[k] = stencil_eigenvalue(k, cells, h);
        }
        eigenvalues[0] = 0.0;
    }

    void forward(std::span<const double> in, std::span<double> out) const {
        for (std::size_t k = 0; k < n; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += modes[k * n + i] * in[i];
            out[k] = s;
        }
    }

    void inverse(std::span<const double> in, std::span<double> out) const {
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const double c = in[k];
            for (std::size_t i = 0; i < n; ++i) out[i] += modes[k * n + i] * c;
        }
    }
};

namespace detail {

/// Applies a 1D transform along `axis` to every line of a cell array.
template <class Fn>
void for_each_line(const Domain& d, int axis, std::vector<double>& values, Fn&& fn) {
    const std::size_t nx = d.cells(0), ny = d.cells(1);
    const std::size_t len = d.cells(axis);
    std::vector<double> line(len), out(len);
    const std::size_t lines = axis == 0 ? ny : nx;
    for (std::size_t l = 0; l < lines; ++l) {
        for (std::size_t m = 0; m < len; ++m) line[m] = axis == 0 ? values[m + nx * l] : values[l + nx * m];
        fn(l, std::span<const double>(line), std::span<double>(out));
        for (std::size_t m = 0; m < len; ++m) (axis == 0 ? values[m + nx * l] : values[l + nx * m]) = out[m];
    }
}

/// Solves the symmetric tridiagonal system with constant off-diagonal `off`,
/// diagonal `diag`, in place on `rhs` (Thomas elimination, no pivoting; the
/// systems here are strictly diagonally dominant).
inline void thomas_solve(std::span<const double> diag, double off, std::span<double> rhs) {
    const std::size_t n = diag.size();
    std::vector<double> c(n);
    double denom = diag[0];
    c[0] = off / denom;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        denom = diag[i] - off * c[i - 1];
        c[i] = off / denom;
        rhs[i] = (rhs[i] - off * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= c[i] * rhs[i + 1];
}

}  // namespace detail

/// Solves ((1 + shift) I - a Delta_h) x = rhs.
///
/// 1D uses tridiagonal elimination directly. 2D diagonalizes the y-axis in the
/// cosine basis and runs one tridiagonal solve per y-mode. The residual is
/// checked against `tol_lin` in the max norm.
inline GridField solve_shifted_helmholtz(double a, double shift, const GridField& rhs, double tol_lin = 1e-12) {
    if (a < 0.0 || shift < 0.0) throw Error(ErrorKind::InvalidParameters, "helmholtz coefficients must be >= 0");
    const Domain& d = rhs.domain;
    GridField x = rhs;
    if (a == 0.0) {
        for (double& v : x.values) v /= (1.0 + shift);
        return x;
    }
    const std::size_t nx = d.cells(0), ny = d.cells(1);
    const double hx = d.spacing(0);
    const double off = -a / (hx * hx);

    auto solve_x_lines = [&](std::vector<double>& vals, std::span<const double> extra) {
        std::vector<double> diag(nx), line(nx);
        for (std::size_t j = 0; j < ny; ++j) {
            for (std::size_t i = 0; i < nx; ++i) {
                const double stencil = (i == 0 || i + 1 == nx) ? 1.0 : 2.0;
                diag[i] = 1.0 + shift + extra[j] + stencil * a / (hx * hx);
                line[i] = vals[i + nx * j];
            }
            detail::thomas_solve(diag, off, line);
            for (std::size_t i = 0; i < nx; ++i) vals[i + nx * j] = line[i];
        }
    };

    if (d.dims() == 1) {
        const std::vector<double> zero(1, 0.0);
        solve_x_lines(x.values, zero);
    } else {
        const CosineBasis by(ny, d.spacing(1));
        detail::for_each_line(d, 1, x.values,
                              [&](std::size_t, std::span<const double> in, std::span<double> out) { by.forward(in, out); });
        std::vector<double> extra(ny);
        for (std::size_t m = 0; m < ny; ++m) extra[m] = a * by.eigenvalues[m];
        solve_x_lines(x.values, extra);
        detail::for_each_line(d, 1, x.values,
                              [&](std::size_t, std::span<const double> in, std::span<double> out) { by.inverse(in, out); });
    }

    const GridField lap = apply_laplacian(x);
    double res = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        res = std::max(res, std::abs((1.0 + shift) * x[k] - a * lap[k] - rhs[k]));
        scale = std::max(scale, std::abs(rhs[k]));
    }
    if (!(res <= tol_lin * scale)) {
        throw Error(ErrorKind::SolverFailure, "helmholtz residual " + std::to_string(res) + " exceeds tolerance " +
                                                  std::to_string(tol_lin * scale));
    }
    return x;
}

/// Backward-Euler diffusion solve: (I - a Delta_h) x = rhs.
inline GridField solve_helmholtz(double a, const GridField& rhs, double tol_lin = 1e-12) {
    return solve_shifted_helmholtz(a, 0.0, rhs, tol_lin);
}

}  // namespace chemolab
