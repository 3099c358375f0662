#pragma once

#include "trisphere/structural.hpp"

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace trisphere {

/// Node classification for the embedded-boundary lattice. `band` nodes
/// carry Dirichlet data; `interior` nodes carry unknowns; `exterior`
/// values are unused (initialized to NaN so accidental reads surface).
enum class NodeKind : unsigned char { exterior = 0, band = 1, interior = 2 };

/// Nodal function on a square lattice of spacing h covering a disk or
/// annulus centered at (cx, cy). Nodes sit at (cx + i h, cy + j h) for
/// i, j in [-N, N]. Mask rules:
///   non-exterior: within 0.71 h of the closed domain (so every domain
///                 point has a non-exterior node within h);
///   interior:     inside the closed domain with all 8 lattice neighbors
///                 non-exterior (the flux stencil stays on carried nodes);
///   band:         non-exterior but not interior.
struct GridFunction2D {
    double h = 0.0;
    double cx = 0.0, cy = 0.0;
    int N = 0;
    double r_in = 0.0; // 0 for a disk
    double r_out = 1.0;
    std::vector<double> values;
    std::vector<NodeKind> mask;

    int side() const { return 2 * N + 1; }

    std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(j + N) * static_cast<std::size_t>(side()) +
               static_cast<std::size_t>(i + N);
    }

    double x(int i) const { return cx + h * i; }
    double y(int j) const { return cy + h * j; }

    NodeKind kind(int i, int j) const {
        if (i < -N || i > N || j < -N || j > N) return NodeKind::exterior;
        return mask[idx(i, j)];
    }

    double at(int i, int j) const { return values[idx(i, j)]; }
    double& at(int i, int j) { return values[idx(i, j)]; }

    double radius_of(int i, int j) const { return h * std::hypot(double(i), double(j)); }

    void validate() const {
        if (!(h > 0.0)) throw std::invalid_argument("GridFunction2D: need h > 0");
        if (N < 2) throw std::invalid_argument("GridFunction2D: lattice too small");
        const std::size_t count =
            static_cast<std::size_t>(side()) * static_cast<std::size_t>(side());
        if (values.size() != count || mask.size() != count)
            throw std::invalid_argument("GridFunction2D: array sizes do not match lattice");
        for (int j = -N; j <= N; ++j)
            for (int i = -N; i <= N; ++i)
                if (mask[idx(i, j)] != NodeKind::exterior && !std::isfinite(at(i, j)))
                    throw std::invalid_argument(
                        "GridFunction2D: non-finite value on carried node");
    }
};

namespace detail {

inline GridFunction2D make_masked_grid(double cx, double cy, double r_in, double r_out,
                                       double h) {
    if (!(h > 0.0) || !(r_out > 0.0) || !(r_in >= 0.0) || !(r_in < r_out))
        throw std::invalid_argument("make grid: need 0 <= r_in < r_out and h > 0");
    if (r_out / h > 4096.0)
        throw std::invalid_argument("make grid: lattice would exceed 8192 nodes per side");

    GridFunction2D g;
    g.h = h;
    g.cx = cx;
    g.cy = cy;
    g.r_in = r_in;
    g.r_out = r_out;
    g.N = static_cast<int>(std::ceil((r_out + 0.71 * h) / h)) + 1;
    const std::size_t count =
        static_cast<std::size_t>(g.side()) * static_cast<std::size_t>(g.side());
    g.values.assign(count, std::numeric_limits<double>::quiet_NaN());
    g.mask.assign(count, NodeKind::exterior);

    const double pad = 0.71 * h;
    auto dist = [&](int i, int j) { return h * std::hypot(double(i), double(j)); };
    auto non_exterior = [&](int i, int j) {
        if (i < -g.N || i > g.N || j < -g.N || j > g.N) return false;
        const double d = dist(i, j);
        return d <= r_out + pad && (r_in == 0.0 || d >= r_in - pad);
    };
    auto inside = [&](int i, int j) {
        const double d = dist(i, j);
        return d <= r_out && (r_in == 0.0 || d >= r_in);
    };

    for (int j = -g.N; j <= g.N; ++j) {
        for (int i = -g.N; i <= g.N; ++i) {
            if (!non_exterior(i, j)) continue;
            bool interior = inside(i, j);
            for (int dj = -1; dj <= 1 && interior; ++dj)
                for (int di = -1; di <= 1 && interior; ++di)
                    if (!non_exterior(i + di, j + dj)) interior = false;
            g.mask[g.idx(i, j)] = interior ? NodeKind::interior : NodeKind::band;
            g.values[g.idx(i, j)] = 0.0;
        }
    }
    return g;
}

} // namespace detail

inline GridFunction2D make_disk_grid(double cx, double cy, double r_out, double h) {
    return detail::make_masked_grid(cx, cy, 0.0, r_out, h);
}

inline GridFunction2D make_annulus_grid(double cx, double cy, double r_in, double r_out,
                                        double h) {
    if (!(r_in > 0.0)) throw std::invalid_argument("make_annulus_grid: need r_in > 0");
    return detail::make_masked_grid(cx, cy, r_in, r_out, h);
}

enum class FdmScheme { picard, damped_newton };

/// Knobs of the nonlinear grid solver. epsilon regularizes the gradient
/// magnitude, (|grad u|^2 + epsilon^2)^{(p-2)/2}; tol is the max-norm
/// target of the nonlinear residual; damping is the initial Newton step;
/// sor_omega = 0 picks the Laplace-optimal relaxation for the lattice.
struct SolverConfig {
    double epsilon = 1e-6;
    double tol = 1e-8;
    int max_iter = 200;
    FdmScheme scheme = FdmScheme::picard;
    double damping = 1.0;
    int sor_sweeps = 50;
    double sor_omega = 0.0;

    void validate() const {
        if (!(epsilon > 0.0)) throw std::invalid_argument("SolverConfig: need epsilon > 0");
        if (!(tol > 0.0)) throw std::invalid_argument("SolverConfig: need tol > 0");
        if (max_iter < 1) throw std::invalid_argument("SolverConfig: need max_iter >= 1");
        if (!(damping > 0.0 && damping <= 1.0))
            throw std::invalid_argument("SolverConfig: need damping in (0, 1]");
        if (sor_sweeps < 1) throw std::invalid_argument("SolverConfig: need sor_sweeps >= 1");
        if (!(sor_omega >= 0.0 && sor_omega < 2.0))
            throw std::invalid_argument("SolverConfig: need sor_omega in [0, 2) (0 = auto)");
    }
};

struct SolverFailure : std::runtime_error {
    std::vector<double> residual_history;
    SolverFailure(const std::string& what, std::vector<double> history)
        : std::runtime_error(what), residual_history(std::move(history)) {}
};

struct FdmResult {
    GridFunction2D grid;
    std::vector<double> residual_history; // nonlinear residual per outer iteration
    int iterations = 0;
    bool dominance_warning = false; // extreme face-coefficient spread (p far from 2)
};

namespace detail {

// Shared stencil machinery. The operator must have the scalar-weight form
// A = a(x,t) |h|^{p-2} h; faces average the two adjacent node states.
struct FdmStencil {
    const EquationSpec& spec;
    const GridFunction2D& g;
    double epsilon;

    double weight_at(double px, double py, double t) const {
        const double pt[2] = {px, py};
        return spec.weight(std::span<const double>(pt, 2), t);
    }

    // Coefficient on the face between (i,j) and its east/north neighbor.
    // dir = 0: east face; dir = 1: north face.
    double face_kappa(int i, int j, int dir) const {
        const double p = spec.params.p;
        const int ni = i + (dir == 0 ? 1 : 0);
        const int nj = j + (dir == 0 ? 0 : 1);
        const double uc = g.at(i, j), un = g.at(ni, nj);
        const double axial = (un - uc) / g.h;
        double trans;
        if (dir == 0) {
            trans = (g.at(i, j + 1) - g.at(i, j - 1) + g.at(ni, nj + 1) -
                     g.at(ni, nj - 1)) /
                    (4.0 * g.h);
        } else {
            trans = (g.at(i + 1, j) - g.at(i - 1, j) + g.at(ni + 1, nj) -
                     g.at(ni - 1, nj)) /
                    (4.0 * g.h);
        }
        const double m2 = axial * axial + trans * trans;
        const double a = weight_at(0.5 * (g.x(i) + g.x(ni)), 0.5 * (g.y(j) + g.y(nj)),
                                   0.5 * (uc + un));
        return a * std::pow(m2 + epsilon * epsilon, 0.5 * (p - 2.0));
    }

    // Drift at a node, evaluated with the centered gradient rescaled to the
    // regularized magnitude (keeps the discrete drift envelope consistent
    // with the diffusion coefficient's regularization).
    double drift_at(int i, int j) const {
        const double gx = (g.at(i + 1, j) - g.at(i - 1, j)) / (2.0 * g.h);
        const double gy = (g.at(i, j + 1) - g.at(i, j - 1)) / (2.0 * g.h);
        const double m = std::hypot(gx, gy);
        const double m_reg = std::hypot(m, epsilon);
        double hx = m_reg, hy = 0.0;
        if (m > 0.0) {
            hx = gx * (m_reg / m);
            hy = gy * (m_reg / m);
        }
        const double pt[2] = {g.x(i), g.y(j)};
        const double hv[2] = {hx, hy};
        return spec.B(std::span<const double>(pt, 2), g.at(i, j),
                      std::span<const double>(hv, 2));
    }

    // Discrete equation at an interior node:
    //   -(1/h^2) [k_E (u_E - u_C) - k_W (u_C - u_W)
    //             + k_N (u_N - u_C) - k_S (u_C - u_S)] + B = 0.
    double residual(int i, int j) const {
        const double h2 = g.h * g.h;
        const double uc = g.at(i, j);
        const double kE = face_kappa(i, j, 0), kW = face_kappa(i - 1, j, 0);
        const double kN = face_kappa(i, j, 1), kS = face_kappa(i, j - 1, 1);
        const double div = (kE * (g.at(i + 1, j) - uc) - kW * (uc - g.at(i - 1, j)) +
                            kN * (g.at(i, j + 1) - uc) - kS * (uc - g.at(i, j - 1))) /
                           h2;
        return -div + drift_at(i, j);
    }
};

} // namespace detail

/// Max-norm of the discrete residual over interior nodes; zero for exact
/// discrete solutions (e.g. quadratics at p = 2, where the five-point
/// stencil is exact).
inline double residual_norm(const EquationSpec& spec, const GridFunction2D& grid,
                            double epsilon) {
    if (!spec.weight)
        throw std::invalid_argument("residual_norm: grid solver needs a scalar-weight operator");
    grid.validate();
    detail::FdmStencil st{spec, grid, epsilon};
    double worst = 0.0;
    for (int j = -grid.N; j <= grid.N; ++j)
        for (int i = -grid.N; i <= grid.N; ++i)
            if (grid.kind(i, j) == NodeKind::interior)
                worst = std::max(worst, std::fabs(st.residual(i, j)));
    return worst;
}

/// Dirichlet solve on the masked lattice. Band nodes take boundary_data
/// evaluated at the node coordinates (data callables are globally defined
/// here; this keeps the band first-order without projection artifacts).
/// Picard freezes the face coefficients and the drift, relaxes the linear
/// system by SOR, and refreshes; damped Newton takes the frozen-coefficient
/// system as approximate Jacobian with a backtracking line search.
inline FdmResult solve_dirichlet(const EquationSpec& spec,
                                 const std::function<double(double, double)>& boundary_data,
                                 const GridFunction2D& tmpl, const SolverConfig& cfg) {
    spec.params.validate();
    cfg.validate();
    if (!spec.weight || !spec.B)
        throw std::invalid_argument(
            "solve_dirichlet: spec needs scalar-weight A and evaluable B");
    if (!boundary_data) throw std::invalid_argument("solve_dirichlet: no boundary data");

    FdmResult out;
    out.grid = tmpl;
    GridFunction2D& g = out.grid;

    // Dirichlet data on the band; interior starts from the band mean.
    double band_sum = 0.0;
    std::size_t band_count = 0;
    for (int j = -g.N; j <= g.N; ++j) {
        for (int i = -g.N; i <= g.N; ++i) {
            if (g.kind(i, j) != NodeKind::band) continue;
            const double v = boundary_data(g.x(i), g.y(j));
            if (!std::isfinite(v))
                throw std::invalid_argument("solve_dirichlet: boundary data non-finite");
            g.at(i, j) = v;
            band_sum += v;
            ++band_count;
        }
    }
    if (band_count == 0)
        throw std::invalid_argument("solve_dirichlet: mask has no band nodes");
    const double init = band_sum / static_cast<double>(band_count);
    std::vector<std::pair<int, int>> interior;
    for (int j = -g.N; j <= g.N; ++j)
        for (int i = -g.N; i <= g.N; ++i)
            if (g.kind(i, j) == NodeKind::interior) {
                g.at(i, j) = init;
                interior.emplace_back(i, j);
            }
    if (interior.empty())
        throw std::invalid_argument("solve_dirichlet: mask has no interior nodes");

    detail::FdmStencil st{spec, g, cfg.epsilon};
    const double omega =
        cfg.sor_omega > 0.0
            ? cfg.sor_omega
            : 2.0 / (1.0 + std::sin(std::numbers::pi / static_cast<double>(g.side())));
    const double h2 = g.h * g.h;

    // Frozen per outer iteration: east/north face coefficients and drift.
    const std::size_t count = g.values.size();
    std::vector<double> kE(count, 0.0), kN(count, 0.0), rhs(count, 0.0);
    auto freeze = [&]() {
        double kmin = std::numeric_limits<double>::infinity(), kmax = 0.0;
        for (auto [i, j] : interior) {
            // All four faces of each interior node; west/south faces are
            // stored as the east/north faces of the carried neighbors.
            kE[g.idx(i, j)] = st.face_kappa(i, j, 0);
            kN[g.idx(i, j)] = st.face_kappa(i, j, 1);
            kE[g.idx(i - 1, j)] = st.face_kappa(i - 1, j, 0);
            kN[g.idx(i, j - 1)] = st.face_kappa(i, j - 1, 1);
            rhs[g.idx(i, j)] = -st.drift_at(i, j);
            for (double k : {kE[g.idx(i, j)], kN[g.idx(i, j)], kE[g.idx(i - 1, j)],
                             kN[g.idx(i, j - 1)]}) {
                kmin = std::min(kmin, k);
                kmax = std::max(kmax, k);
            }
        }
        if (!(kmin > 0.0) || kmax / kmin > 1e8) out.dominance_warning = true;
    };
    auto sor_sweep = [&](std::vector<double>& vals) {
        for (auto [i, j] : interior) {
            const double ke = kE[g.idx(i, j)], kw = kE[g.idx(i - 1, j)];
            const double kn = kN[g.idx(i, j)], ks = kN[g.idx(i, j - 1)];
            const double diag = ke + kw + kn + ks;
            const double num = ke * vals[g.idx(i + 1, j)] + kw * vals[g.idx(i - 1, j)] +
                               kn * vals[g.idx(i, j + 1)] + ks * vals[g.idx(i, j - 1)] +
                               h2 * rhs[g.idx(i, j)];
            const double unew = num / diag;
            vals[g.idx(i, j)] += omega * (unew - vals[g.idx(i, j)]);
        }
    };
    auto nonlinear_residual = [&]() {
        double worst = 0.0;
        for (auto [i, j] : interior) worst = std::max(worst, std::fabs(st.residual(i, j)));
        return worst;
    };

    double res = nonlinear_residual();
    out.residual_history.push_back(res);
    for (int it = 0; it < cfg.max_iter && res > cfg.tol; ++it) {
        out.iterations = it + 1;
        freeze();
        if (cfg.scheme == FdmScheme::picard) {
            for (int s = 0; s < cfg.sor_sweeps; ++s) sor_sweep(g.values);
        } else {
            // Newton direction from the frozen-coefficient system: relax a
            // copy toward the linear solution, step = copy - current.
            std::vector<double> target = g.values;
            for (int s = 0; s < cfg.sor_sweeps; ++s) sor_sweep(target);
            std::vector<double> base = g.values;
            double step = cfg.damping;
            double best = res;
            std::vector<double> best_vals = base;
            for (int bt = 0; bt < 6; ++bt) {
                for (auto [i, j] : interior) {
                    const std::size_t k = g.idx(i, j);
                    g.values[k] = base[k] + step * (target[k] - base[k]);
                }
                const double trial = nonlinear_residual();
                if (std::isfinite(trial) && trial < best) {
                    best = trial;
                    best_vals = g.values;
                }
                if (std::isfinite(trial) && trial < res) break;
                step *= 0.5;
            }
            g.values = std::move(best_vals);
        }
        res = nonlinear_residual();
        out.residual_history.push_back(res);
    }
    if (res > cfg.tol) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3e", res);
        throw SolverFailure("solve_dirichlet: no convergence after " +
                                std::to_string(cfg.max_iter) + " iterations (residual " +
                                buf + ")",
                            out.residual_history);
    }
    g.validate();
    return out;
}

} // namespace trisphere
