#pragma once

#include "trisphere/bounds.hpp"
#include "trisphere/structural.hpp"

#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace trisphere {

/// Signed power nonlinearity Phi(s) = |s|^{p-2} s and its inverse
/// Phi^{-1}(t) = |t|^{1/(p-1)-1} t, both extended continuously by 0 at the
/// origin (the raw pow form would produce NaN there for p on either side
/// of 2).
inline double phi(double s, double p) {
    if (s == 0.0) return 0.0;
    return std::pow(std::fabs(s), p - 2.0) * s;
}

inline double phi_inverse(double t, double p) {
    if (t == 0.0) return 0.0;
    return std::pow(std::fabs(t), 1.0 / (p - 1.0) - 1.0) * t;
}

struct SolveError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Provenance { exact_fundamental, exact_extremal_drift, numeric_ivp, numeric_bvp };

inline const char* provenance_name(Provenance pr) {
    switch (pr) {
        case Provenance::exact_fundamental: return "exact_fundamental";
        case Provenance::exact_extremal_drift: return "exact_extremal_drift";
        case Provenance::numeric_ivp: return "numeric_ivp";
        case Provenance::numeric_bvp: return "numeric_bvp";
    }
    return "?";
}

/// Discrete radial solution on an annulus mesh (origin excluded).
struct RadialProfile {
    std::vector<double> mesh;              // strictly increasing, > 0
    std::vector<double> values;            // u at mesh points
    std::vector<double> derivative_values; // u' at mesh points
    StructuralParams params;
    Provenance provenance = Provenance::numeric_ivp;

    void validate() const {
        if (mesh.size() < 2 || mesh.size() != values.size() ||
            mesh.size() != derivative_values.size())
            throw std::invalid_argument("RadialProfile: inconsistent array sizes");
        double prev = 0.0;
        for (double r : mesh) {
            if (!(r > prev) || !std::isfinite(r))
                throw std::invalid_argument("RadialProfile: mesh must be positive increasing");
            prev = r;
        }
        if (!detail::all_finite(values) || !detail::all_finite(derivative_values))
            throw std::invalid_argument("RadialProfile: non-finite values");
    }
};

/// Closed-form radial solution: u and u' evaluable at any r > 0, plus the
/// drift term it solves against, B_radial(r, u, u'), so residuals can be
/// checked independently of the generating algebra.
struct RadialSolution {
    std::function<double(double)> u;
    std::function<double(double)> du;
    std::function<double(double, double, double)> B_radial; // (r, u, du) -> B
    StructuralParams params;
    Provenance provenance = Provenance::exact_fundamental;
    std::string name;

    RadialProfile sample(std::span<const double> mesh) const {
        RadialProfile prof;
        prof.params = params;
        prof.provenance = provenance;
        prof.mesh.assign(mesh.begin(), mesh.end());
        prof.values.reserve(mesh.size());
        prof.derivative_values.reserve(mesh.size());
        for (double r : mesh) {
            prof.values.push_back(u(r));
            prof.derivative_values.push_back(du(r));
        }
        prof.validate();
        return prof;
    }

    RadialProfile sample_uniform(double r_in, double r_out, int count) const {
        if (!(0.0 < r_in && r_in < r_out) || count < 2)
            throw std::invalid_argument("sample_uniform: need 0 < r_in < r_out, count >= 2");
        std::vector<double> mesh(static_cast<std::size_t>(count));
        for (int i = 0; i < count; ++i)
            mesh[static_cast<std::size_t>(i)] =
                r_in + (r_out - r_in) * static_cast<double>(i) / (count - 1);
        return sample(mesh);
    }
};

/// Drift-free radial solution of the p-Laplace equation:
///   u(r) = a + b r^alpha,  alpha = (p-n)/(p-1)   (p != n)
///   u(r) = a - b log r                            (p = n)
/// The flux w = r^{n-1} Phi(u') is constant in r, so the radial equation
/// residual vanishes identically on r > 0.
inline RadialSolution fundamental_solution(const StructuralParams& params, double a,
                                           double b) {
    params.validate();
    RadialSolution sol;
    sol.params = params;
    sol.provenance = Provenance::exact_fundamental;
    sol.name = "fundamental(a=" + std::to_string(a) + ",b=" + std::to_string(b) + ")";
    sol.B_radial = [](double, double, double) { return 0.0; };
    if (params.regime() == Regime::border_n) {
        sol.u = [a, b](double r) { return a - b * std::log(r); };
        sol.du = [b](double r) { return -b / r; };
    } else {
        const double alpha = radial_alpha(params);
        sol.u = [a, b, alpha](double r) { return a + b * std::pow(r, alpha); };
        sol.du = [b, alpha](double r) { return b * alpha * std::pow(r, alpha - 1.0); };
    }
    return sol;
}

/// Increasing radial solution whose drift saturates the decaying envelope
/// with equality:
///   (r^{n-1} (u')^{p-1})' = sign (b1/r) r^{n-1} (u')^{p-1},  u' > 0,
/// solved by u'(r) = r^beta with beta = (sign b1 + 1 - n)/(p - 1), i.e.
///   u(r) = u0 + (r^{beta+1} - r_in^{beta+1})/(beta+1)  (beta != -1)
///   u(r) = u0 + log(r / r_in)                          (beta  = -1).
/// The flux is w = r^{sign b1}. Valid on r >= r_in >= 1, where the
/// envelope is b1/r; below 1 it would switch to the constant branch.
inline RadialSolution extremal_drift_solution(const StructuralParams& params, int sign,
                                              double u0, double r_in) {
    params.validate();
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("extremal_drift_solution: sign must be +1 or -1");
    if (!(r_in >= 1.0))
        throw std::invalid_argument(
            "extremal_drift_solution: need r_in >= 1 (decaying envelope branch)");
    const double p = params.p, b1 = params.b1;
    const double beta = (sign * b1 + 1.0 - params.n) / (p - 1.0);
    RadialSolution sol;
    sol.params = params;
    sol.provenance = Provenance::exact_extremal_drift;
    sol.name = "extremal_drift(sign=" + std::string(sign > 0 ? "+" : "-") +
               ",b1=" + std::to_string(b1) + ")";
    const GrowthEnvelope env{EnvelopeMode::global_decay, b1};
    sol.B_radial = [sign, env, p](double r, double, double du) {
        return sign * envelope_eval(env, r) * std::pow(std::fabs(du), p - 1.0);
    };
    sol.du = [beta](double r) { return std::pow(r, beta); };
    if (beta == -1.0) {
        sol.u = [u0, r_in](double r) { return u0 + std::log(r / r_in); };
    } else {
        const double c = std::pow(r_in, beta + 1.0);
        sol.u = [u0, beta, c](double r) {
            return u0 + (std::pow(r, beta + 1.0) - c) / (beta + 1.0);
        };
    }
    return sol;
}

/// Max-norm residual of the radial equation (r^{n-1} Phi(u'))' = r^{n-1} B
/// over the given radii, with the flux derivative taken by a five-point
/// central difference (step 1e-3 max(r,1); truncation ~1e-11 for the exact
/// families). Radii must keep the stencil inside r > 0.
inline double max_radial_residual(const RadialSolution& sol, std::span<const double> radii) {
    const double p = sol.params.p;
    const double n = sol.params.n;
    auto w = [&](double r) { return std::pow(r, n - 1.0) * phi(sol.du(r), p); };
    double worst = 0.0;
    for (double r : radii) {
        const double h = 1e-3 * std::max(r, 1.0);
        if (!(r - 2.0 * h > 0.0))
            throw std::invalid_argument("max_radial_residual: stencil leaves r > 0");
        const double dw =
            (-w(r + 2.0 * h) + 8.0 * w(r + h) - 8.0 * w(r - h) + w(r - 2.0 * h)) /
            (12.0 * h);
        const double rhs = std::pow(r, n - 1.0) * sol.B_radial(r, sol.u(r), sol.du(r));
        worst = std::max(worst, std::fabs(dw - rhs));
    }
    return worst;
}

struct IvpOptions {
    double cap = 1e12; // blow-up guard on |u| and |u'|
};

namespace detail {

inline void require_radial_spec(const EquationSpec& spec) {
    spec.params.validate();
    if (!spec.B) throw std::invalid_argument("radial solve: spec has no drift B");
    if (!spec.unit_weight)
        throw std::invalid_argument(
            "radial solve: spec must have unit weight (A = |h|^{p-2} h); "
            "weighted operators are grid-solver territory");
}

} // namespace detail

/// Integrate the radial reduction of the equation as the first-order system
///   u' = Phi^{-1}(w r^{1-n}),   w' = r^{n-1} B(x, u, u' e1),   x = r e1,
/// with the classical fourth-order one-step method on a uniform mesh.
/// w = r^{n-1} Phi(u') is the radial flux. Converges at order 4 against the
/// exact families.
inline RadialProfile solve_radial_ivp(const EquationSpec& spec, double r_in, double u_in,
                                      double du_in, double r_out, int steps,
                                      const IvpOptions& opts = {}) {
    detail::require_radial_spec(spec);
    if (!(0.0 < r_in && r_in < r_out))
        throw std::invalid_argument("solve_radial_ivp: need 0 < r_in < r_out");
    if (steps < 16) throw std::invalid_argument("solve_radial_ivp: need steps >= 16");
    if (!std::isfinite(u_in) || !std::isfinite(du_in))
        throw std::invalid_argument("solve_radial_ivp: non-finite initial data");

    const double p = spec.params.p;
    const double n = spec.params.n;
    const std::size_t dim = static_cast<std::size_t>(spec.params.n);

    std::vector<double> x(dim, 0.0), hvec(dim, 0.0);
    auto slope = [&](double r, double w) {
        if (!std::isfinite(w)) throw SolveError("solve_radial_ivp: flux became non-finite");
        return phi_inverse(w * std::pow(r, 1.0 - n), p);
    };
    // f returns (du, dw) at state (r, u, w).
    auto f = [&](double r, double u, double w, double& du, double& dw) {
        du = slope(r, w);
        x[0] = r;
        hvec[0] = du;
        dw = std::pow(r, n - 1.0) * spec.B(x, u, hvec);
    };

    RadialProfile prof;
    prof.params = spec.params;
    prof.provenance = Provenance::numeric_ivp;
    const std::size_t count = static_cast<std::size_t>(steps) + 1;
    prof.mesh.resize(count);
    prof.values.resize(count);
    prof.derivative_values.resize(count);

    const double hstep = (r_out - r_in) / steps;
    double u = u_in;
    double w = phi(du_in, p) * std::pow(r_in, n - 1.0);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = r_in + hstep * static_cast<double>(i);
        const double du_here = slope(r, w);
        prof.mesh[i] = r;
        prof.values[i] = u;
        prof.derivative_values[i] = du_here;
        if (std::fabs(u) > opts.cap || std::fabs(du_here) > opts.cap)
            throw SolveError("solve_radial_ivp: blow-up (cap exceeded)");
        if (i + 1 == count) break;

        double k1u, k1w, k2u, k2w, k3u, k3w, k4u, k4w;
        f(r, u, w, k1u, k1w);
        f(r + 0.5 * hstep, u + 0.5 * hstep * k1u, w + 0.5 * hstep * k1w, k2u, k2w);
        f(r + 0.5 * hstep, u + 0.5 * hstep * k2u, w + 0.5 * hstep * k2w, k3u, k3w);
        f(r + hstep, u + hstep * k3u, w + hstep * k3w, k4u, k4w);
        u += hstep / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        w += hstep / 6.0 * (k1w + 2.0 * k2w + 2.0 * k3w + k4w);
    }
    prof.validate();
    return prof;
}

/// Two-point boundary problem via shooting on the initial slope: bracket
/// expansion around the secant guess, then bisection until the terminal
/// value matches u_out within tol. The terminal map is monotone in the
/// slope for the sign-definite drift presets (tested, not proved).
inline RadialProfile solve_radial_bvp(const EquationSpec& spec, double r_in, double u_in,
                                      double r_out, double u_out, int steps, double tol,
                                      const IvpOptions& opts = {}) {
    detail::require_radial_spec(spec);
    if (!(tol > 0.0)) throw std::invalid_argument("solve_radial_bvp: need tol > 0");
    if (!std::isfinite(u_out))
        throw std::invalid_argument("solve_radial_bvp: non-finite boundary value");

    auto shoot = [&](double s) {
        return solve_radial_ivp(spec, r_in, u_in, s, r_out, steps, opts);
    };
    auto endpoint_gap = [&](double s) { return shoot(s).values.back() - u_out; };

    if (u_in == u_out) {
        RadialProfile prof = shoot(0.0); // B vanishes at zero gradient: u stays flat
        prof.provenance = Provenance::numeric_bvp;
        return prof;
    }

    const double s0 = (u_out - u_in) / (r_out - r_in);
    const double slope_cap = 1e8;
    double width = std::max(1.0, std::fabs(s0));
    double lo = s0 - width, hi = s0 + width;
    double flo = endpoint_gap(lo), fhi = endpoint_gap(hi);
    while (flo * fhi > 0.0) {
        width *= 2.0;
        if (width > slope_cap)
            throw SolveError("solve_radial_bvp: no-bracket within the derivative cap");
        lo = s0 - width;
        hi = s0 + width;
        flo = endpoint_gap(lo);
        fhi = endpoint_gap(hi);
    }
    if (flo == 0.0) hi = lo;
    if (fhi == 0.0) lo = hi;

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = endpoint_gap(mid);
        if (std::fabs(fm) <= tol) break;
        if ((fm > 0.0) == (fhi > 0.0)) {
            hi = mid;
            fhi = fm;
        } else {
            lo = mid;
            flo = fm;
        }
        if (hi - lo <= std::fabs(mid) * 1e-16) break;
    }
    RadialProfile prof = shoot(mid);
    if (std::fabs(prof.values.back() - u_out) > tol)
        throw SolveError("solve_radial_bvp: shooting did not reach the boundary value");
    prof.provenance = Provenance::numeric_bvp;
    return prof;
}

} // namespace trisphere
