#pragma once

#include "trisphere/structural.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <string>

namespace trisphere {

/// Concentric radii 0 < r1 < r2 < r3 for the three-spheres comparisons.
struct RadiiTriple {
    double r1 = 1.0;
    double r2 = 2.0;
    double r3 = 4.0;

    void validate() const {
        if (!(std::isfinite(r1) && std::isfinite(r2) && std::isfinite(r3)))
            throw std::invalid_argument("RadiiTriple: radii must be finite");
        if (!(0.0 < r1 && r1 < r2 && r2 < r3))
            throw std::invalid_argument("RadiiTriple: need 0 < r1 < r2 < r3");
    }

    RadiiTriple scaled(double k) const { return {k * r1, k * r2, k * r3}; }
};

/// Which closed-form interpolation weight applies.
///
///   classical_sub_n  1 < p < n   weight from the power coordinate -r^alpha
///   classical_n      p = n       weight from the log-r coordinate
///   border_n         p = n       explicit exp(-C ...) weight (drift allowed)
///   a_harmonic_n     p = n       explicit weight for the drift-free case
///   p_gt_n           p > n       explicit weight built from p-capacities
enum class BoundMode { classical_sub_n, classical_n, border_n, a_harmonic_n, p_gt_n };

inline const char* bound_mode_name(BoundMode m) {
    switch (m) {
        case BoundMode::classical_sub_n: return "classical_sub_n";
        case BoundMode::classical_n: return "classical_n";
        case BoundMode::border_n: return "border_n";
        case BoundMode::a_harmonic_n: return "a_harmonic_n";
        case BoundMode::p_gt_n: return "p_gt_n";
    }
    throw std::logic_error("bound_mode_name: unreachable");
}

inline BoundMode bound_mode_from_name(const std::string& s) {
    if (s == "classical_sub_n") return BoundMode::classical_sub_n;
    if (s == "classical_n") return BoundMode::classical_n;
    if (s == "border_n") return BoundMode::border_n;
    if (s == "a_harmonic_n") return BoundMode::a_harmonic_n;
    if (s == "p_gt_n") return BoundMode::p_gt_n;
    throw std::invalid_argument("bound_mode_from_name: unknown mode '" + s + "'");
}

inline bool mode_matches_regime(BoundMode m, Regime reg) {
    switch (m) {
        case BoundMode::classical_sub_n: return reg == Regime::sub_n;
        case BoundMode::classical_n:
        case BoundMode::border_n:
        case BoundMode::a_harmonic_n: return reg == Regime::border_n;
        case BoundMode::p_gt_n: return reg == Regime::gt_n;
    }
    return false;
}

/// Surface area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2).
inline double unit_sphere_area(int n) {
    if (n < 2) throw std::invalid_argument("unit_sphere_area: need n >= 2");
    return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Exponent alpha = (p - n)/(p - 1) of the radial power solution (p != n).
inline double radial_alpha(const StructuralParams& params) {
    if (params.regime() == Regime::border_n)
        throw std::invalid_argument("radial_alpha: undefined at p = n (log case)");
    return (params.p - params.n) / (params.p - 1.0);
}

/// Normalization multiplier for the annulus p-capacity.
struct CapacityConvention {
    double normalization = 1.0;

    void validate() const {
        if (!(normalization > 0.0) || !std::isfinite(normalization))
            throw std::invalid_argument("CapacityConvention: normalization must be positive");
    }
};

/// Standard condenser-capacity constant: omega_{n-1} |(p-n)/(p-1)|^{p-1}
/// for p != n and omega_{n-1} for p = n.
inline CapacityConvention default_capacity_convention(const StructuralParams& params) {
    const double omega = unit_sphere_area(params.n);
    if (params.regime() == Regime::border_n) return {omega};
    return {omega * std::pow(std::abs(radial_alpha(params)), params.p - 1.0)};
}

/// Variational p-capacity of the condenser (closed ball r, open ball R).
///
///   p > n : norm (R^alpha - r^alpha)^{1-p}
///   p = n : norm (log(R/r))^{1-n}
///   p < n : norm (r^alpha - R^alpha)^{1-p}   (absolute-value convention so
///           the base is positive; alpha < 0 makes r^alpha > R^alpha)
inline double pcapacity(const StructuralParams& params, double r, double R,
                        const CapacityConvention& conv) {
    conv.validate();
    if (!(0.0 < r && r < R) || !std::isfinite(r) || !std::isfinite(R))
        throw std::invalid_argument("pcapacity: need 0 < r < R, finite");
    const double p = params.p;
    double base = 0.0;
    switch (params.regime()) {
        case Regime::border_n:
            return conv.normalization * std::pow(std::log(R / r), 1.0 - params.n);
        case Regime::gt_n:
            base = std::pow(R, radial_alpha(params)) - std::pow(r, radial_alpha(params));
            break;
        case Regime::sub_n:
            base = std::pow(r, radial_alpha(params)) - std::pow(R, radial_alpha(params));
            break;
    }
    return conv.normalization * std::pow(base, 1.0 - p);
}

inline double pcapacity(const StructuralParams& params, double r, double R) {
    return pcapacity(params, r, R, default_capacity_convention(params));
}

/// Coordinate sigma(r) in which ball maxima of solutions are convex:
/// log r for p = n, -r^alpha for 1 < p < n (strictly increasing, alpha < 0).
inline double transformed_radius(const StructuralParams& params, double r) {
    if (!(r > 0.0) || !std::isfinite(r))
        throw std::invalid_argument("transformed_radius: need r > 0");
    switch (params.regime()) {
        case Regime::border_n: return std::log(r);
        case Regime::sub_n: return -std::pow(r, radial_alpha(params));
        case Regime::gt_n:
            throw std::invalid_argument("transformed_radius: no convexity coordinate for p > n");
    }
    throw std::logic_error("transformed_radius: unreachable");
}

/// Classical interpolation weight (p <= n only):
///   p = n    : lambda = log(r3/r2) / log(r3/r1)
///   1 < p < n: lambda = (r2^alpha - r3^alpha) / (r1^alpha - r3^alpha)
/// Defining property: lambda sigma(r1) + (1-lambda) sigma(r3) = sigma(r2)
/// with sigma = transformed_radius.
inline double classical_weight(const StructuralParams& params, const RadiiTriple& t) {
    t.validate();
    switch (params.regime()) {
        case Regime::border_n:
            return std::log(t.r3 / t.r2) / std::log(t.r3 / t.r1);
        case Regime::sub_n: {
            const double a = radial_alpha(params);
            const double p1 = std::pow(t.r1, a), p2 = std::pow(t.r2, a),
                         p3 = std::pow(t.r3, a);
            return (p2 - p3) / (p1 - p3);
        }
        case Regime::gt_n:
            throw std::invalid_argument("classical_weight: no classical formula for p > n");
    }
    throw std::logic_error("classical_weight: unreachable");
}

namespace detail {

// T = log((r2+r3)/(2 r2)), the outer-gap term shared by all explicit modes.
inline double outer_gap_log(const RadiiTriple& t) {
    return std::log((t.r2 + t.r3) / (2.0 * t.r2));
}

} // namespace detail

/// S = (log(2r3/(r2+r3)))^{1-n} + (log(r2/r1))^{1-n} + log(r3/r1): the
/// log-sum bounding the borderline energy integral, and the numerator of
/// the borderline weight exponent.
inline double border_log_sum(int n, const RadiiTriple& t) {
    t.validate();
    const double nd = static_cast<double>(n);
    return std::pow(std::log(2.0 * t.r3 / (t.r2 + t.r3)), 1.0 - nd) +
           std::pow(std::log(t.r2 / t.r1), 1.0 - nd) + std::log(t.r3 / t.r1);
}

/// The factor K multiplying -C in the explicit weights, lambda = exp(-C K).
///
///   border_n     K = (S/T)^{1/n},
///                S = (log(2r3/(r2+r3)))^{1-n} + (log(r2/r1))^{1-n} + log(r3/r1)
///   a_harmonic_n K = (log(2r3/(r2+r3)))^{(1-n)/n} T^{-1/n}
///   p_gt_n       K = T^{-1/p} ((r2+r3)/2)^{1-n/p}
///                    {Cap_p(B_{(r2+r3)/2}, B_{r3}) + Cap_p(B_{r1}, B_{r2})
///                     + r1^{n-p} - r3^{n-p}}^{1/p}
/// with T = log((r2+r3)/(2 r2)). K is scale-invariant in all three modes.
inline double lambda_exponent_factor(BoundMode mode, const StructuralParams& params,
                                     const RadiiTriple& t,
                                     std::optional<CapacityConvention> conv = std::nullopt) {
    t.validate();
    if (!mode_matches_regime(mode, params.regime()))
        throw std::invalid_argument("lambda_exponent_factor: mode does not match p/n regime");
    const double n = params.n, p = params.p;
    const double T = detail::outer_gap_log(t);
    if (!(T > 0.0)) throw std::logic_error("lambda_exponent_factor: outer gap log <= 0");
    switch (mode) {
        case BoundMode::border_n:
            return std::pow(border_log_sum(params.n, t) / T, 1.0 / n);
        case BoundMode::a_harmonic_n: {
            const double L1 = std::log(2.0 * t.r3 / (t.r2 + t.r3));
            return std::pow(L1, (1.0 - n) / n) * std::pow(T, -1.0 / n);
        }
        case BoundMode::p_gt_n: {
            const CapacityConvention cc =
                conv ? *conv : default_capacity_convention(params);
            const double mid = 0.5 * (t.r2 + t.r3);
            const double bracket = pcapacity(params, mid, t.r3, cc) +
                                   pcapacity(params, t.r1, t.r2, cc) +
                                   std::pow(t.r1, n - p) - std::pow(t.r3, n - p);
            if (!(bracket > 0.0))
                throw std::logic_error("lambda_exponent_factor: nonpositive capacity bracket");
            return std::pow(T, -1.0 / p) * std::pow(mid, 1.0 - n / p) *
                   std::pow(bracket, 1.0 / p);
        }
        case BoundMode::classical_sub_n:
        case BoundMode::classical_n:
            throw std::invalid_argument(
                "lambda_exponent_factor: classical modes have no exponent factor");
    }
    throw std::logic_error("lambda_exponent_factor: unreachable");
}

/// Interpolation weight for any mode. Classical modes ignore C; explicit
/// modes return exp(-C K) with K = lambda_exponent_factor.
inline double lambda_formula(BoundMode mode, const StructuralParams& params,
                             const RadiiTriple& t, double C = 1.0,
                             std::optional<CapacityConvention> conv = std::nullopt) {
    if (mode == BoundMode::classical_sub_n || mode == BoundMode::classical_n) {
        if (!mode_matches_regime(mode, params.regime()))
            throw std::invalid_argument("lambda_formula: mode does not match p/n regime");
        return classical_weight(params, t);
    }
    if (!(C > 0.0) || !std::isfinite(C))
        throw std::invalid_argument("lambda_formula: need C > 0");
    return std::exp(-C * lambda_exponent_factor(mode, params, t, conv));
}

/// Limit weight exp(-C) of the explicit formulas as r3/r2, r2/r1 -> infinity
/// at fixed ratio; the quantity driving the bounded-entire-solution argument.
inline double lambda_infinity(double C) {
    if (!(C > 0.0) || !std::isfinite(C))
        throw std::invalid_argument("lambda_infinity: need C > 0");
    return std::exp(-C);
}

/// A radii triple with its chosen interpolation weight.
struct ThreeSpheresBound {
    RadiiTriple triple;
    double lambda = 0.5;
    BoundMode mode = BoundMode::classical_n;
    std::optional<double> C; // set for explicit modes, absent for classical

    void validate() const {
        triple.validate();
        if (!(lambda > 0.0 && lambda <= 1.0))
            throw std::invalid_argument("ThreeSpheresBound: need 0 < lambda <= 1");
        if (C && !(*C > 0.0))
            throw std::invalid_argument("ThreeSpheresBound: need C > 0");
    }
};

/// Build a bound with lambda computed from the mode's formula.
inline ThreeSpheresBound make_bound(BoundMode mode, const StructuralParams& params,
                                    const RadiiTriple& t,
                                    std::optional<double> C = std::nullopt,
                                    std::optional<CapacityConvention> conv = std::nullopt) {
    ThreeSpheresBound b;
    b.triple = t;
    b.mode = mode;
    const bool classical =
        (mode == BoundMode::classical_sub_n || mode == BoundMode::classical_n);
    if (classical) {
        b.C = std::nullopt;
        b.lambda = lambda_formula(mode, params, t);
    } else {
        if (!C) throw std::invalid_argument("make_bound: explicit modes require C");
        b.C = C;
        b.lambda = lambda_formula(mode, params, t, *C, conv);
    }
    b.validate();
    return b;
}

} // namespace trisphere
