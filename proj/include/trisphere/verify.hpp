#pragma once

#include "trisphere/ball_stats.hpp"
#include "trisphere/bounds.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace trisphere {

/// Outcome of one arithmetic three-spheres check. Primal form:
///   margin = lambda M(r1) + (1-lambda) M(r3) - M(r2) >= -tol;
/// dual (min) form:
///   margin = m(r2) - lambda m(r1) - (1-lambda) m(r3) >= -tol.
struct VerificationReport {
    RadiiTriple triple;
    double lambda_used = 0.0;
    double margin = 0.0;
    bool passed = false;
    bool dual = false;
    double tol_abs = 0.0;
};

inline VerificationReport check_three_spheres(const BallProfile& prof,
                                              const ThreeSpheresBound& bound,
                                              bool dual = false, double tol_rel = 1e-9) {
    prof.validate();
    bound.validate();
    if (!mode_matches_regime(bound.mode, prof.params.regime()))
        throw std::invalid_argument(
            "check_three_spheres: bound mode does not match the profile's p/n regime");
    if (prof.envelope == EnvelopeMode::constant && !(bound.triple.r3 <= 1.0))
        throw std::invalid_argument(
            "check_three_spheres: constant drift envelope is local; need r3 <= 1");
    if (!(tol_rel >= 0.0))
        throw std::invalid_argument("check_three_spheres: need tol_rel >= 0");

    const RadiiTriple& t = bound.triple;
    const double lam = bound.lambda;
    VerificationReport rep;
    rep.triple = t;
    rep.lambda_used = lam;
    rep.dual = dual;
    double v1, v2, v3;
    if (!dual) {
        v1 = prof.M[prof.index_of(t.r1)];
        v2 = prof.M[prof.index_of(t.r2)];
        v3 = prof.M[prof.index_of(t.r3)];
        rep.margin = lam * v1 + (1.0 - lam) * v3 - v2;
    } else {
        v1 = prof.m[prof.index_of(t.r1)];
        v2 = prof.m[prof.index_of(t.r2)];
        v3 = prof.m[prof.index_of(t.r3)];
        rep.margin = v2 - lam * v1 - (1.0 - lam) * v3;
    }
    const double scale = std::max({std::fabs(v1), std::fabs(v2), std::fabs(v3)});
    rep.tol_abs = tol_rel * scale;
    rep.passed = rep.margin >= -rep.tol_abs;
    return rep;
}

/// One profile with the triples it should be checked on.
struct CalibrationFamilyMember {
    BallProfile profile;
    std::vector<RadiiTriple> triples;
};

/// Smallest constant making the exponential weight admissible family-wide:
/// C_min = max over (profile, triple) of -ln(lambda*) / K, where
/// lambda_formula = exp(-C K). With C = C_min every member passes; any
/// smaller C fails at the binding pair.
struct CalibrationResult {
    double C_min = 0.0;
    std::size_t family_size = 0; // number of profiles
    std::size_t pair_count = 0;  // number of (profile, triple) evaluations
    RadiiTriple binding_triple;
    std::size_t binding_member = 0;
};

inline CalibrationResult calibrate_constant(
    std::span<const CalibrationFamilyMember> members, BoundMode mode,
    std::optional<CapacityConvention> conv = std::nullopt) {
    if (members.empty())
        throw std::invalid_argument("calibrate_constant: empty family");
    CalibrationResult out;
    out.family_size = members.size();
    out.C_min = -std::numeric_limits<double>::infinity();
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
        const auto& member = members[mi];
        member.profile.validate();
        if (member.triples.empty())
            throw std::invalid_argument("calibrate_constant: member without triples");
        for (const RadiiTriple& t : member.triples) {
            const LambdaStar ls = empirical_lambda_star(member.profile, t);
            if (ls.all)
                throw std::invalid_argument(
                    "calibrate_constant: member with lambda* = 'all' cannot constrain C");
            if (!(ls.value > 0.0))
                throw std::invalid_argument(
                    "calibrate_constant: lambda* = 0 admits no finite constant");
            const double K = lambda_exponent_factor(mode, member.profile.params, t, conv);
            const double cand = -std::log(ls.value) / K;
            ++out.pair_count;
            if (cand > out.C_min) {
                out.C_min = cand;
                out.binding_triple = t;
                out.binding_member = mi;
            }
        }
    }
    if (!(out.C_min > 0.0))
        throw std::invalid_argument(
            "calibrate_constant: family places no positive constraint on C");
    return out;
}

/// Shape of the comparison function in the energy estimates.
///   log_sub:   phi(t) = -log((M(r3) - t + eps) / (M(r3) - M(r1) + eps))
///   log_super: phi(t) = -log((t - m(r3) + eps) / (m(r1) - m(r3) + eps))
enum class PhiMode { log_sub, log_super };

struct EnergyRatioOptions {
    double epsilon_rel = 1e-8;  // eps = epsilon_rel * oscillation
    int quadrature_points = 4097;
};

namespace detail {

// Composite Simpson quadrature of f on [a, b] with an odd point count.
inline double simpson(const std::function<double(double)>& f, double a, double b,
                      int points) {
    if (points < 3) points = 3;
    if (points % 2 == 0) ++points;
    const double h = (b - a) / (points - 1);
    double acc = f(a) + f(b);
    for (int i = 1; i + 1 < points; ++i)
        acc += f(a + h * i) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

// Ratio of the phi-energy over the lemma's region to the lemma's radii
// bracket, for a radial source given by u, du on [domain_lo, r3].
inline double energy_ratio_radial(const std::function<double(double)>& u,
                                  const std::function<double(double)>& du,
                                  const StructuralParams& params, PhiMode mode,
                                  const RadiiTriple& t, double domain_lo,
                                  const EnergyRatioOptions& opt) {
    params.validate();
    t.validate();
    if (!(domain_lo > 0.0) || domain_lo > t.r1)
        throw std::invalid_argument("energy_ratio: need 0 < domain_lo <= r1");
    const double n = params.n, p = params.p;

    // Reference levels M(r1), M(r3) (or m) over the carried balls.
    auto extremum = [&](double r, bool top) {
        double best = u(domain_lo);
        for (double s : linspace(domain_lo, r, 2049))
            best = top ? std::max(best, u(s)) : std::min(best, u(s));
        return best;
    };
    const bool sub = mode == PhiMode::log_sub;
    const double lvl1 = extremum(t.r1, sub);
    const double lvl3 = extremum(t.r3, sub);
    const double osc = sub ? lvl3 - lvl1 : lvl1 - lvl3;
    const double eps = opt.epsilon_rel * osc;
    if (!(osc > 0.0) && !(eps > 0.0))
        throw std::invalid_argument(
            "energy_ratio: degenerate comparison function (zero oscillation, eps = 0)");

    double lo, hi, bracket;
    switch (params.regime()) {
        case Regime::border_n:
            lo = t.r2;
            hi = 0.5 * (t.r2 + t.r3);
            bracket = border_log_sum(params.n, t);
            break;
        case Regime::sub_n: {
            lo = domain_lo;
            hi = t.r2;
            const double delta = 1.0 - t.r2 / t.r3;
            bracket = std::pow(t.r3, n - p) / std::pow(delta, p);
            break;
        }
        case Regime::gt_n:
            throw std::invalid_argument("energy_ratio: no energy lemma bracket for p > n");
        default:
            throw std::logic_error("energy_ratio: unreachable");
    }

    const double omega = unit_sphere_area(params.n);
    auto integrand = [&](double s) {
        const double denom = sub ? lvl3 - u(s) + eps : u(s) - lvl3 + eps;
        const double mag = std::fabs(du(s)) / denom;
        return omega * std::pow(s, n - 1.0) * std::pow(mag, p);
    };
    return detail::simpson(integrand, lo, hi, opt.quadrature_points) / bracket;
}

} // namespace detail

/// Energy-ratio diagnostic: quadrature of the phi-energy integral over the
/// energy lemma's region, divided by the lemma's radii bracket. Reported
/// for empirical boundedness across families; never a pass/fail gate (the
/// lemma constants are existential).
///   p = n    : region is the annulus (r2, (r2+r3)/2), bracket is the
///              border log-sum S(triple);
///   1 < p < n: region is the carried part of the ball B_{r2}, bracket is
///              r3^{n-p} / delta^p with delta = 1 - r2/r3.
inline double energy_ratio_diagnostic(const RadialSolution& sol, double domain_lo,
                                      PhiMode mode, const RadiiTriple& t,
                                      const EnergyRatioOptions& opt = {}) {
    return detail::energy_ratio_radial(sol.u, sol.du, sol.params, mode, t, domain_lo, opt);
}

inline double energy_ratio_diagnostic(const RadialProfile& prof, PhiMode mode,
                                      const RadiiTriple& t,
                                      const EnergyRatioOptions& opt = {}) {
    prof.validate();
    if (t.r3 > prof.mesh.back() * (1.0 + 1e-12))
        throw std::invalid_argument("energy_ratio: r3 outside the profile annulus");
    auto u = [&prof](double r) { return detail::interp_profile(prof, r); };
    auto du = [&prof](double r) {
        RadialProfile tmp; // reuse linear interpolation over the derivative samples
        tmp.mesh = prof.mesh;
        tmp.values = prof.derivative_values;
        tmp.derivative_values = prof.derivative_values;
        tmp.params = prof.params;
        return detail::interp_profile(tmp, r);
    };
    return detail::energy_ratio_radial(u, du, prof.params, mode, t, prof.mesh.front(), opt);
}

/// Grid variant (n = 2): nodal quadrature with cell area h^2 over interior
/// nodes in the region; reference levels from carried-node ball extrema.
inline double energy_ratio_diagnostic(const GridFunction2D& grid,
                                      const StructuralParams& params, PhiMode mode,
                                      const RadiiTriple& t,
                                      const EnergyRatioOptions& opt = {}) {
    grid.validate();
    params.validate();
    t.validate();
    if (params.n != 2)
        throw std::invalid_argument("energy_ratio: grid sources are two-dimensional");

    // Reference levels from ball extrema on disks; annuli carry no nodes
    // inside the hole, so sphere extrema are the matching notion there.
    const BallGeometry lvl_geom =
        grid.r_in > 0.0 ? BallGeometry::sphere_max : BallGeometry::ball_max;
    const std::vector<double> lvl_radii = {t.r1, t.r3};
    const BallProfile bp = ball_profile(grid, grid.cx, grid.cy, lvl_radii,
                                        lvl_geom, params);
    const bool sub = mode == PhiMode::log_sub;
    const double lvl1 = sub ? bp.M[0] : bp.m[0];
    const double lvl3 = sub ? bp.M[1] : bp.m[1];
    const double osc = sub ? lvl3 - lvl1 : lvl1 - lvl3;
    const double eps = opt.epsilon_rel * osc;
    if (!(osc > 0.0) && !(eps > 0.0))
        throw std::invalid_argument(
            "energy_ratio: degenerate comparison function (zero oscillation, eps = 0)");

    double lo, hi, bracket;
    const double p = params.p;
    switch (params.regime()) {
        case Regime::border_n:
            lo = t.r2;
            hi = 0.5 * (t.r2 + t.r3);
            bracket = border_log_sum(params.n, t);
            break;
        case Regime::sub_n: {
            lo = 0.0;
            hi = t.r2;
            const double delta = 1.0 - t.r2 / t.r3;
            bracket = std::pow(t.r3, params.n - p) / std::pow(delta, p);
            break;
        }
        default:
            throw std::invalid_argument("energy_ratio: no energy lemma bracket for p > n");
    }

    double acc = 0.0;
    for (int j = -grid.N; j <= grid.N; ++j) {
        for (int i = -grid.N; i <= grid.N; ++i) {
            if (grid.kind(i, j) != NodeKind::interior) continue;
            const double d = std::hypot(grid.x(i) - grid.cx, grid.y(j) - grid.cy);
            if (d < lo || d > hi) continue;
            const double gx = (grid.at(i + 1, j) - grid.at(i - 1, j)) / (2.0 * grid.h);
            const double gy = (grid.at(i, j + 1) - grid.at(i, j - 1)) / (2.0 * grid.h);
            const double uu = grid.at(i, j);
            const double denom = sub ? lvl3 - uu + eps : uu - lvl3 + eps;
            const double mag = std::hypot(gx, gy) / denom;
            acc += grid.h * grid.h * std::pow(mag, p);
        }
    }
    return acc / bracket;
}

/// Arithmetic step of the bounded-entire-solution contradiction: with
/// 0 <= M_r1, M_r2 <= M_bound and limit weight lambda_inf, report
/// contradiction iff M_r2 - (1 - lambda_inf) M_bound > lambda_inf M_r1 + tol.
inline bool liouville_check(double M_bound, double lambda_inf, double M_r1, double M_r2,
                            double tol = 0.0) {
    if (!(lambda_inf > 0.0 && lambda_inf < 1.0))
        throw std::invalid_argument("liouville_check: need 0 < lambda_inf < 1");
    if (!(M_bound >= 0.0) || !std::isfinite(M_bound))
        throw std::invalid_argument("liouville_check: need finite M_bound >= 0");
    if (!(M_r1 >= 0.0 && M_r1 <= M_bound) || !(M_r2 >= 0.0 && M_r2 <= M_bound))
        throw std::invalid_argument("liouville_check: need 0 <= M_r1, M_r2 <= M_bound");
    if (!(tol >= 0.0)) throw std::invalid_argument("liouville_check: need tol >= 0");
    return M_r2 - (1.0 - lambda_inf) * M_bound > lambda_inf * M_r1 + tol;
}

} // namespace trisphere
