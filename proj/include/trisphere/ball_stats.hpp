#pragma once

#include "trisphere/bounds.hpp"
#include "trisphere/fdm2d.hpp"
#include "trisphere/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace trisphere {

/// ball_max: extrema over the solid ball (intersected with the carried
/// domain); sphere_max: extrema over the sphere of that radius (a shell of
/// thickness h on grids). The two agree for radially nondecreasing sources.
enum class BallGeometry { ball_max, sphere_max };

inline const char* geometry_name(BallGeometry g) {
    return g == BallGeometry::ball_max ? "ball_max" : "sphere_max";
}

/// Sampled radial statistics of a solution: M(r) = sup and m(r) = inf over
/// the ball or sphere of radius r about the center. Finiteness of both is
/// part of the contract (the min form additionally assumes m > -infinity,
/// which is automatic for these discrete sources).
struct BallProfile {
    std::vector<double> center;
    std::vector<double> radii;
    std::vector<double> M;
    std::vector<double> m;
    BallGeometry geometry = BallGeometry::sphere_max;
    StructuralParams params;
    EnvelopeMode envelope = EnvelopeMode::global_decay;
    std::string source;

    void validate() const {
        if (radii.empty() || radii.size() != M.size() || radii.size() != m.size())
            throw std::invalid_argument("BallProfile: inconsistent array sizes");
        double prev = 0.0;
        for (double r : radii) {
            if (!(r > prev) || !std::isfinite(r))
                throw std::invalid_argument("BallProfile: radii must be positive increasing");
            prev = r;
        }
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (!std::isfinite(M[i]) || !std::isfinite(m[i]))
                throw std::invalid_argument("BallProfile: non-finite statistics");
            if (M[i] < m[i])
                throw std::invalid_argument("BallProfile: M < m at some radius");
        }
    }

    std::size_t index_of(double r) const {
        for (std::size_t i = 0; i < radii.size(); ++i)
            if (std::fabs(radii[i] - r) <= 1e-9 * std::max(1.0, std::fabs(r))) return i;
        throw std::invalid_argument("BallProfile: radius " + std::to_string(r) +
                                    " not sampled");
    }
};

namespace detail {

inline double interp_profile(const RadialProfile& prof, double r) {
    const auto& xs = prof.mesh;
    const double lo = xs.front(), hi = xs.back();
    const double slack = 1e-9 * std::max(1.0, hi);
    if (r < lo - slack || r > hi + slack)
        throw std::invalid_argument("radial profile: radius outside the carried annulus");
    const double rc = std::clamp(r, lo, hi);
    auto it = std::upper_bound(xs.begin(), xs.end(), rc);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(
        1, std::min<std::ptrdiff_t>(it - xs.begin(), static_cast<std::ptrdiff_t>(xs.size()) - 1)));
    const double t = (rc - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return prof.values[i - 1] + t * (prof.values[i] - prof.values[i - 1]);
}

} // namespace detail

/// Statistics of a sampled radial profile. The carried domain is the
/// annulus [mesh.front(), mesh.back()]; ball extrema scan the carried part
/// of the ball, so for monotone profiles they agree with sphere values.
inline BallProfile ball_profile(const RadialProfile& src, std::span<const double> radii,
                                BallGeometry geometry) {
    src.validate();
    BallProfile prof;
    prof.center.assign(static_cast<std::size_t>(src.params.n), 0.0);
    prof.geometry = geometry;
    prof.params = src.params;
    prof.source = std::string("radial:") + provenance_name(src.provenance);
    prof.radii.assign(radii.begin(), radii.end());
    for (double r : prof.radii) {
        const double at_r = detail::interp_profile(src, r);
        if (geometry == BallGeometry::sphere_max) {
            prof.M.push_back(at_r);
            prof.m.push_back(at_r);
        } else {
            double hi = at_r, lo = at_r;
            for (std::size_t i = 0; i < src.mesh.size() && src.mesh[i] <= r; ++i) {
                hi = std::max(hi, src.values[i]);
                lo = std::min(lo, src.values[i]);
            }
            prof.M.push_back(hi);
            prof.m.push_back(lo);
        }
    }
    prof.validate();
    return prof;
}

/// Statistics of a closed-form radial solution on the annulus
/// [domain_lo, max radius]; sphere values are exact, ball extrema use dense
/// sampling (dense points per ball) plus the exact endpoints.
inline BallProfile ball_profile(const RadialSolution& src, double domain_lo,
                                std::span<const double> radii, BallGeometry geometry,
                                int dense = 4097) {
    if (!(domain_lo > 0.0))
        throw std::invalid_argument("ball_profile: need domain_lo > 0");
    BallProfile prof;
    prof.center.assign(static_cast<std::size_t>(src.params.n), 0.0);
    prof.geometry = geometry;
    prof.params = src.params;
    prof.source = std::string("radial:") + provenance_name(src.provenance) + ":" + src.name;
    prof.radii.assign(radii.begin(), radii.end());
    for (double r : prof.radii) {
        if (r < domain_lo * (1.0 - 1e-12))
            throw std::invalid_argument("ball_profile: radius below the annulus");
        if (geometry == BallGeometry::sphere_max) {
            const double v = src.u(r);
            prof.M.push_back(v);
            prof.m.push_back(v);
        } else {
            double hi = -std::numeric_limits<double>::infinity();
            double lo = std::numeric_limits<double>::infinity();
            for (double s : linspace(domain_lo, r, dense)) {
                const double v = src.u(s);
                hi = std::max(hi, v);
                lo = std::min(lo, v);
            }
            prof.M.push_back(hi);
            prof.m.push_back(lo);
        }
    }
    prof.validate();
    return prof;
}

/// Statistics of a grid solution about (px, py). Discrete semantics of the
/// essential extrema: max/min over carried nodes within distance r
/// (ball_max) or within the shell [r - h, r] (sphere_max). Balls must stay
/// inside the carried domain and satisfy r >= 2h so node sets are rich.
inline BallProfile ball_profile(const GridFunction2D& src, double px, double py,
                                std::span<const double> radii, BallGeometry geometry,
                                const StructuralParams& params,
                                EnvelopeMode envelope = EnvelopeMode::global_decay) {
    src.validate();
    BallProfile prof;
    prof.center = {px, py};
    prof.geometry = geometry;
    prof.params = params;
    prof.envelope = envelope;
    prof.source = "grid";
    prof.radii.assign(radii.begin(), radii.end());
    const double off = std::hypot(px - src.cx, py - src.cy);
    for (double r : prof.radii) {
        if (r < 2.0 * src.h)
            throw std::invalid_argument("ball_profile: grid radius must be >= 2h");
        if (off + r > src.r_out * (1.0 + 1e-12))
            throw std::invalid_argument("ball_profile: ball leaves the grid domain");
        if (geometry == BallGeometry::ball_max && src.r_in > 0.0 && off - r < src.r_in)
            throw std::invalid_argument(
                "ball_profile: solid ball overlaps the annulus hole; use sphere_max");
        double hi = -std::numeric_limits<double>::infinity();
        double lo = std::numeric_limits<double>::infinity();
        std::size_t hits = 0;
        for (int j = -src.N; j <= src.N; ++j) {
            for (int i = -src.N; i <= src.N; ++i) {
                if (src.kind(i, j) == NodeKind::exterior) continue;
                const double d = std::hypot(src.x(i) - px, src.y(j) - py);
                const bool in = geometry == BallGeometry::ball_max
                                    ? d <= r * (1.0 + 1e-12)
                                    : (d <= r * (1.0 + 1e-12) && d >= r - src.h);
                if (!in) continue;
                hi = std::max(hi, src.at(i, j));
                lo = std::min(lo, src.at(i, j));
                ++hits;
            }
        }
        if (hits == 0)
            throw std::invalid_argument("ball_profile: empty node set at radius " +
                                        std::to_string(r));
        prof.M.push_back(hi);
        prof.m.push_back(lo);
    }
    prof.validate();
    return prof;
}

/// Mirror image u -> -u: swaps the roles of M and m. Turns a subsolution
/// profile into a supersolution profile for the sign-flipped drift, which
/// is how the min-form (dual) checks are exercised.
inline BallProfile negate_profile(const BallProfile& prof) {
    BallProfile out = prof;
    out.source = "negated:" + prof.source;
    for (std::size_t i = 0; i < prof.radii.size(); ++i) {
        out.M[i] = -prof.m[i];
        out.m[i] = -prof.M[i];
    }
    return out;
}

/// Largest admissible interpolation weight for a profile and triple:
/// lambda* = (M(r3) - M(r2)) / (M(r3) - M(r1)); the arithmetic inequality
/// M(r2) <= lambda M(r1) + (1 - lambda) M(r3) holds iff lambda <= lambda*.
/// When M(r3) = M(r1) every weight works and `all` is set.
struct LambdaStar {
    bool all = false;
    double value = 1.0;
};

inline LambdaStar empirical_lambda_star(const BallProfile& prof, const RadiiTriple& t) {
    t.validate();
    const double M1 = prof.M[prof.index_of(t.r1)];
    const double M2 = prof.M[prof.index_of(t.r2)];
    const double M3 = prof.M[prof.index_of(t.r3)];
    const double scale = std::max({std::fabs(M1), std::fabs(M2), std::fabs(M3), 1e-300});
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * scale;
    if (M2 < M1 - slack || M3 < M2 - slack)
        throw std::invalid_argument(
            "empirical_lambda_star: M not nondecreasing over the triple "
            "(maximum-principle violation; solver defect?)");
    LambdaStar out;
    if (M3 - M1 <= slack) {
        out.all = true;
        out.value = 1.0;
        return out;
    }
    out.all = false;
    out.value = std::clamp((M3 - M2) / (M3 - M1), 0.0, 1.0);
    return out;
}

/// Convexity of M in the transformed radial coordinate, probed on every
/// consecutive radii triple with the classical weight: margin
/// lambda M(r1) + (1 - lambda) M(r3) - M(r2) must be >= -tol throughout.
struct ConvexityReport {
    double min_margin = 0.0;
    std::size_t worst_index = 0; // center index of the worst triple
    bool convex = false;
    double tol_abs = 0.0;
};

inline ConvexityReport convexity_check(const BallProfile& prof,
                                       const StructuralParams& params,
                                       double tol_rel = 1e-12) {
    prof.validate();
    if (prof.radii.size() < 3)
        throw std::invalid_argument("convexity_check: need at least 3 radii");
    double scale = 0.0;
    for (double v : prof.M) scale = std::max(scale, std::fabs(v));
    ConvexityReport rep;
    rep.tol_abs = tol_rel * std::max(scale, 1.0);
    rep.min_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < prof.radii.size(); ++i) {
        const RadiiTriple t{prof.radii[i - 1], prof.radii[i], prof.radii[i + 1]};
        const double lam = classical_weight(params, t);
        const double margin = lam * prof.M[i - 1] + (1.0 - lam) * prof.M[i + 1] - prof.M[i];
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.worst_index = i;
        }
    }
    rep.convex = rep.min_margin >= -rep.tol_abs;
    return rep;
}

} // namespace trisphere
