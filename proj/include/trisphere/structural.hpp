#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace trisphere {

/// Exponent regime of the equation class. Classification is total: exactly
/// one case holds for every valid parameter set.
enum class Regime { sub_n, border_n, gt_n };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::sub_n: return "sub_n";
        case Regime::border_n: return "border_n";
        case Regime::gt_n: return "gt_n";
    }
    return "?";
}

/// Structural constants of the operator pair: dimension n >= 2, growth
/// exponent p > 1, ellipticity window 0 < a0 <= a1, drift constant b1 >= 0.
struct StructuralParams {
    int n = 2;
    double p = 2.0;
    double a0 = 1.0;
    double a1 = 1.0;
    double b1 = 0.0;

    void validate() const {
        if (n < 2) throw std::invalid_argument("StructuralParams: n must be >= 2");
        if (!(p > 1.0) || !std::isfinite(p))
            throw std::invalid_argument("StructuralParams: p must satisfy 1 < p < inf");
        if (!(a0 > 0.0) || !(a0 <= a1) || !std::isfinite(a1))
            throw std::invalid_argument("StructuralParams: need 0 < a0 <= a1 < inf");
        if (!(b1 >= 0.0) || !std::isfinite(b1))
            throw std::invalid_argument("StructuralParams: need 0 <= b1 < inf");
    }

    Regime regime() const {
        const double nd = static_cast<double>(n);
        if (p < nd) return Regime::sub_n;
        if (p == nd) return Regime::border_n;
        return Regime::gt_n;
    }
};

enum class EnvelopeMode { global_decay, constant };

/// Radial envelope g bounding the drift: |B(x,t,h)| <= g(x)|h|^{p-1}.
/// global_decay: g = b1 on |x| <= 1 and b1/|x| outside; constant: g = b1.
struct GrowthEnvelope {
    EnvelopeMode mode = EnvelopeMode::global_decay;
    double b1 = 0.0;
};

/// Evaluate the envelope at a given distance from the center. Total on
/// radius >= 0; both branches agree at radius = 1.
inline double envelope_eval(const GrowthEnvelope& env, double radius) {
    if (!(radius >= 0.0))
        throw std::invalid_argument("envelope_eval: radius must be >= 0");
    if (env.mode == EnvelopeMode::constant || radius <= 1.0) return env.b1;
    return env.b1 / radius;
}

using FluxMap = std::function<std::vector<double>(
    std::span<const double> x, double t, std::span<const double> h)>;
using DriftMap = std::function<double(
    std::span<const double> x, double t, std::span<const double> h)>;
using WeightMap = std::function<double(std::span<const double> x, double t)>;

/// An evaluable operator pair (A, B) together with its declared structural
/// constants and drift envelope. A and B are deterministic black boxes; the
/// declared inequalities are checked by sampling, not assumed.
///
/// When `weight` is set, A has the scalar-weight form
///   A(x,t,h) = weight(x,t) * |h|^{p-2} h,
/// which is what the grid solver discretizes. `unit_weight` additionally
/// marks weight == 1, the form the radial engine integrates.
struct EquationSpec {
    StructuralParams params;
    GrowthEnvelope envelope;
    FluxMap A;
    DriftMap B;
    WeightMap weight;
    bool unit_weight = false;
    std::string name;
};

/// One probe for structure checking: base point, solution value, gradient.
struct StructureSample {
    std::vector<double> x;
    double t = 0.0;
    std::vector<double> h;
};

/// Worst-case margins of the three structural inequalities over a sample
/// set. Margins are signed slack; negative means the inequality failed at
/// some sample. Zero-gradient samples contribute zero ellipticity/growth
/// margin (both sides vanish there).
struct StructureReport {
    double ellipticity_margin = 0.0; // min of A.h - a0 |h|^p
    double growth_margin = 0.0;      // min of a1 |h|^{p-1} - |A|
    double drift_margin = 0.0;       // min of g(x) |h|^{p-1} - |B|
    bool pass = false;
    double tol_rel = 0.0;
};

/// count equally spaced points from a to b inclusive.
inline std::vector<double> linspace(double a, double b, int count) {
    if (count < 2) throw std::invalid_argument("linspace: need count >= 2");
    std::vector<double> out(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        out[static_cast<std::size_t>(i)] =
            a + (b - a) * static_cast<double>(i) / (count - 1);
    out.back() = b;
    return out;
}

namespace detail {

inline double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double c : v) s += c * c;
    return std::sqrt(s);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline bool all_finite(std::span<const double> v) {
    for (double c : v)
        if (!std::isfinite(c)) return false;
    return true;
}

} // namespace detail

/// Sample-based verification of the structural inequalities. Pass/fail uses
/// a relative tolerance against the magnitude of the bounding side of each
/// inequality; the reported margins stay raw.
inline StructureReport check_structure(const EquationSpec& spec,
                                       std::span<const StructureSample> samples,
                                       double tol_rel = 1e-12) {
    spec.params.validate();
    if (samples.empty())
        throw std::invalid_argument("check_structure: sample list is empty");
    if (!spec.A || !spec.B)
        throw std::invalid_argument("check_structure: spec has no evaluable A/B");

    const double p = spec.params.p;
    StructureReport rep;
    rep.tol_rel = tol_rel;
    double worst_ell = std::numeric_limits<double>::infinity();
    double worst_grow = std::numeric_limits<double>::infinity();
    double worst_drift = std::numeric_limits<double>::infinity();
    bool pass = true;

    for (const auto& s : samples) {
        if (!detail::all_finite(s.x) || !std::isfinite(s.t) || !detail::all_finite(s.h))
            throw std::invalid_argument("check_structure: non-finite sample entry");
        if (s.x.size() != s.h.size())
            throw std::invalid_argument("check_structure: point/gradient dimension mismatch");

        const double hn = detail::norm2(s.h);
        const double r = detail::norm2(s.x);
        const double g = envelope_eval(spec.envelope, r);

        double ell, grow, drift, ell_scale, grow_scale, drift_scale;
        if (hn == 0.0) {
            // Both sides of the A-inequalities vanish at zero gradient.
            ell = grow = 0.0;
            ell_scale = grow_scale = 1.0;
            const double Bv = spec.B(s.x, s.t, s.h);
            if (!std::isfinite(Bv))
                throw std::invalid_argument("check_structure: B returned non-finite value");
            drift = -std::fabs(Bv);
            drift_scale = 1.0;
        } else {
            const auto Av = spec.A(s.x, s.t, s.h);
            if (!detail::all_finite(Av))
                throw std::invalid_argument("check_structure: A returned non-finite value");
            const double Bv = spec.B(s.x, s.t, s.h);
            if (!std::isfinite(Bv))
                throw std::invalid_argument("check_structure: B returned non-finite value");
            const double hp = std::pow(hn, p);
            const double hp1 = std::pow(hn, p - 1.0);
            ell = detail::dot(Av, s.h) - spec.params.a0 * hp;
            ell_scale = std::max(spec.params.a0 * hp, 1.0);
            grow = spec.params.a1 * hp1 - detail::norm2(Av);
            grow_scale = std::max(spec.params.a1 * hp1, 1.0);
            drift = g * hp1 - std::fabs(Bv);
            drift_scale = std::max(g * hp1, 1.0);
        }
        worst_ell = std::min(worst_ell, ell);
        worst_grow = std::min(worst_grow, grow);
        worst_drift = std::min(worst_drift, drift);
        if (ell < -tol_rel * ell_scale || grow < -tol_rel * grow_scale ||
            drift < -tol_rel * drift_scale)
            pass = false;
    }

    rep.ellipticity_margin = worst_ell;
    rep.growth_margin = worst_grow;
    rep.drift_margin = worst_drift;
    rep.pass = pass;
    return rep;
}

} // namespace trisphere
