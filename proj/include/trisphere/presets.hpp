#pragma once

#include "trisphere/structural.hpp"

#include <cmath>
#include <numeric>

namespace trisphere {

namespace detail {

inline std::vector<double> scaled_plaplace_flux(double weight, double p,
                                                std::span<const double> h) {
    std::vector<double> out(h.begin(), h.end());
    const double hn = norm2(h);
    const double factor = (hn == 0.0) ? 0.0 : weight * std::pow(hn, p - 2.0);
    for (double& c : out) c *= factor;
    return out;
}

} // namespace detail

/// Named operator presets.
///
///   p-laplace              A = |h|^{p-2} h, B = 0 (a0 = a1 = 1)
///   weighted-p-laplace     A = a(x) |h|^{p-2} h with a(x) oscillating
///                          between a0 and a1, B = 0
///   riccati-extremal-plus  A = |h|^{p-2} h, B = +g(x) |h|^{p-1}
///   riccati-extremal-minus A = |h|^{p-2} h, B = -g(x) |h|^{p-1}
///
/// The Riccati pair saturates the drift envelope with equality, which is
/// what makes its radial solutions usable as extremal ground truth.
inline EquationSpec make_preset(const std::string& name, StructuralParams params,
                                EnvelopeMode env_mode = EnvelopeMode::global_decay) {
    params.validate();
    EquationSpec spec;
    spec.name = name;
    spec.envelope = GrowthEnvelope{env_mode, params.b1};

    const double p = params.p;
    if (name == "p-laplace") {
        params.a0 = params.a1 = 1.0;
        spec.params = params;
        spec.weight = [](std::span<const double>, double) { return 1.0; };
        spec.unit_weight = true;
        spec.A = [p](std::span<const double>, double, std::span<const double> h) {
            return detail::scaled_plaplace_flux(1.0, p, h);
        };
        spec.B = [](std::span<const double>, double, std::span<const double>) {
            return 0.0;
        };
    } else if (name == "weighted-p-laplace") {
        spec.params = params;
        const double a0 = params.a0, a1 = params.a1;
        auto w = [a0, a1](std::span<const double> x, double) {
            double s = 0.0;
            for (double c : x) s += c;
            return a0 + 0.5 * (a1 - a0) * (1.0 + std::sin(s));
        };
        spec.weight = w;
        spec.unit_weight = (a0 == a1);
        spec.A = [w, p](std::span<const double> x, double t, std::span<const double> h) {
            return detail::scaled_plaplace_flux(w(x, t), p, h);
        };
        spec.B = [](std::span<const double>, double, std::span<const double>) {
            return 0.0;
        };
    } else if (name == "riccati-extremal-plus" || name == "riccati-extremal-minus") {
        params.a0 = params.a1 = 1.0;
        spec.params = params;
        const double sign = (name == "riccati-extremal-plus") ? 1.0 : -1.0;
        const GrowthEnvelope env = spec.envelope;
        spec.weight = [](std::span<const double>, double) { return 1.0; };
        spec.unit_weight = true;
        spec.A = [p](std::span<const double>, double, std::span<const double> h) {
            return detail::scaled_plaplace_flux(1.0, p, h);
        };
        spec.B = [sign, env, p](std::span<const double> x, double,
                                std::span<const double> h) {
            const double hn = detail::norm2(h);
            if (hn == 0.0) return 0.0;
            return sign * envelope_eval(env, detail::norm2(x)) * std::pow(hn, p - 1.0);
        };
    } else {
        throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
    }
    return spec;
}

inline const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {
        "p-laplace", "weighted-p-laplace", "riccati-extremal-plus",
        "riccati-extremal-minus"};
    return names;
}

} // namespace trisphere
