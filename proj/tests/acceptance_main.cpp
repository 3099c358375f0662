// Criterion gate for the laboratory: each block prints one PASS/FAIL line;
// the exit status is the number of failed criteria. Tolerances are fixed
// here, not configurable.

#include <trisphere/trisphere.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

using namespace trisphere;

namespace {

int failures = 0;

class Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

void report(int id, const char* label, bool ok, double secs, const std::string& detail) {
    std::printf("[%d] %-46s %s (%.2f s)%s%s\n", id, label, ok ? "PASS" : "FAIL", secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

std::vector<RadiiTriple> all_triples(const std::vector<double>& radii) {
    std::vector<RadiiTriple> out;
    for (std::size_t i = 0; i < radii.size(); ++i)
        for (std::size_t j = i + 1; j < radii.size(); ++j)
            for (std::size_t k = j + 1; k < radii.size(); ++k)
                out.push_back(RadiiTriple{radii[i], radii[j], radii[k]});
    return out;
}

char buf[256];

// ---- 1, 2: classical equality cases --------------------------------------

void classical_equality(int id, const char* label, const StructuralParams& params,
                        BoundMode mode, double time_cap) {
    Timer timer;
    const std::vector<double> radii{1.0, 1.5, 2.0, 3.0, 4.0};
    const auto triples = all_triples(radii);
    double worst = 0.0;
    for (double a : {0.0, 0.3, -1.2})
        for (double b : {1.0, -1.0, 0.45, -2.5}) {
            const RadialSolution sol = fundamental_solution(params, a, b);
            const BallProfile prof =
                ball_profile(sol, 1.0, radii, BallGeometry::sphere_max);
            for (const RadiiTriple& t : triples) {
                const ThreeSpheresBound bound = make_bound(mode, params, t);
                const VerificationReport rep = check_three_spheres(prof, bound);
                worst = std::max(worst, std::fabs(rep.margin));
            }
        }
    const double secs = timer.seconds();
    const bool ok = worst <= 1e-10 && secs < time_cap;
    std::snprintf(buf, sizeof buf, "max |margin| %.2e over %zu triples x 12 profiles",
                  worst, triples.size());
    report(id, label, ok, secs, buf);
}

// ---- 3: radial integrator vs exact families -------------------------------

void radial_order(int id) {
    Timer timer;
    const int ladder[4] = {64, 128, 256, 512};
    double worst512 = 0.0, worst_order = 1e9;
    int order_checked = 0, members = 0;

    auto run_member = [&](const EquationSpec& spec, const RadialSolution& exact) {
        ++members;
        double errs[4];
        double scale = 1.0;
        for (int m = 0; m < 4; ++m) {
            const RadialProfile prof = solve_radial_ivp(spec, 1.0, exact.u(1.0),
                                                        exact.du(1.0), 2.0, ladder[m]);
            double err = 0.0;
            for (std::size_t i = 0; i < prof.mesh.size(); ++i) {
                const double ref = exact.u(prof.mesh[i]);
                scale = std::max(scale, std::fabs(ref));
                err = std::max(err, std::fabs(prof.values[i] - ref));
            }
            errs[m] = err;
        }
        worst512 = std::max(worst512, errs[3] / scale);
        if (errs[0] <= 1e-12 * scale) return; // integrator exact: rate unmeasurable
        // least-squares slope of log2 err against level. Ladder points that
        // have fallen to accumulated-rounding level say nothing about the
        // truncation rate, so the fit uses only points above that floor and
        // needs at least three of them.
        const double floor_abs = 100.0 * std::numeric_limits<double>::epsilon() * scale;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int pts = 0;
        for (int m = 0; m < 4; ++m) {
            if (errs[m] <= floor_abs) continue;
            const double x = m, y = std::log2(errs[m]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
            ++pts;
        }
        if (pts < 3) return; // whole ladder at rounding level
        const double slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
        worst_order = std::min(worst_order, -slope);
        ++order_checked;
    };

    for (double p : {1.5, 2.0, 3.0, 4.0})
        for (int n : {2, 3}) {
            StructuralParams ps{n, p, 1.0, 1.0, 0.0};
            EquationSpec spec = make_preset("p-laplace", ps);
            for (double b : {0.8, -0.8})
                run_member(spec, fundamental_solution(ps, 0.1, b));
            for (int sign : {1, -1})
                for (double b1 : {0.5, 1.0, 2.0}) {
                    StructuralParams pd{n, p, 1.0, 1.0, b1};
                    EquationSpec drift_spec = make_preset(
                        sign > 0 ? "riccati-extremal-plus" : "riccati-extremal-minus", pd);
                    run_member(drift_spec, extremal_drift_solution(pd, sign, 0.2, 1.0));
                }
        }

    const double secs = timer.seconds();
    const bool ok = worst512 <= 1e-8 && worst_order >= 3.8 && secs < 10.0;
    std::snprintf(buf, sizeof buf,
                  "%d members: max rel err %.2e at 512, min order %.2f (%d rated)",
                  members, worst512, worst_order, order_checked);
    report(id, "radial integrator order vs exact families", ok, secs, buf);
}

// ---- 4: sub-critical family property --------------------------------------

void sub_critical_family(int id) {
    Timer timer;
    const StructuralParams ps{3, 2.0, 1.0, 1.0, 1.0};
    const std::uint64_t seed = 20260819;

    // >= 20 admissible triples with r1/r2 < r2/r3 strictly, i.e. the outer
    // ratio r3/r2 strictly inside (1, r2/r1)
    std::vector<RadiiTriple> triples;
    for (int i = 0; i < 24; ++i) {
        const std::uint64_t c = 100 + 8ull * static_cast<std::uint64_t>(i);
        const double r1 = counter_uniform(seed, c, 1.0, 1.5);
        const double rho1 = counter_uniform(seed, c + 1, 1.15, 1.35);
        const double frac = counter_uniform(seed, c + 2, 0.3, 0.9);
        const double rho2 = 1.0 + (rho1 - 1.0) * frac;
        triples.push_back(RadiiTriple{r1, r1 * rho1, r1 * rho1 * rho2});
    }
    bool ratios_ok = true;
    for (const RadiiTriple& t : triples)
        ratios_ok = ratios_ok && (t.r1 / t.r2 < t.r2 / t.r3) && t.r3 <= 4.0;

    // >= 50 profiles: exact fundamentals, exact drift extremals, numeric
    // boundary-value solutions under the saturated drift envelope
    std::vector<BallProfile> profiles;
    std::vector<double> radii; // union of all triple radii, sorted
    for (const RadiiTriple& t : triples) {
        radii.push_back(t.r1);
        radii.push_back(t.r2);
        radii.push_back(t.r3);
    }
    std::sort(radii.begin(), radii.end());

    for (int i = 0; i < 20; ++i) {
        const std::uint64_t c = 1000 + 4ull * static_cast<std::uint64_t>(i);
        const double a = counter_uniform(seed, c, -1.0, 1.0);
        const double b = -counter_uniform(seed, c + 1, 0.25, 1.25);
        profiles.push_back(ball_profile(fundamental_solution(ps, a, b), 1.0, radii,
                                        BallGeometry::sphere_max));
    }
    for (int sign : {1, -1})
        for (int i = 0; i < 3; ++i) {
            const std::uint64_t c = 2000 + 4ull * static_cast<std::uint64_t>(i) +
                                    (sign > 0 ? 0 : 2);
            const double u0 = counter_uniform(seed, c, -1.0, 1.0);
            profiles.push_back(ball_profile(extremal_drift_solution(ps, sign, u0, 1.0),
                                            1.0, radii, BallGeometry::sphere_max));
        }
    const EquationSpec bvp_spec = make_preset("riccati-extremal-plus", ps);
    for (int i = 0; i < 25; ++i) {
        const std::uint64_t c = 3000 + 4ull * static_cast<std::uint64_t>(i);
        const double v_lo = counter_uniform(seed, c, -1.0, 1.0);
        const double gap = counter_uniform(seed, c + 1, 0.5, 1.5);
        const RadialProfile prof =
            solve_radial_bvp(bvp_spec, 1.0, v_lo, 4.0, v_lo + gap, 512, 1e-10);
        profiles.push_back(ball_profile(prof, radii, BallGeometry::sphere_max));
    }

    double min_lambda_star = 1.0;
    for (const BallProfile& prof : profiles)
        for (const RadiiTriple& t : triples) {
            const LambdaStar ls = empirical_lambda_star(prof, t);
            if (!ls.all) min_lambda_star = std::min(min_lambda_star, ls.value);
        }

    // dual inequality on every negated profile at lambda = min lambda*
    std::size_t dual_failures = 0;
    for (const BallProfile& prof : profiles) {
        const BallProfile neg = negate_profile(prof);
        for (const RadiiTriple& t : triples) {
            ThreeSpheresBound bound{t, min_lambda_star, BoundMode::classical_sub_n, {}};
            bound.validate();
            const VerificationReport rep = check_three_spheres(neg, bound, true, 1e-9);
            if (!rep.passed) ++dual_failures;
        }
    }

    const double secs = timer.seconds();
    const bool ok = ratios_ok && profiles.size() >= 50 && triples.size() >= 20 &&
                    min_lambda_star >= 0.05 && dual_failures == 0 && secs < 60.0;
    std::snprintf(buf, sizeof buf,
                  "%zu profiles, %zu triples, min lambda* %.4f, %zu dual failures",
                  profiles.size(), triples.size(), min_lambda_star, dual_failures);
    report(id, "sub-critical family thresholds and duals", ok, secs, buf);
}

// ---- 5: border-regime calibration with grid hold-out ----------------------

void border_calibration(int id) {
    Timer timer;
    const StructuralParams ps{2, 2.0, 1.0, 1.0, 1.0};
    const std::uint64_t seed = 77;
    const std::vector<double> radii{1.0, 1.5, 2.0, 3.0, 4.0};
    const auto triples = all_triples(radii);

    // F1: radial profiles, including the drift extremals that bind C
    std::vector<CalibrationFamilyMember> family;
    for (int i = 0; i < 8; ++i) {
        const std::uint64_t c = 4ull * static_cast<std::uint64_t>(i);
        const double a = counter_uniform(seed, c, -1.0, 1.0);
        const double b = -counter_uniform(seed, c + 1, 0.25, 1.25);
        family.push_back({ball_profile(fundamental_solution(ps, a, b), 1.0, radii,
                                       BallGeometry::sphere_max),
                          triples});
    }
    for (int sign : {1, -1})
        for (int i = 0; i < 2; ++i) {
            const std::uint64_t c =
                64 + 4ull * static_cast<std::uint64_t>(i) + (sign > 0 ? 0 : 2);
            const double u0 = counter_uniform(seed, c, -1.0, 1.0);
            family.push_back({ball_profile(extremal_drift_solution(ps, sign, u0, 1.0),
                                           1.0, radii, BallGeometry::sphere_max),
                              triples});
        }
    const EquationSpec bvp_spec = make_preset("riccati-extremal-plus", ps);
    for (int i = 0; i < 6; ++i) {
        const std::uint64_t c = 128 + 4ull * static_cast<std::uint64_t>(i);
        const double v_lo = counter_uniform(seed, c, -1.0, 1.0);
        const double gap = counter_uniform(seed, c + 1, 0.5, 1.5);
        const RadialProfile prof =
            solve_radial_bvp(bvp_spec, 1.0, v_lo, 4.0, v_lo + gap, 512, 1e-10);
        family.push_back({ball_profile(prof, radii, BallGeometry::sphere_max), triples});
    }

    const CalibrationResult cal = calibrate_constant(family, BoundMode::border_n);

    // calibrated constant passes family-wide (binding margin is ~0)
    std::size_t f1_failures = 0;
    for (const auto& member : family)
        for (const RadiiTriple& t : member.triples) {
            const ThreeSpheresBound bound = make_bound(BoundMode::border_n, ps, t, cal.C_min);
            if (!check_three_spheres(member.profile, bound).passed) ++f1_failures;
        }

    // F2 hold-out: 2-D grid solutions of the same operator class at h = 1/64
    const std::vector<double> ho_radii{0.25, 0.35, 0.5, 0.7, 1.0};
    const auto ho_triples = all_triples(ho_radii);
    const EquationSpec grid_spec = make_preset("riccati-extremal-plus", ps);
    const GridFunction2D tmpl = make_disk_grid(0.0, 0.0, 1.0, 1.0 / 64);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 400;
    cfg.sor_sweeps = 60;
    std::size_t holdout_failures = 0;
    double worst_slack = 1e300;
    for (int i = 0; i < 4; ++i) {
        const std::uint64_t c = 512 + 8ull * static_cast<std::uint64_t>(i);
        const double c0 = counter_uniform(seed, c, -0.5, 0.5);
        const double c1 = counter_uniform(seed, c + 1, -0.5, 0.5);
        const double c2 = counter_uniform(seed, c + 2, -0.5, 0.5);
        const double c3 = counter_uniform(seed, c + 3, 0.5, 1.5);
        const double c4 = counter_uniform(seed, c + 4, -0.5, 0.5);
        const FdmResult res = solve_dirichlet(
            grid_spec,
            [=](double x, double y) {
                return c0 + c1 * x + c2 * y + c3 * (x * x - y * y) + c4 * x * y;
            },
            tmpl, cfg);
        const BallProfile prof = ball_profile(res.grid, 0.0, 0.0, ho_radii,
                                              BallGeometry::ball_max, ps);
        for (const RadiiTriple& t : ho_triples) {
            const double lam = lambda_formula(BoundMode::border_n, ps, t, cal.C_min);
            const LambdaStar ls = empirical_lambda_star(prof, t);
            if (ls.all) continue;
            worst_slack = std::min(worst_slack, ls.value - lam);
            if (lam > ls.value + 1e-8) ++holdout_failures;
        }
    }

    // ratio-only dependence: scaling every triple leaves lambda unchanged
    double scale_drift = 0.0;
    for (const RadiiTriple& t : triples) {
        const double lam = lambda_formula(BoundMode::border_n, ps, t, cal.C_min);
        for (double k : {0.5, 3.0}) {
            const double lam_k =
                lambda_formula(BoundMode::border_n, ps, t.scaled(k), cal.C_min);
            scale_drift = std::max(scale_drift, std::fabs(lam_k - lam) / lam);
        }
    }

    const double secs = timer.seconds();
    const bool ok = cal.C_min > 0.0 && f1_failures == 0 && holdout_failures == 0 &&
                    scale_drift <= 1e-12 && secs < 300.0;
    std::snprintf(buf, sizeof buf,
                  "C_min %.4f, %zu F1 fail, %zu hold-out fail, slack %.3f, drift %.1e",
                  cal.C_min, f1_failures, holdout_failures, worst_slack, scale_drift);
    report(id, "border-regime calibration with grid hold-out", ok, secs, buf);
}

// ---- 6: super-critical exponent factor ------------------------------------

void super_critical_factor(int id) {
    Timer timer;
    const StructuralParams ps{2, 4.0, 1.0, 1.0, 0.0};
    const std::uint64_t seed = 4242;

    const std::vector<double> r3s = linspace(2.2, 6.0, 20);
    bool scale_ok = true, monotone_ok = true;
    double prev = 1e300;
    for (double r3 : r3s) {
        const RadiiTriple t{1.0, 2.0, r3};
        const double K = lambda_exponent_factor(BoundMode::p_gt_n, ps, t);
        for (double k : {0.5, 3.0}) {
            const double Ks = lambda_exponent_factor(BoundMode::p_gt_n, ps, t.scaled(k));
            if (std::fabs(Ks - K) > 1e-12 * K) scale_ok = false;
        }
        if (!(K < prev)) monotone_ok = false;
        prev = K;
    }

    // calibrate on the radial family and re-verify with zero violations
    std::vector<double> radii{1.0, 2.0};
    for (double r3 : r3s) radii.push_back(r3);
    std::sort(radii.begin(), radii.end());
    std::vector<RadiiTriple> triples;
    for (double r3 : r3s) triples.push_back(RadiiTriple{1.0, 2.0, r3});

    std::vector<CalibrationFamilyMember> family;
    for (int i = 0; i < 10; ++i) {
        const std::uint64_t c = 4ull * static_cast<std::uint64_t>(i);
        const double a = counter_uniform(seed, c, -1.0, 1.0);
        const double b = counter_uniform(seed, c + 1, 0.25, 1.25); // alpha > 0: increasing
        family.push_back({ball_profile(fundamental_solution(ps, a, b), 1.0, radii,
                                       BallGeometry::sphere_max),
                          triples});
    }
    for (int sign : {1, -1}) {
        StructuralParams pd{2, 4.0, 1.0, 1.0, 1.0};
        family.push_back({ball_profile(extremal_drift_solution(pd, sign, 0.0, 1.0), 1.0,
                                       radii, BallGeometry::sphere_max),
                          triples});
    }
    const CalibrationResult cal = calibrate_constant(family, BoundMode::p_gt_n);
    std::size_t violations = 0;
    for (const auto& member : family)
        for (const RadiiTriple& t : member.triples) {
            const ThreeSpheresBound bound = make_bound(BoundMode::p_gt_n, ps, t, cal.C_min);
            if (!check_three_spheres(member.profile, bound).passed) ++violations;
        }

    const double secs = timer.seconds();
    const bool ok = scale_ok && monotone_ok && violations == 0 && secs < 30.0;
    std::snprintf(buf, sizeof buf,
                  "scale %s, decreasing-in-r3 %s, C_min %.4f, %zu violations",
                  scale_ok ? "ok" : "BAD", monotone_ok ? "ok" : "BAD", cal.C_min,
                  violations);
    report(id, "super-critical exponent factor properties", ok, secs, buf);
}

// ---- 7: grid solver accuracy ----------------------------------------------

void grid_accuracy(int id) {
    Timer timer;
    const StructuralParams ps{2, 2.0, 1.0, 1.0, 0.0};
    const EquationSpec spec = make_preset("p-laplace", ps);
    const GridFunction2D tmpl = make_disk_grid(0.0, 0.0, 1.0, 1.0 / 64);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    cfg.max_iter = 400;
    cfg.sor_sweeps = 60;
    const FdmResult res = solve_dirichlet(
        spec, [](double x, double y) { return x * x - y * y; }, tmpl, cfg);

    double err = 0.0, band_max = -1e300, interior_max = -1e300;
    for (int j = -res.grid.N; j <= res.grid.N; ++j)
        for (int i = -res.grid.N; i <= res.grid.N; ++i) {
            const NodeKind kind = res.grid.kind(i, j);
            if (kind == NodeKind::band) band_max = std::max(band_max, res.grid.at(i, j));
            if (kind != NodeKind::interior) continue;
            const double x = res.grid.x(i), y = res.grid.y(j);
            interior_max = std::max(interior_max, res.grid.at(i, j));
            err = std::max(err, std::fabs(res.grid.at(i, j) - (x * x - y * y)));
        }

    const double secs = timer.seconds();
    const bool ok = err <= 1e-2 && interior_max <= band_max && secs < 30.0;
    std::snprintf(buf, sizeof buf, "max err %.2e, interior max %.6f <= band max %.6f",
                  err, interior_max, band_max);
    report(id, "grid solver accuracy and max principle", ok, secs, buf);
}

// ---- 8: contradiction arithmetic -------------------------------------------

void liouville_arithmetic(int id) {
    Timer timer;
    const bool example = liouville_check(1.0, 0.2, 0.01, 0.9);
    const bool constant = liouville_check(1.0, 0.2, 1.0, 1.0);
    // frozen reference values, computed independently of std::exp at runtime
    struct Ref {
        double C, value;
    };
    const Ref refs[] = {{0.1, 0.9048374180359595},
                        {1.0, 0.36787944117144233},
                        {5.0, 0.006737946999085467},
                        {1.6094379124341003, 0.2}};
    double worst = 0.0;
    for (const Ref& r : refs)
        worst = std::max(worst, std::fabs(lambda_infinity(r.C) - r.value));

    const double secs = timer.seconds();
    const bool ok = example && !constant && worst <= 1e-15 && secs < 1.0;
    std::snprintf(buf, sizeof buf, "contradiction %d, constant %d, exp error %.1e",
                  (int)example, (int)constant, worst);
    report(id, "shrinking-weight contradiction arithmetic", ok, secs, buf);
}

// ---- 9: threshold consistency ----------------------------------------------

void threshold_consistency(int id) {
    Timer timer;
    const StructuralParams ps{2, 2.0, 1.0, 1.0, 0.0};
    const RadiiTriple t{1.0, 2.0, 4.0};
    const std::uint64_t seed = 999;
    std::size_t disagreements = 0, checked = 0, boundary_skips = 0;

    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t c = 8ull * static_cast<std::uint64_t>(i);
        const double M1 = counter_uniform(seed, c, -1.0, 1.0);
        double gap12 = counter_uniform(seed, c + 1, 0.0, 2.0);
        double gap23 = counter_uniform(seed, c + 2, 0.0, 2.0);
        const double mode_pick = counter_u01(seed, c + 3);
        if (mode_pick < 0.1) gap12 = 0.0; // exercise the clamp edges
        else if (mode_pick < 0.2) gap23 = 0.0;
        else if (mode_pick < 0.25) gap12 = gap23 = 0.0; // flat: threshold is "all"
        const double M2 = M1 + gap12, M3 = M2 + gap23;

        BallProfile prof;
        prof.center = {0.0, 0.0};
        prof.radii = {t.r1, t.r2, t.r3};
        prof.M = {M1, M2, M3};
        prof.m = {M1 - 0.1, M2 - 0.1, M3 - 0.1};
        prof.geometry = BallGeometry::ball_max;
        prof.params = ps;
        prof.source = "synthetic";

        double lambda = counter_uniform(seed, c + 4, 0.0, 1.0);
        const LambdaStar ls = empirical_lambda_star(prof, t);
        if (counter_u01(seed, c + 5) < 0.15 && !ls.all) lambda = ls.value;
        lambda = std::max(lambda, 1e-9); // bound requires lambda > 0

        ThreeSpheresBound bound{t, lambda, BoundMode::classical_n, {}};
        const VerificationReport rep = check_three_spheres(prof, bound, false, 0.0);
        const bool predicted = ls.all || lambda <= ls.value;

        const double scale =
            std::max({std::fabs(M1), std::fabs(M3), 1.0});
        if (!ls.all && std::fabs(lambda - ls.value) * (M3 - M1) <= 1e-12 * scale) {
            ++boundary_skips; // inside the floating-point boundary zone
            continue;
        }
        ++checked;
        if (rep.passed != predicted) ++disagreements;
    }

    const double secs = timer.seconds();
    const bool ok = disagreements == 0 && checked >= 800 && secs < 5.0;
    std::snprintf(buf, sizeof buf, "%zu checked, %zu boundary skips, %zu disagreements",
                  checked, boundary_skips, disagreements);
    report(id, "pass/threshold consistency on random profiles", ok, secs, buf);
}

} // namespace

int main() {
    classical_equality(1, "classical equality at p = n", {2, 2.0, 1.0, 1.0, 0.0},
                       BoundMode::classical_n, 1.0);
    classical_equality(2, "classical equality at p < n", {3, 2.0, 1.0, 1.0, 0.0},
                       BoundMode::classical_sub_n, 1.0);
    radial_order(3);
    sub_critical_family(4);
    border_calibration(5);
    super_critical_factor(6);
    grid_accuracy(7);
    liouville_arithmetic(8);
    threshold_consistency(9);
    std::printf("%d of 9 criteria failed\n", failures);
    return failures;
}
