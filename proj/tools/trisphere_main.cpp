// Command-line front end: closed-form weight evaluation, radial and grid
// solves, and config-driven experiment runs. Exit codes: 0 success, 1 a
// verification gate failed, 2 bad usage or invalid input.

#include <trisphere/trisphere.hpp>

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <limits>
#include <string>
#include <vector>

using namespace trisphere;

namespace {

std::vector<double> parse_radii(const std::string& text) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string::npos) next = text.size();
        out.push_back(std::stod(text.substr(pos, next - pos)));
        pos = next + 1;
    }
    if (out.empty()) throw std::invalid_argument("radii list is empty");
    return out;
}

EnvelopeMode envelope_from_flag(const std::string& name) {
    return name == "constant" ? EnvelopeMode::constant : EnvelopeMode::global_decay;
}

ReportFormat format_from_flag(const std::string& name) {
    if (name == "json") return ReportFormat::json;
    if (name == "csv") return ReportFormat::csv;
    return ReportFormat::table;
}

// Out-dir resolution for the flag-driven commands that carry no config:
// explicit flag, then TRISPHERE_OUT_DIR, then the working directory.
std::string out_dir_flag_env(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("TRISPHERE_OUT_DIR"); env && *env) return env;
    return ".";
}

struct BoundsArgs {
    std::string mode = "classical_n";
    int n = 2;
    double p = 2.0;
    double b1 = 0.0;
    double r1 = 0.0, r2 = 0.0, r3 = 0.0;
    double C = 1.0;
    double scale = 1.0;
};

int cmd_bounds(const BoundsArgs& a) {
    const BoundMode mode = bound_mode_from_name(a.mode);
    const StructuralParams params{a.n, a.p, 1.0, 1.0, a.b1};
    RadiiTriple t{a.r1, a.r2, a.r3};
    if (a.scale != 1.0) t = t.scaled(a.scale);
    const bool classical =
        mode == BoundMode::classical_sub_n || mode == BoundMode::classical_n;
    const ThreeSpheresBound bound =
        classical ? make_bound(mode, params, t) : make_bound(mode, params, t, a.C);
    std::printf("mode         %s\n", bound_mode_name(bound.mode));
    std::printf("triple       %.15g %.15g %.15g\n", t.r1, t.r2, t.r3);
    std::printf("lambda       %.15g\n", bound.lambda);
    if (!classical) {
        std::printf("exponent K   %.15g\n", lambda_exponent_factor(mode, params, t));
        std::printf("C            %.15g\n", a.C);
        std::printf("lambda_inf   %.15g\n", lambda_infinity(a.C));
    }
    return 0;
}

struct RadialArgs {
    std::string preset = "p-laplace";
    std::string envelope = "global_decay";
    std::string mode = "ivp";
    int n = 2;
    double p = 2.0, a0 = 1.0, a1 = 1.0, b1 = 0.0;
    double r_in = 0.0, r_out = 0.0;
    double u_in = 0.0, du_in = 1.0;
    double u_out = std::numeric_limits<double>::quiet_NaN();
    int steps = 512;
    double tol = 1e-10;
};

int cmd_radial(const RadialArgs& a) {
    const StructuralParams params{a.n, a.p, a.a0, a.a1, a.b1};
    const EquationSpec spec = make_preset(a.preset, params, envelope_from_flag(a.envelope));
    RadialProfile prof;
    if (a.mode == "bvp") {
        if (!std::isfinite(a.u_out))
            throw std::invalid_argument("radial: --u-out is required with --mode bvp");
        prof = solve_radial_bvp(spec, a.r_in, a.u_in, a.r_out, a.u_out, a.steps, a.tol);
    } else {
        prof = solve_radial_ivp(spec, a.r_in, a.u_in, a.du_in, a.r_out, a.steps);
    }
    std::fputs("r,u,du\n", stdout);
    for (std::size_t i = 0; i < prof.mesh.size(); ++i)
        std::printf("%s,%s,%s\n", detail::shortest_double(prof.mesh[i]).c_str(),
                    detail::shortest_double(prof.values[i]).c_str(),
                    detail::shortest_double(prof.derivative_values[i]).c_str());
    return 0;
}

struct FdmArgs {
    std::string preset = "p-laplace";
    std::string envelope = "global_decay";
    std::string bc = "saddle";
    std::string scheme = "picard";
    int n = 2;
    double p = 2.0, a0 = 1.0, a1 = 1.0, b1 = 0.0;
    double cx = 0.0, cy = 0.0;
    double r_in = 0.0, r_out = 0.0;
    double h = 1.0 / 64;
    double bc_scale = 1.0;
    double epsilon = 1e-6, tol = 1e-8, damping = 1.0, sor_omega = 0.0;
    int max_iter = 200, sor_sweeps = 50;
    std::string radii;
    std::string grid_csv;
    std::string out_dir;
};

int cmd_fdm(const FdmArgs& a) {
    const StructuralParams params{a.n, a.p, a.a0, a.a1, a.b1};
    const EquationSpec spec = make_preset(a.preset, params, envelope_from_flag(a.envelope));
    const GridFunction2D tmpl =
        a.r_in > 0.0 ? make_annulus_grid(a.cx, a.cy, a.r_in, a.r_out, a.h)
                     : make_disk_grid(a.cx, a.cy, a.r_out, a.h);

    const double cx = a.cx, cy = a.cy, s = a.bc_scale;
    std::function<double(double, double)> boundary;
    if (a.bc == "constant")
        boundary = [=](double, double) { return s; };
    else if (a.bc == "tilt")
        boundary = [=](double x, double) { return s * (x - cx); };
    else // saddle
        boundary = [=](double x, double y) {
            return s * ((x - cx) * (x - cx) - (y - cy) * (y - cy));
        };

    SolverConfig solver;
    solver.epsilon = a.epsilon;
    solver.tol = a.tol;
    solver.max_iter = a.max_iter;
    solver.scheme = a.scheme == "damped_newton" ? FdmScheme::damped_newton : FdmScheme::picard;
    solver.damping = a.damping;
    solver.sor_sweeps = a.sor_sweeps;
    solver.sor_omega = a.sor_omega;

    const FdmResult res = solve_dirichlet(spec, boundary, tmpl, solver);
    std::printf("lattice      %d x %d (h = %.15g)\n", res.grid.side(), res.grid.side(),
                res.grid.h);
    std::printf("iterations   %d\n", res.iterations);
    std::printf("residual     %.6e\n", res.residual_history.back());
    if (res.dominance_warning)
        std::fputs("warning: extreme face-coefficient spread; solution may be inaccurate\n",
                   stdout);

    if (!a.radii.empty()) {
        const std::vector<double> radii = parse_radii(a.radii);
        // solid-ball extrema are undefined across an annulus hole, so
        // profiles on annuli use circle extrema instead
        const BallGeometry geom =
            a.r_in > 0.0 ? BallGeometry::sphere_max : BallGeometry::ball_max;
        const BallProfile prof =
            ball_profile(res.grid, a.cx, a.cy, radii, geom, params,
                         envelope_from_flag(a.envelope));
        std::fputs("r,M,m\n", stdout);
        for (std::size_t i = 0; i < prof.radii.size(); ++i)
            std::printf("%s,%s,%s\n", detail::shortest_double(prof.radii[i]).c_str(),
                        detail::shortest_double(prof.M[i]).c_str(),
                        detail::shortest_double(prof.m[i]).c_str());
    }

    if (!a.grid_csv.empty()) {
        std::string csv = "x,y,u\n";
        const GridFunction2D& g = res.grid;
        for (int j = -g.N; j <= g.N; ++j)
            for (int i = -g.N; i <= g.N; ++i) {
                if (g.kind(i, j) == NodeKind::exterior) continue;
                csv += detail::shortest_double(g.x(i)) + ",";
                csv += detail::shortest_double(g.y(j)) + ",";
                csv += detail::shortest_double(g.at(i, j)) + "\n";
            }
        const std::string path = out_dir_flag_env(a.out_dir) + "/" + a.grid_csv;
        write_file_atomic(path, csv);
        std::printf("wrote %s\n", path.c_str());
    }
    return 0;
}

int cmd_profile(const std::string& config_path) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const ReportBundle bundle = run_experiment(cfg);
    std::fputs(emit_profiles_csv(bundle).c_str(), stdout);
    return 0;
}

int cmd_verify(const std::string& config_path, const std::string& format) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const ReportBundle bundle = run_experiment(cfg);
    std::fputs(emit_report(bundle, format_from_flag(format)).c_str(), stdout);
    return bundle.all_pass ? 0 : 1;
}

int cmd_calibrate(const std::string& config_path) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (!cfg.bound.calibrate)
        throw std::invalid_argument(
            "calibrate: config must set bound.C to \"calibrate\"");
    const ReportBundle bundle = run_experiment(cfg);
    const CalibrationOutcome& cal = *bundle.calibration;
    std::printf("C_min            %.15g\n", cal.result.C_min);
    std::printf("binding profile  %s\n", cal.binding_profile.c_str());
    std::printf("binding triple   %.15g %.15g %.15g\n", cal.result.binding_triple.r1,
                cal.result.binding_triple.r2, cal.result.binding_triple.r3);
    std::printf("family size      %zu\n", cal.result.family_size);
    std::printf("pairs            %zu\n", cal.result.pair_count);
    if (cal.holdout_members > 0)
        std::printf("holdout          %zu members, %s\n", cal.holdout_members,
                    cal.holdout_pass ? "pass" : "FAIL");
    else
        std::fputs("holdout          none\n", stdout);
    return bundle.all_pass ? 0 : 1;
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            const std::string& format) {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const ReportBundle bundle = run_experiment(cfg);
    const RunPaths paths = write_bundle(bundle, resolve_out_dir(cfg, out_dir));
    std::fputs(emit_report(bundle, format_from_flag(format)).c_str(), stdout);
    std::printf("wrote %s\n", paths.rows_csv.c_str());
    std::printf("wrote %s\n", paths.profiles_csv.c_str());
    std::printf("wrote %s\n", paths.report_json.c_str());
    std::printf("wrote %s\n", paths.summary_table.c_str());
    return bundle.all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for arithmetic three-spheres bounds"};
    app.require_subcommand(1);

    BoundsArgs bo;
    auto* bounds = app.add_subcommand(
        "bounds", "evaluate a three-spheres weight from its closed form");
    bounds->add_option("--mode", bo.mode, "weight formula")
        ->check(CLI::IsMember(
            {"classical_sub_n", "classical_n", "border_n", "a_harmonic_n", "p_gt_n"}))
        ->capture_default_str();
    bounds->add_option("--n", bo.n, "dimension")->capture_default_str();
    bounds->add_option("--p", bo.p, "operator exponent")->capture_default_str();
    bounds->add_option("--b1", bo.b1, "drift envelope amplitude")->capture_default_str();
    bounds->add_option("--r1", bo.r1, "inner radius")->required();
    bounds->add_option("--r2", bo.r2, "middle radius")->required();
    bounds->add_option("--r3", bo.r3, "outer radius")->required();
    bounds->add_option("--C", bo.C, "structural constant (explicit modes)")
        ->capture_default_str();
    bounds->add_option("--scale", bo.scale, "scale the triple by this factor")
        ->capture_default_str();

    RadialArgs ra;
    auto* radial = app.add_subcommand(
        "radial", "integrate the radial reduction and print the profile as CSV");
    radial->add_option("--preset", ra.preset, "equation preset")->capture_default_str();
    radial->add_option("--envelope", ra.envelope, "drift envelope")
        ->check(CLI::IsMember({"global_decay", "constant"}))
        ->capture_default_str();
    radial->add_option("--mode", ra.mode, "ivp (slope given) or bvp (two values)")
        ->check(CLI::IsMember({"ivp", "bvp"}))
        ->capture_default_str();
    radial->add_option("--n", ra.n, "dimension")->capture_default_str();
    radial->add_option("--p", ra.p, "operator exponent")->capture_default_str();
    radial->add_option("--a0", ra.a0, "lower ellipticity")->capture_default_str();
    radial->add_option("--a1", ra.a1, "upper growth")->capture_default_str();
    radial->add_option("--b1", ra.b1, "drift envelope amplitude")->capture_default_str();
    radial->add_option("--r-in", ra.r_in, "inner radius")->required();
    radial->add_option("--r-out", ra.r_out, "outer radius")->required();
    radial->add_option("--u-in", ra.u_in, "value at the inner radius")
        ->capture_default_str();
    radial->add_option("--du-in", ra.du_in, "slope at the inner radius (ivp)")
        ->capture_default_str();
    radial->add_option("--u-out", ra.u_out, "value at the outer radius (bvp)");
    radial->add_option("--steps", ra.steps, "mesh intervals")->capture_default_str();
    radial->add_option("--tol", ra.tol, "shooting tolerance (bvp)")->capture_default_str();

    FdmArgs fa;
    auto* fdm = app.add_subcommand(
        "fdm", "solve the Dirichlet problem on a lattice disk or annulus");
    fdm->add_option("--preset", fa.preset, "equation preset")->capture_default_str();
    fdm->add_option("--envelope", fa.envelope, "drift envelope")
        ->check(CLI::IsMember({"global_decay", "constant"}))
        ->capture_default_str();
    fdm->add_option("--n", fa.n, "dimension (must be 2 for the lattice)")
        ->capture_default_str();
    fdm->add_option("--p", fa.p, "operator exponent")->capture_default_str();
    fdm->add_option("--a0", fa.a0, "lower ellipticity")->capture_default_str();
    fdm->add_option("--a1", fa.a1, "upper growth")->capture_default_str();
    fdm->add_option("--b1", fa.b1, "drift envelope amplitude")->capture_default_str();
    fdm->add_option("--cx", fa.cx, "center x")->capture_default_str();
    fdm->add_option("--cy", fa.cy, "center y")->capture_default_str();
    fdm->add_option("--r-in", fa.r_in, "inner radius (0 for a disk)")
        ->capture_default_str();
    fdm->add_option("--r-out", fa.r_out, "outer radius")->required();
    fdm->add_option("--spacing", fa.h, "lattice spacing h")->capture_default_str();
    fdm->add_option("--bc", fa.bc, "boundary data shape")
        ->check(CLI::IsMember({"constant", "tilt", "saddle"}))
        ->capture_default_str();
    fdm->add_option("--bc-scale", fa.bc_scale, "boundary data amplitude")
        ->capture_default_str();
    fdm->add_option("--scheme", fa.scheme, "outer iteration")
        ->check(CLI::IsMember({"picard", "damped_newton"}))
        ->capture_default_str();
    fdm->add_option("--epsilon", fa.epsilon, "gradient regularization")
        ->capture_default_str();
    fdm->add_option("--tol", fa.tol, "residual tolerance")->capture_default_str();
    fdm->add_option("--max-iter", fa.max_iter, "outer iteration cap")
        ->capture_default_str();
    fdm->add_option("--damping", fa.damping, "Newton step damping")->capture_default_str();
    fdm->add_option("--sor-sweeps", fa.sor_sweeps, "linear sweeps per outer iteration")
        ->capture_default_str();
    fdm->add_option("--sor-omega", fa.sor_omega, "relaxation factor (0 = auto)")
        ->capture_default_str();
    fdm->add_option("--radii", fa.radii, "comma-separated radii for the r,M,m profile");
    fdm->add_option("--grid-csv", fa.grid_csv, "write the solved lattice to this file");
    fdm->add_option("--out-dir", fa.out_dir,
                    "output directory (overrides TRISPHERE_OUT_DIR)");

    std::string profile_config;
    auto* profile = app.add_subcommand(
        "profile", "manufacture the configured family and print r,M,m rows");
    profile->add_option("--config", profile_config, "experiment config (JSON)")
        ->required();

    std::string verify_config, verify_format = "table";
    auto* verify = app.add_subcommand(
        "verify", "check every profile/triple pair against the configured weight");
    verify->add_option("--config", verify_config, "experiment config (JSON)")->required();
    verify->add_option("--format", verify_format, "report format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();

    std::string calibrate_config;
    auto* calibrate = app.add_subcommand(
        "calibrate", "fit the structural constant on the configured family");
    calibrate->add_option("--config", calibrate_config, "experiment config (JSON)")
        ->required();

    std::string run_config, run_out_dir, run_format = "table";
    auto* run = app.add_subcommand(
        "run", "full pipeline: solve, verify, calibrate if requested, write artifacts");
    run->add_option("--config", run_config, "experiment config (JSON)")->required();
    run->add_option("--out-dir", run_out_dir,
                    "output directory (overrides TRISPHERE_OUT_DIR and the config)");
    run->add_option("--format", run_format, "stdout report format")
        ->check(CLI::IsMember({"table", "csv", "json"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11 exit codes are library-specific; the tool's contract is 2
        // for any usage error (help/version stay 0).
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(bounds)) return cmd_bounds(bo);
        if (app.got_subcommand(radial)) return cmd_radial(ra);
        if (app.got_subcommand(fdm)) return cmd_fdm(fa);
        if (app.got_subcommand(profile)) return cmd_profile(profile_config);
        if (app.got_subcommand(verify)) return cmd_verify(verify_config, verify_format);
        if (app.got_subcommand(calibrate)) return cmd_calibrate(calibrate_config);
        if (app.got_subcommand(run)) return cmd_run(run_config, run_out_dir, run_format);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2; // unreachable with require_subcommand(1)
}
