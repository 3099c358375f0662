#pragma once

#include "trisphere/ball_stats.hpp"
#include "trisphere/bounds.hpp"
#include "trisphere/fdm2d.hpp"
#include "trisphere/presets.hpp"
#include "trisphere/radial.hpp"
#include "trisphere/rng.hpp"
#include "trisphere/verify.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trisphere {

using ordered_json = nlohmann::ordered_json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// How a family of solution profiles is manufactured. Radii/triples left
/// empty inherit the experiment geometry (holdout families often use their
/// own, smaller radii so grid solves stay cheap).
struct FamilySpec {
    std::string kind = "radial-exact"; // radial-exact | radial-bvp | grid
    int count = 8;
    int steps = 512;      // radial integration steps
    double h = 1.0 / 64;  // grid spacing
    std::vector<double> radii;
    std::vector<RadiiTriple> triples;
};

struct BoundSpec {
    BoundMode mode = BoundMode::classical_n;
    bool calibrate = false;
    double C = 1.0; // used by explicit modes when calibrate is off
};

struct OutputSpec {
    std::string prefix;
    std::string dir;
};

/// Declarative description of one reproducible batch run. All randomized
/// choices are drawn from the counter generator keyed by `seed` (see rng
/// header for the recipe), so equal configs give byte-identical reports.
struct ExperimentConfig {
    std::string name;
    std::string preset = "p-laplace";
    Regime regime = Regime::border_n;
    StructuralParams params;
    EnvelopeMode envelope = EnvelopeMode::global_decay;
    std::vector<double> center = {0.0, 0.0};
    std::vector<double> radii;
    std::vector<RadiiTriple> triples;
    FamilySpec family;
    std::optional<FamilySpec> holdout;
    SolverConfig solver;
    BoundSpec bound;
    OutputSpec output;
    std::uint64_t seed = 1;

    void validate() const;
    ordered_json to_json() const;
    static ExperimentConfig from_json(const ordered_json& doc);
    static ExperimentConfig load(const std::string& path);
};

namespace detail {

inline void require_object_keys(const ordered_json& obj, const std::string& where,
                                std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (item.key() == a) {
                known = true;
                break;
            }
        if (!known) throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
}

template <typename T>
T get_required(const ordered_json& obj, const std::string& where, const char* key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + ": key '" + std::string(key) + "' has the wrong type");
    }
}

template <typename T>
T get_optional(const ordered_json& obj, const std::string& where, const char* key,
               T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw ConfigError(where + ": key '" + std::string(key) + "' has the wrong type");
    }
}

inline Regime regime_from_name(const std::string& s) {
    if (s == "sub_n") return Regime::sub_n;
    if (s == "border_n") return Regime::border_n;
    if (s == "gt_n") return Regime::gt_n;
    throw ConfigError("regime: unknown value '" + s + "'");
}

inline EnvelopeMode envelope_from_name(const std::string& s) {
    if (s == "global_decay") return EnvelopeMode::global_decay;
    if (s == "constant") return EnvelopeMode::constant;
    throw ConfigError("envelope: unknown value '" + s + "'");
}

inline std::vector<RadiiTriple> triples_from_json(const ordered_json& arr,
                                                  const std::string& where) {
    if (!arr.is_array()) throw ConfigError(where + ": triples must be an array");
    std::vector<RadiiTriple> out;
    for (const auto& t : arr) {
        if (!t.is_array() || t.size() != 3)
            throw ConfigError(where + ": each triple must be [r1, r2, r3]");
        out.push_back(RadiiTriple{t[0].get<double>(), t[1].get<double>(), t[2].get<double>()});
    }
    return out;
}

inline FamilySpec family_from_json(const ordered_json& obj, const std::string& where) {
    require_object_keys(obj, where, {"kind", "count", "steps", "h", "radii", "triples"});
    FamilySpec fam;
    fam.kind = get_required<std::string>(obj, where, "kind");
    fam.count = get_optional<int>(obj, where, "count", fam.count);
    fam.steps = get_optional<int>(obj, where, "steps", fam.steps);
    fam.h = get_optional<double>(obj, where, "h", fam.h);
    fam.radii = get_optional<std::vector<double>>(obj, where, "radii", {});
    if (obj.contains("triples")) fam.triples = triples_from_json(obj.at("triples"), where);
    return fam;
}

inline ordered_json family_to_json(const FamilySpec& fam) {
    ordered_json j;
    j["kind"] = fam.kind;
    j["count"] = fam.count;
    j["steps"] = fam.steps;
    j["h"] = fam.h;
    j["radii"] = fam.radii;
    ordered_json triples = ordered_json::array();
    for (const auto& t : fam.triples) triples.push_back({t.r1, t.r2, t.r3});
    j["triples"] = triples;
    return j;
}

inline bool radius_listed(double r, const std::vector<double>& radii) {
    for (double s : radii)
        if (std::fabs(s - r) <= 1e-9 * std::max(1.0, std::fabs(r))) return true;
    return false;
}

} // namespace detail

inline void ExperimentConfig::validate() const {
    params.validate();
    if (name.empty()) throw ConfigError("config: name must be nonempty");
    if (params.regime() != regime)
        throw ConfigError("config: declared regime does not match (n, p)");
    bool preset_ok = false;
    for (const auto& s : preset_names()) preset_ok = preset_ok || s == preset;
    if (!preset_ok) throw ConfigError("config: unknown preset '" + preset + "'");
    if (center.size() != 2) throw ConfigError("config: center must be [x, y]");
    if (radii.size() < 2) throw ConfigError("config: need at least 2 radii");
    double prev = 0.0;
    for (double r : radii) {
        if (!(r > prev)) throw ConfigError("config: radii must be positive increasing");
        prev = r;
    }
    if (triples.empty()) throw ConfigError("config: triples list is empty");
    auto check_triples = [&](const std::vector<RadiiTriple>& ts,
                             const std::vector<double>& rs, const std::string& where) {
        for (const auto& t : ts) {
            t.validate();
            if (!detail::radius_listed(t.r1, rs) || !detail::radius_listed(t.r2, rs) ||
                !detail::radius_listed(t.r3, rs))
                throw ConfigError(where + ": triple radii must be members of the radii list");
        }
    };
    check_triples(triples, radii, "config");
    auto check_family = [&](const FamilySpec& fam, const std::string& where) {
        if (fam.kind != "radial-exact" && fam.kind != "radial-bvp" && fam.kind != "grid")
            throw ConfigError(where + ": unknown family kind '" + fam.kind + "'");
        if (fam.count < 1) throw ConfigError(where + ": count must be >= 1");
        if (fam.steps < 16) throw ConfigError(where + ": steps must be >= 16");
        if (!(fam.h > 0.0)) throw ConfigError(where + ": h must be > 0");
        if (!fam.radii.empty()) {
            double p2 = 0.0;
            for (double r : fam.radii) {
                if (!(r > p2)) throw ConfigError(where + ": radii must be positive increasing");
                p2 = r;
            }
            if (fam.triples.empty())
                throw ConfigError(where + ": custom radii need custom triples");
            check_triples(fam.triples, fam.radii, where);
        } else if (!fam.triples.empty()) {
            check_triples(fam.triples, radii, where);
        }
    };
    check_family(family, "family");
    if (holdout) check_family(*holdout, "holdout");
    solver.validate();
    if (!mode_matches_regime(bound.mode, regime))
        throw ConfigError("config: bound mode does not match the regime");
    const bool classical =
        bound.mode == BoundMode::classical_sub_n || bound.mode == BoundMode::classical_n;
    if (bound.calibrate && classical)
        throw ConfigError("config: classical modes have no constant to calibrate");
    if (!bound.calibrate && !classical && !(bound.C > 0.0))
        throw ConfigError("config: explicit modes need C > 0");
}

inline ExperimentConfig ExperimentConfig::from_json(const ordered_json& doc) {
    detail::require_object_keys(doc, "config",
                                {"schema", "name", "preset", "regime", "params", "envelope",
                                 "geometry", "family", "holdout", "solver", "bound",
                                 "output", "seed"});
    const int schema = detail::get_required<int>(doc, "config", "schema");
    if (schema != 1) throw ConfigError("config: unsupported schema version");

    ExperimentConfig cfg;
    cfg.name = detail::get_required<std::string>(doc, "config", "name");
    cfg.preset = detail::get_required<std::string>(doc, "config", "preset");
    cfg.regime = detail::regime_from_name(
        detail::get_required<std::string>(doc, "config", "regime"));

    const auto& pj = doc.contains("params") ? doc.at("params") : ordered_json();
    detail::require_object_keys(pj, "params", {"n", "p", "a0", "a1", "b1"});
    cfg.params.n = detail::get_required<int>(pj, "params", "n");
    cfg.params.p = detail::get_required<double>(pj, "params", "p");
    cfg.params.a0 = detail::get_optional<double>(pj, "params", "a0", 1.0);
    cfg.params.a1 = detail::get_optional<double>(pj, "params", "a1", 1.0);
    cfg.params.b1 = detail::get_optional<double>(pj, "params", "b1", 0.0);

    cfg.envelope = detail::envelope_from_name(
        detail::get_optional<std::string>(doc, "config", "envelope", "global_decay"));

    const auto& gj = doc.contains("geometry") ? doc.at("geometry") : ordered_json();
    detail::require_object_keys(gj, "geometry", {"center", "radii", "triples"});
    cfg.center = detail::get_optional<std::vector<double>>(gj, "geometry", "center",
                                                           {0.0, 0.0});
    cfg.radii = detail::get_required<std::vector<double>>(gj, "geometry", "radii");
    if (!gj.contains("triples")) throw ConfigError("geometry: missing key 'triples'");
    cfg.triples = detail::triples_from_json(gj.at("triples"), "geometry");

    if (!doc.contains("family")) throw ConfigError("config: missing key 'family'");
    cfg.family = detail::family_from_json(doc.at("family"), "family");
    if (doc.contains("holdout"))
        cfg.holdout = detail::family_from_json(doc.at("holdout"), "holdout");

    if (doc.contains("solver")) {
        const auto& sj = doc.at("solver");
        detail::require_object_keys(sj, "solver",
                                    {"epsilon", "tol", "max_iter", "scheme", "damping",
                                     "sor_sweeps", "sor_omega"});
        cfg.solver.epsilon = detail::get_optional<double>(sj, "solver", "epsilon", 1e-6);
        cfg.solver.tol = detail::get_optional<double>(sj, "solver", "tol", 1e-8);
        cfg.solver.max_iter = detail::get_optional<int>(sj, "solver", "max_iter", 200);
        const std::string scheme =
            detail::get_optional<std::string>(sj, "solver", "scheme", "picard");
        if (scheme == "picard")
            cfg.solver.scheme = FdmScheme::picard;
        else if (scheme == "damped_newton")
            cfg.solver.scheme = FdmScheme::damped_newton;
        else
            throw ConfigError("solver: unknown scheme '" + scheme + "'");
        cfg.solver.damping = detail::get_optional<double>(sj, "solver", "damping", 1.0);
        cfg.solver.sor_sweeps = detail::get_optional<int>(sj, "solver", "sor_sweeps", 50);
        cfg.solver.sor_omega = detail::get_optional<double>(sj, "solver", "sor_omega", 0.0);
    }

    if (!doc.contains("bound")) throw ConfigError("config: missing key 'bound'");
    const auto& bj = doc.at("bound");
    detail::require_object_keys(bj, "bound", {"mode", "C"});
    cfg.bound.mode = bound_mode_from_name(detail::get_required<std::string>(bj, "bound", "mode"));
    if (bj.contains("C")) {
        if (bj.at("C").is_string()) {
            if (bj.at("C").get<std::string>() != "calibrate")
                throw ConfigError("bound: C must be a number or \"calibrate\"");
            cfg.bound.calibrate = true;
        } else {
            cfg.bound.C = bj.at("C").get<double>();
        }
    }

    if (doc.contains("output")) {
        const auto& oj = doc.at("output");
        detail::require_object_keys(oj, "output", {"prefix", "dir"});
        cfg.output.prefix = detail::get_optional<std::string>(oj, "output", "prefix", "");
        cfg.output.dir = detail::get_optional<std::string>(oj, "output", "dir", "");
    }
    if (cfg.output.prefix.empty()) cfg.output.prefix = cfg.name;

    cfg.seed = detail::get_optional<std::uint64_t>(doc, "config", "seed", 1);
    cfg.validate();
    return cfg;
}

inline ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    ordered_json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: JSON parse error in '" + path + "': " + e.what());
    }
    return from_json(doc);
}

inline ordered_json ExperimentConfig::to_json() const {
    ordered_json j;
    j["schema"] = 1;
    j["name"] = name;
    j["preset"] = preset;
    j["regime"] = regime_name(regime);
    j["params"] = {{"n", params.n}, {"p", params.p}, {"a0", params.a0},
                   {"a1", params.a1}, {"b1", params.b1}};
    j["envelope"] = envelope == EnvelopeMode::global_decay ? "global_decay" : "constant";
    ordered_json geom;
    geom["center"] = center;
    geom["radii"] = radii;
    ordered_json trs = ordered_json::array();
    for (const auto& t : triples) trs.push_back({t.r1, t.r2, t.r3});
    geom["triples"] = trs;
    j["geometry"] = geom;
    j["family"] = detail::family_to_json(family);
    if (holdout) j["holdout"] = detail::family_to_json(*holdout);
    j["solver"] = {{"epsilon", solver.epsilon},
                   {"tol", solver.tol},
                   {"max_iter", solver.max_iter},
                   {"scheme", solver.scheme == FdmScheme::picard ? "picard" : "damped_newton"},
                   {"damping", solver.damping},
                   {"sor_sweeps", solver.sor_sweeps},
                   {"sor_omega", solver.sor_omega}};
    ordered_json bj;
    bj["mode"] = bound_mode_name(bound.mode);
    if (bound.calibrate)
        bj["C"] = "calibrate";
    else
        bj["C"] = bound.C;
    j["bound"] = bj;
    j["output"] = {{"prefix", output.prefix}, {"dir", output.dir}};
    j["seed"] = seed;
    return j;
}

/// One verification row of a run: a profile, a triple, the weight used,
/// the empirical threshold, and the inequality margin.
struct TripleRow {
    std::string profile_id;
    RadiiTriple triple;
    double lambda = 0.0;
    LambdaStar lambda_star;
    double margin = 0.0;
    bool pass = false;
    bool holdout = false;
};

struct CalibrationOutcome {
    CalibrationResult result;
    std::string binding_profile;
    double holdout_tol = 1e-8; // lambda_formula(C_min) <= lambda* + tol
    bool holdout_pass = true;
    std::size_t holdout_members = 0;
};

struct ReportBundle {
    ExperimentConfig cfg;
    std::vector<std::pair<std::string, BallProfile>> profiles;
    std::vector<TripleRow> rows;
    std::optional<CalibrationOutcome> calibration;
    bool all_pass = true;
};

namespace detail {

// Counter blocks: member i of a family based at `base` draws from counters
// base + 16 i, ..., base + 16 i + 15. The holdout family is based at 2^32.
inline constexpr std::uint64_t holdout_counter_base = std::uint64_t(1) << 32;

inline std::vector<std::pair<std::string, BallProfile>> manufacture_family(
    const ExperimentConfig& cfg, const FamilySpec& fam, std::uint64_t counter_base,
    const std::vector<double>& radii) {
    std::vector<std::pair<std::string, BallProfile>> out;
    const EquationSpec spec = make_preset(cfg.preset, cfg.params, cfg.envelope);
    const double r_lo = radii.front(), r_hi = radii.back();

    if (fam.kind == "radial-exact") {
        for (int i = 0; i < fam.count; ++i) {
            const std::uint64_t ctr = counter_base + 16ull * static_cast<std::uint64_t>(i);
            const double a = counter_uniform(cfg.seed, ctr, -1.0, 1.0);
            const double mag = counter_uniform(cfg.seed, ctr + 1, 0.25, 1.25);
            // Orient b so the profile increases in r (M monotone).
            const bool increasing_needs_negative_b = cfg.params.regime() != Regime::gt_n;
            const double b = increasing_needs_negative_b ? -mag : mag;
            const RadialSolution sol = fundamental_solution(cfg.params, a, b);
            BallProfile bp = ball_profile(sol, r_lo, radii, BallGeometry::sphere_max);
            bp.envelope = cfg.envelope;
            out.emplace_back("fund-" + std::to_string(i), std::move(bp));
        }
        if (cfg.params.b1 > 0.0 && r_lo >= 1.0) {
            const std::uint64_t ctr =
                counter_base + 16ull * static_cast<std::uint64_t>(fam.count);
            for (int sign : {1, -1}) {
                const double u0 =
                    counter_uniform(cfg.seed, ctr + (sign > 0 ? 0 : 1), -1.0, 1.0);
                const RadialSolution sol =
                    extremal_drift_solution(cfg.params, sign, u0, r_lo);
                BallProfile bp = ball_profile(sol, r_lo, radii, BallGeometry::sphere_max);
                bp.envelope = cfg.envelope;
                out.emplace_back(std::string("ext-") + (sign > 0 ? "plus" : "minus"),
                                 std::move(bp));
            }
        }
    } else if (fam.kind == "radial-bvp") {
        for (int i = 0; i < fam.count; ++i) {
            const std::uint64_t ctr = counter_base + 16ull * static_cast<std::uint64_t>(i);
            const double v_lo = counter_uniform(cfg.seed, ctr, -1.0, 1.0);
            const double gap = counter_uniform(cfg.seed, ctr + 1, 0.5, 1.5);
            RadialProfile prof = solve_radial_bvp(spec, r_lo, v_lo, r_hi, v_lo + gap,
                                                  fam.steps, 1e-10);
            BallProfile bp = ball_profile(prof, radii, BallGeometry::sphere_max);
            bp.envelope = cfg.envelope;
            out.emplace_back("bvp-" + std::to_string(i), std::move(bp));
        }
    } else if (fam.kind == "grid") {
        const GridFunction2D tmpl =
            make_disk_grid(cfg.center[0], cfg.center[1], r_hi, fam.h);
        for (int i = 0; i < fam.count; ++i) {
            const std::uint64_t ctr = counter_base + 16ull * static_cast<std::uint64_t>(i);
            const double c0 = counter_uniform(cfg.seed, ctr, -0.5, 0.5);
            const double c1 = counter_uniform(cfg.seed, ctr + 1, -0.5, 0.5);
            const double c2 = counter_uniform(cfg.seed, ctr + 2, -0.5, 0.5);
            const double c3 = counter_uniform(cfg.seed, ctr + 3, 0.5, 1.5);
            const double c4 = counter_uniform(cfg.seed, ctr + 4, -0.5, 0.5);
            auto boundary = [=](double x, double y) {
                return c0 + c1 * x + c2 * y + c3 * (x * x - y * y) + c4 * x * y;
            };
            const FdmResult res = solve_dirichlet(spec, boundary, tmpl, cfg.solver);
            BallProfile bp = ball_profile(res.grid, cfg.center[0], cfg.center[1], radii,
                                          BallGeometry::ball_max, cfg.params, cfg.envelope);
            out.emplace_back("grid-" + std::to_string(i), std::move(bp));
        }
    } else {
        throw ConfigError("family: unknown kind '" + fam.kind + "'");
    }
    return out;
}

} // namespace detail

/// Execute one experiment: manufacture the family, compute weights
/// (calibrating the constant when requested), check every (profile, triple)
/// pair, and collect rows. Deterministic given (config, seed).
inline ReportBundle run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ReportBundle bundle;
    bundle.cfg = cfg;

    const std::vector<double>& fam_radii =
        cfg.family.radii.empty() ? cfg.radii : cfg.family.radii;
    const std::vector<RadiiTriple>& fam_triples =
        cfg.family.triples.empty() ? cfg.triples : cfg.family.triples;
    bundle.profiles = detail::manufacture_family(cfg, cfg.family, 0, fam_radii);

    const bool classical = bound_mode_name(cfg.bound.mode)[0] == 'c';
    std::optional<double> C;
    if (cfg.bound.calibrate) {
        std::vector<CalibrationFamilyMember> members;
        members.reserve(bundle.profiles.size());
        for (const auto& [id, prof] : bundle.profiles)
            members.push_back(CalibrationFamilyMember{prof, fam_triples});
        CalibrationOutcome outcome;
        outcome.result = calibrate_constant(members, cfg.bound.mode);
        outcome.binding_profile = bundle.profiles[outcome.result.binding_member].first;
        bundle.calibration = outcome;
        C = outcome.result.C_min;
    } else if (!classical) {
        C = cfg.bound.C;
    }

    auto add_rows = [&](const std::vector<std::pair<std::string, BallProfile>>& profiles,
                        const std::vector<RadiiTriple>& triples, bool is_holdout) {
        for (const auto& [id, prof] : profiles) {
            for (const RadiiTriple& t : triples) {
                const ThreeSpheresBound bound =
                    make_bound(cfg.bound.mode, cfg.params, t, C);
                const VerificationReport rep = check_three_spheres(prof, bound);
                TripleRow row;
                row.profile_id = id;
                row.triple = t;
                row.lambda = bound.lambda;
                row.lambda_star = empirical_lambda_star(prof, t);
                row.margin = rep.margin;
                row.pass = rep.passed;
                row.holdout = is_holdout;
                bundle.rows.push_back(row);
                bundle.all_pass = bundle.all_pass && row.pass;
            }
        }
    };
    add_rows(bundle.profiles, fam_triples, false);

    if (cfg.bound.calibrate && cfg.holdout) {
        const std::vector<double>& ho_radii =
            cfg.holdout->radii.empty() ? cfg.radii : cfg.holdout->radii;
        const std::vector<RadiiTriple>& ho_triples =
            cfg.holdout->triples.empty() ? cfg.triples : cfg.holdout->triples;
        auto ho_profiles = detail::manufacture_family(cfg, *cfg.holdout,
                                                      detail::holdout_counter_base, ho_radii);
        CalibrationOutcome& outcome = *bundle.calibration;
        outcome.holdout_members = ho_profiles.size();
        for (const auto& [id, prof] : ho_profiles) {
            for (const RadiiTriple& t : ho_triples) {
                const double lam = lambda_formula(cfg.bound.mode, cfg.params, t, *C);
                const LambdaStar ls = empirical_lambda_star(prof, t);
                if (!ls.all && lam > ls.value + outcome.holdout_tol)
                    outcome.holdout_pass = false;
            }
        }
        add_rows(ho_profiles, ho_triples, true);
        for (auto& pr : ho_profiles) bundle.profiles.push_back(std::move(pr));
        bundle.all_pass = bundle.all_pass && outcome.holdout_pass;
    }
    return bundle;
}

enum class ReportFormat { json, csv, table };

namespace detail {

inline std::string shortest_double(double v) { return ordered_json(v).dump(); }

inline std::string six_sig(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace detail

inline ordered_json report_json(const ReportBundle& bundle) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["name"] = bundle.cfg.name;
    doc["config"] = bundle.cfg.to_json();
    ordered_json profs = ordered_json::array();
    for (const auto& [id, prof] : bundle.profiles) {
        ordered_json pj;
        pj["id"] = id;
        pj["source"] = prof.source;
        pj["geometry"] = geometry_name(prof.geometry);
        pj["radii"] = prof.radii;
        pj["M"] = prof.M;
        pj["m"] = prof.m;
        profs.push_back(pj);
    }
    doc["profiles"] = profs;
    ordered_json rows = ordered_json::array();
    for (const TripleRow& row : bundle.rows) {
        ordered_json rj;
        rj["profile"] = row.profile_id;
        rj["r1"] = row.triple.r1;
        rj["r2"] = row.triple.r2;
        rj["r3"] = row.triple.r3;
        rj["lambda"] = row.lambda;
        if (row.lambda_star.all)
            rj["lambda_star"] = "all";
        else
            rj["lambda_star"] = row.lambda_star.value;
        rj["margin"] = row.margin;
        rj["pass"] = row.pass;
        rj["holdout"] = row.holdout;
        rows.push_back(rj);
    }
    doc["rows"] = rows;
    if (bundle.calibration) {
        const CalibrationOutcome& c = *bundle.calibration;
        ordered_json cj;
        cj["C_min"] = c.result.C_min;
        cj["family_size"] = c.result.family_size;
        cj["pair_count"] = c.result.pair_count;
        cj["binding_profile"] = c.binding_profile;
        cj["binding_triple"] = {c.result.binding_triple.r1, c.result.binding_triple.r2,
                                c.result.binding_triple.r3};
        cj["holdout_members"] = c.holdout_members;
        cj["holdout_tol"] = c.holdout_tol;
        cj["holdout_pass"] = c.holdout_pass;
        doc["calibration"] = cj;
    } else {
        doc["calibration"] = nullptr;
    }
    doc["all_pass"] = bundle.all_pass;
    return doc;
}

/// Verification rows as CSV with the fixed column set.
inline std::string emit_rows_csv(const ReportBundle& bundle) {
    std::string out = "r1,r2,r3,lambda,lambda_star,margin,pass\n";
    for (const TripleRow& row : bundle.rows) {
        out += detail::shortest_double(row.triple.r1) + ",";
        out += detail::shortest_double(row.triple.r2) + ",";
        out += detail::shortest_double(row.triple.r3) + ",";
        out += detail::shortest_double(row.lambda) + ",";
        out += row.lambda_star.all ? "all" : detail::shortest_double(row.lambda_star.value);
        out += ",";
        out += detail::shortest_double(row.margin) + ",";
        out += row.pass ? "true" : "false";
        out += "\n";
    }
    return out;
}

/// Sampled profiles as CSV (per-profile M and m against radius).
inline std::string emit_profiles_csv(const ReportBundle& bundle) {
    std::string out = "profile,r,M,m\n";
    for (const auto& [id, prof] : bundle.profiles)
        for (std::size_t i = 0; i < prof.radii.size(); ++i) {
            out += id + ",";
            out += detail::shortest_double(prof.radii[i]) + ",";
            out += detail::shortest_double(prof.M[i]) + ",";
            out += detail::shortest_double(prof.m[i]) + "\n";
        }
    return out;
}

/// Human-readable summary; floats truncated to 6 significant digits.
inline std::string emit_table(const ReportBundle& bundle) {
    std::string out;
    auto pad = [](std::string s, std::size_t w) {
        if (s.size() < w) s.append(w - s.size(), ' ');
        return s;
    };
    out += pad("profile", 12) + pad("r1", 10) + pad("r2", 10) + pad("r3", 10) +
           pad("lambda", 13) + pad("lambda_star", 13) + pad("margin", 14) + "pass\n";
    std::size_t failures = 0;
    for (const TripleRow& row : bundle.rows) {
        out += pad(row.profile_id, 12) + pad(detail::six_sig(row.triple.r1), 10) +
               pad(detail::six_sig(row.triple.r2), 10) +
               pad(detail::six_sig(row.triple.r3), 10) +
               pad(detail::six_sig(row.lambda), 13) +
               pad(row.lambda_star.all ? "all" : detail::six_sig(row.lambda_star.value), 13) +
               pad(detail::six_sig(row.margin), 14) + (row.pass ? "pass" : "FAIL") + "\n";
        if (!row.pass) ++failures;
    }
    out += "rows: " + std::to_string(bundle.rows.size()) +
           ", failures: " + std::to_string(failures) + "\n";
    if (bundle.calibration) {
        const CalibrationOutcome& c = *bundle.calibration;
        out += "C_min: " + detail::six_sig(c.result.C_min) + " (binding " +
               c.binding_profile + " at [" + detail::six_sig(c.result.binding_triple.r1) +
               ", " + detail::six_sig(c.result.binding_triple.r2) + ", " +
               detail::six_sig(c.result.binding_triple.r3) + "])\n";
        out += std::string("holdout: ") +
               (c.holdout_members == 0 ? "none"
                                       : (c.holdout_pass ? "pass" : "FAIL")) +
               "\n";
    }
    return out;
}

inline std::string emit_report(const ReportBundle& bundle, ReportFormat fmt) {
    switch (fmt) {
        case ReportFormat::json: return report_json(bundle).dump(2) + "\n";
        case ReportFormat::csv: return emit_rows_csv(bundle);
        case ReportFormat::table: return emit_table(bundle);
    }
    throw std::invalid_argument("emit_report: unsupported format");
}

/// Write content to path atomically (temp file + rename).
inline void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out << content;
        if (!out) throw std::runtime_error("short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

/// Output directory precedence: explicit override (CLI flag), then the
/// TRISPHERE_OUT_DIR environment variable, then the config, then ".".
inline std::string resolve_out_dir(const ExperimentConfig& cfg,
                                   const std::string& cli_override = "") {
    if (!cli_override.empty()) return cli_override;
    if (const char* env = std::getenv("TRISPHERE_OUT_DIR"); env && *env) return env;
    if (!cfg.output.dir.empty()) return cfg.output.dir;
    return ".";
}

struct RunPaths {
    std::string rows_csv;
    std::string profiles_csv;
    std::string report_json;
    std::string summary_table;
};

/// Write the four per-run artifacts into out_dir (created if missing).
inline RunPaths write_bundle(const ReportBundle& bundle, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    const std::string base = out_dir + "/" + bundle.cfg.output.prefix;
    RunPaths paths{base + "-rows.csv", base + "-profiles.csv", base + "-report.json",
                   base + "-summary.txt"};
    write_file_atomic(paths.rows_csv, emit_rows_csv(bundle));
    write_file_atomic(paths.profiles_csv, emit_profiles_csv(bundle));
    write_file_atomic(paths.report_json, emit_report(bundle, ReportFormat::json));
    write_file_atomic(paths.summary_table, emit_table(bundle));
    return paths;
}

} // namespace trisphere
