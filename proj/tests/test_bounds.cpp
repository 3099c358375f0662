#include <trisphere/bounds.hpp>
#include <trisphere/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace trisphere;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const StructuralParams p22{2, 2.0, 1.0, 1.0, 0.0};
const StructuralParams p23{3, 2.0, 1.0, 1.0, 0.0};
const StructuralParams p42{2, 4.0, 1.0, 1.0, 0.0};
const RadiiTriple t124{1.0, 2.0, 4.0};
} // namespace

TEST_CASE("triple validation and scaling", "[bounds]") {
    CHECK_NOTHROW(t124.validate());
    CHECK_THROWS_AS((RadiiTriple{2.0, 1.0, 4.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((RadiiTriple{0.0, 1.0, 2.0}.validate()), std::invalid_argument);
    RadiiTriple s = t124.scaled(3.0);
    CHECK(s.r1 == 3.0);
    CHECK(s.r2 == 6.0);
    CHECK(s.r3 == 12.0);
}

TEST_CASE("unit sphere areas", "[bounds]") {
    CHECK_THAT(unit_sphere_area(2), WithinRel(2.0 * std::numbers::pi, 1e-15));
    CHECK_THAT(unit_sphere_area(3), WithinRel(4.0 * std::numbers::pi, 1e-15));
    CHECK_THAT(unit_sphere_area(4), WithinRel(2.0 * std::numbers::pi * std::numbers::pi,
                                              1e-14));
}

TEST_CASE("radial exponent alpha", "[bounds]") {
    CHECK_THAT(radial_alpha(p23), WithinRel(-1.0, 1e-15));
    CHECK_THAT(radial_alpha(p42), WithinRel(2.0 / 3.0, 1e-15));
    CHECK_THROWS_AS(radial_alpha(p22), std::invalid_argument);
}

TEST_CASE("classical weights at the fixed triple", "[bounds]") {
    CHECK_THAT(classical_weight(p22, t124), WithinAbs(0.5, 1e-15));
    CHECK_THAT(classical_weight(p23, t124), WithinRel(1.0 / 3.0, 1e-15));
    CHECK_THROWS_AS(classical_weight(p42, t124), std::invalid_argument);
}

TEST_CASE("classical weight satisfies the interpolation identity", "[bounds]") {
    // lambda sigma(r1) + (1 - lambda) sigma(r3) = sigma(r2) with sigma the
    // transformed radius; randomized triples, both classical regimes.
    for (std::uint64_t c = 0; c < 200; ++c) {
        const double r1 = counter_uniform(31, 4 * c, 0.2, 3.0);
        const double r2 = r1 + counter_uniform(31, 4 * c + 1, 0.05, 2.0);
        const double r3 = r2 + counter_uniform(31, 4 * c + 2, 0.05, 3.0);
        const RadiiTriple t{r1, r2, r3};
        for (const StructuralParams& ps : {p22, p23}) {
            const double lam = classical_weight(ps, t);
            REQUIRE(lam > 0.0);
            REQUIRE(lam < 1.0);
            const double lhs = lam * transformed_radius(ps, r1) +
                               (1.0 - lam) * transformed_radius(ps, r3);
            REQUIRE_THAT(lhs, WithinAbs(transformed_radius(ps, r2),
                                        1e-12 * std::fabs(transformed_radius(ps, r3)) +
                                            1e-12));
        }
    }
}

TEST_CASE("transformed radius by regime", "[bounds]") {
    CHECK_THAT(transformed_radius(p22, 4.0), WithinRel(std::log(4.0), 1e-15));
    CHECK_THAT(transformed_radius(p23, 2.0), WithinRel(-0.5, 1e-15)); // -r^alpha, alpha=-1
    CHECK_THROWS_AS(transformed_radius(p42, 2.0), std::invalid_argument);
}

TEST_CASE("p-capacity closed forms", "[bounds]") {
    // p = 4, n = 2, (1, 8): normalization 2 pi (2/3)^3, gap (3)^{1-p} -> 16 pi / 729
    CHECK_THAT(pcapacity(p42, 1.0, 8.0),
               WithinRel(16.0 * std::numbers::pi / 729.0, 1e-14));
    // p = n = 2, (1, e): 2 pi / log(R/r)
    CHECK_THAT(pcapacity(p22, 1.0, std::exp(1.0)),
               WithinRel(2.0 * std::numbers::pi, 1e-14));
    // p = 2 < n = 3, (1, 2): Newtonian condenser capacity 4 pi / (1/r - 1/R)
    CHECK_THAT(pcapacity(p23, 1.0, 2.0), WithinRel(8.0 * std::numbers::pi, 1e-14));
    CHECK_THROWS_AS(pcapacity(p22, 2.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(pcapacity(p22, -1.0, 2.0), std::invalid_argument);
}

TEST_CASE("p-capacity monotonicity in the plates", "[bounds]") {
    for (const StructuralParams& ps : {p22, p23, p42}) {
        double prev = pcapacity(ps, 1.0, 2.0);
        for (double R : {2.5, 3.0, 4.0, 8.0}) {
            const double cap = pcapacity(ps, 1.0, R);
            REQUIRE(cap < prev); // strictly decreasing in R
            prev = cap;
        }
        prev = pcapacity(ps, 0.5, 8.0);
        for (double r : {1.0, 2.0, 4.0}) {
            const double cap = pcapacity(ps, r, 8.0);
            REQUIRE(cap > prev); // strictly increasing in r
            prev = cap;
        }
    }
}

TEST_CASE("border-regime log sum and exponent factor", "[bounds]") {
    CHECK_THAT(border_log_sum(2, t124), WithinRel(6.3050488987910622, 1e-13));
    CHECK_THAT(lambda_exponent_factor(BoundMode::border_n, p22, t124),
               WithinRel(3.9433696161457026, 1e-13));
    CHECK_THAT(lambda_formula(BoundMode::border_n, p22, t124, 1.0),
               WithinRel(0.019382792013623373, 1e-13));
}

TEST_CASE("a-harmonic exponent factor", "[bounds]") {
    CHECK_THAT(lambda_exponent_factor(BoundMode::a_harmonic_n, p22, t124),
               WithinRel(2.9279715798382391, 1e-13));
    CHECK_THAT(lambda_formula(BoundMode::a_harmonic_n, p22, t124, 1.0),
               WithinRel(0.053505459699007052, 1e-13));
}

TEST_CASE("p>n exponent factor: frozen value and scale invariance", "[bounds]") {
    const double K = lambda_exponent_factor(BoundMode::p_gt_n, p42, t124);
    CHECK_THAT(K, WithinRel(5.1630568708994398, 1e-13));
    for (double k : {0.5, 3.0, 17.0}) {
        const double Ks = lambda_exponent_factor(BoundMode::p_gt_n, p42, t124.scaled(k));
        REQUIRE_THAT(Ks, WithinRel(K, 1e-12));
    }
}

TEST_CASE("lambda_formula is strictly decreasing in C", "[bounds]") {
    double prev = 1.0;
    for (double C : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        const double lam = lambda_formula(BoundMode::border_n, p22, t124, C);
        REQUIRE(lam > 0.0);
        REQUIRE(lam < prev);
        prev = lam;
    }
    // classical modes ignore C entirely
    CHECK(lambda_formula(BoundMode::classical_n, p22, t124, 1.0) ==
          lambda_formula(BoundMode::classical_n, p22, t124, 7.0));
}

TEST_CASE("limit weight of the expanding-triple argument", "[bounds]") {
    CHECK_THAT(lambda_infinity(1.0), WithinAbs(0.36787944117144233, 1e-16));
    CHECK_THAT(lambda_infinity(-std::log(0.2)), WithinAbs(0.2, 1e-15));
    CHECK_THROWS_AS(lambda_infinity(0.0), std::invalid_argument);
}

TEST_CASE("mode/regime compatibility is enforced", "[bounds]") {
    CHECK(mode_matches_regime(BoundMode::classical_n, Regime::border_n));
    CHECK(mode_matches_regime(BoundMode::border_n, Regime::border_n));
    CHECK(mode_matches_regime(BoundMode::a_harmonic_n, Regime::border_n));
    CHECK(mode_matches_regime(BoundMode::classical_sub_n, Regime::sub_n));
    CHECK(mode_matches_regime(BoundMode::p_gt_n, Regime::gt_n));
    CHECK_FALSE(mode_matches_regime(BoundMode::border_n, Regime::sub_n));
    CHECK_FALSE(mode_matches_regime(BoundMode::classical_sub_n, Regime::gt_n));
    CHECK_THROWS_AS(lambda_formula(BoundMode::p_gt_n, p22, t124, 1.0),
                    std::invalid_argument);
}

TEST_CASE("make_bound assembles a valid bound", "[bounds]") {
    ThreeSpheresBound b = make_bound(BoundMode::border_n, p22, t124, 0.8);
    CHECK_NOTHROW(b.validate());
    CHECK_THAT(b.lambda, WithinRel(std::exp(-0.8 * 3.9433696161457026), 1e-12));
    ThreeSpheresBound c = make_bound(BoundMode::classical_n, p22, t124);
    CHECK_THAT(c.lambda, WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(make_bound(BoundMode::border_n, p23, t124, 1.0),
                    std::invalid_argument);
}

TEST_CASE("bound mode names round-trip", "[bounds]") {
    for (BoundMode m : {BoundMode::classical_sub_n, BoundMode::classical_n,
                        BoundMode::border_n, BoundMode::a_harmonic_n, BoundMode::p_gt_n})
        CHECK(bound_mode_from_name(bound_mode_name(m)) == m);
    CHECK_THROWS_AS(bound_mode_from_name("nope"), std::invalid_argument);
}
