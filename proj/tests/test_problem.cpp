#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mfgfb/problem.hpp"

using namespace mfgfb;

TEST_CASE("derived coupling constants") {
    auto c = derive_constants(1.0);
    CHECK(c.c_theta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c.nu == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c.effective_dim == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(c.b0 == doctest::Approx(3.0).epsilon(1e-15));

    auto c2 = derive_constants(2.0);
    CHECK(c2.c_theta == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(c2.nu == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(c2.effective_dim == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(c2.b0 == doctest::Approx(2.5).epsilon(1e-15));

    CHECK(derive_constants(0.5).effective_dim == doctest::Approx(8.0).epsilon(1e-15));

    CHECK_THROWS_AS(derive_constants(0.0), std::domain_error);
    CHECK_THROWS_AS(derive_constants(-1.0), std::domain_error);
}

TEST_CASE("coupling constant identities over a theta sweep") {
    for (int k = 0; k <= 60; ++k) {
        const double theta = 0.1 + (10.0 - 0.1) * k / 60.0;
        const auto c = derive_constants(theta);
        CHECK(c.nu * (2.0 + theta) == doctest::Approx(2.0).epsilon(1e-13));
        CHECK(c.effective_dim - 1.0 ==
              doctest::Approx(3.0 + 2.0 / theta).epsilon(1e-13));
        CHECK(c.c_theta > 0.0);
        CHECK(c.c_theta < 1.0);
        CHECK(c.b0 > 1.0);
        CHECK(c.effective_dim > 2.0);
    }
}

TEST_CASE("initial pressure endpoint data") {
    InitialPressure p{parabola_profile(1.0)};
    CHECK(p.b() == doctest::Approx(1.0));
    CHECK(p.slope_left() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.slope_right() == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(p.h_left(0.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.h_left(0.5) == doctest::Approx(0.5).epsilon(1e-14));
    // theta = 1: mass of m0 = p0 is the integral of y(1-y).
    CHECK(p.mass(1.0) == doctest::Approx(1.0 / 6.0).epsilon(1e-10));
    CHECK(p.renormalized(1.0).mass(1.0) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("validation of the parabola profile") {
    InitialPressure p{parabola_profile(1.0)};
    // With C0 = 1 the upper sandwich p0 <= dist holds, but the lower bound
    // fails in the middle: p0(1/2) = 1/4 < 1/2 = dist.
    auto r1 = validate_initial_pressure(p, 1.0, 1.0, 10.0, 0.25);
    CHECK(!r1.passed);
    bool lower_failed = false;
    for (const auto& c : r1.checks)
        if (c.name == "nondegeneracy_sandwich") {
            CHECK(!c.passed);
            lower_failed = true;
            CHECK(std::abs(c.worst_y - 0.5) < 0.01);
            CHECK(c.margin == doctest::Approx(-0.25).epsilon(0.01));
        }
    CHECK(lower_failed);
    // C0 = 2 accommodates both sides.
    auto r2 = validate_initial_pressure(p, 1.0, 2.0, 10.0, 0.25);
    CHECK(r2.passed);
}

TEST_CASE("validation rejects quadratic vanishing") {
    PressureProfile prof(
        {0.0, 1.0}, [](double y) { return y * y * (1.0 - y); },
        [](double y) { return 2.0 * y - 3.0 * y * y; },
        [](double y) { return 2.0 - 6.0 * y; });
    InitialPressure p{prof};
    auto r = validate_initial_pressure(p, 1.0, 2.0, 10.0, 0.25);
    CHECK(!r.passed);
    bool near_zero_failure = false;
    for (const auto& c : r.checks)
        if (!c.passed && c.worst_y < 0.1) near_zero_failure = true;
    CHECK(near_zero_failure);
}

TEST_CASE("validation of the self-similar profile") {
    InitialPressure p{barenblatt_profile(1.0, 1.0, 1.0)};
    // Support [0, 6], slope_left = 2/3; renormalize for the mass check.
    CHECK(p.b() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(p.slope_left() == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // After renormalization (mass 4) the flat middle needs C0 >= 12.
    auto r = validate_initial_pressure(p.renormalized(1.0), 1.0, 13.0, 10.0, 0.5);
    CHECK(r.passed);
}

TEST_CASE("validation is monotone in C0") {
    InitialPressure p{bump_profile(1.0)};
    const auto pn = p.renormalized(1.0);
    bool prev_passed = false;
    for (double C0 : {2.0, 4.0, 6.0, 8.0, 10.0}) {
        const bool ok = validate_initial_pressure(pn, 1.0, C0, 40.0, 0.25).passed;
        if (prev_passed) CHECK(ok);
        prev_passed = ok;
    }
    CHECK(prev_passed);
}

TEST_CASE("transport map basics") {
    const auto p0 = parabola_profile(1.0);
    InitialPressure ip{p0};
    const auto prof = ip.renormalized(1.0).profile();

    SUBCASE("equal densities give the identity") {
        TransportMap map(prof, prof, 1.0);
        for (double y : {0.0, 0.1, 0.37, 0.62, 0.9, 1.0})
            CHECK(map(y) == doctest::Approx(y).epsilon(1e-8));
    }
    SUBCASE("translation target gives a shift") {
        const auto shifted = prof.shifted(0.75);
        TransportMap map(prof, shifted, 1.0);
        for (double y : {0.0, 0.25, 0.5, 0.8, 1.0})
            CHECK(map(y) == doctest::Approx(y + 0.75).epsilon(1e-8));
        CHECK(map.range().lo == doctest::Approx(0.75).epsilon(1e-12));
    }
}

TEST_CASE("transport map for the self-similar pair") {
    // theta = 1: m(.,1) on [0,6] against m(.,2) centered at the same point;
    // the exact map is y -> 3 + (y-3) 2^{2/3}.
    const double s = std::pow(2.0, 2.0 / 3.0);
    const auto p1 = barenblatt_profile(1.0, 1.0, 1.0);
    const auto p2 = barenblatt_profile(1.0, 1.0, 2.0).shifted(3.0 - 3.0 * s);
    TransportMap map(p1, p2, 1.0);
    for (double y : {0.5, 1.5, 3.0, 4.0, 5.5})
        CHECK(map(y) == doctest::Approx(3.0 + (y - 3.0) * s).epsilon(1e-6));
}

TEST_CASE("transport map equivariance and inverse") {
    const auto a = InitialPressure{parabola_profile(1.0)}.renormalized(1.0).profile();
    const auto b = InitialPressure{bump_profile(1.0)}.renormalized(1.0).profile();
    TransportMap fwd(a, b, 1.0);
    TransportMap bwd(b, a, 1.0);
    for (double y : {0.05, 0.3, 0.5, 0.7, 0.95})
        CHECK(bwd(fwd(y)) == doctest::Approx(y).epsilon(1e-6));

    const double d = 2.0;
    TransportMap shifted(a.shifted(d), b.shifted(d), 1.0);
    for (double y : {0.1, 0.4, 0.8})
        CHECK(shifted(y + d) == doctest::Approx(fwd(y) + d).epsilon(1e-8));
}

TEST_CASE("transport map rejects mass mismatch") {
    const auto a = InitialPressure{parabola_profile(1.0)}.renormalized(1.0).profile();
    const auto half = a.scaled(0.5);
    CHECK_THROWS_AS(TransportMap(a, half, 1.0), std::invalid_argument);
}

TEST_CASE("problem spec window validation") {
    InitialPressure p{parabola_profile(1.0)};
    auto spec = ProblemSpec::make(1.0, p, TerminalSpec::cost(0.0), 2.0);
    CHECK(spec.measurement_window.lo == doctest::Approx(0.5));
    CHECK(spec.measurement_window.hi == doctest::Approx(1.5));
    CHECK_THROWS_AS(ProblemSpec::make(1.0, p, TerminalSpec::cost(0.0), 1.0,
                                      Interval{0.0, 0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(ProblemSpec::make(1.0, p, TerminalSpec::cost(0.0), 1.0,
                                      Interval{0.5, 1.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(TerminalSpec::cost(-1.0), std::invalid_argument);
}
