#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mfgfb/numerics.hpp"
#include "mfgfb/oracle.hpp"

using namespace mfgfb;

TEST_CASE("density values and support") {
    SelfSimilarSolution s(1.0, 1.0);
    CHECK(s.density(0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(s.density(3.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(s.density(4.0, 1.0) == 0.0);
    CHECK(s.density(-3.5, 1.0) == 0.0);
    CHECK(s.support_halfwidth(1.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK_THROWS_AS(s.density(0.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(s.density(0.0, -1.0), std::domain_error);

    SelfSimilarSolution s2(2.0, 0.7);
    CHECK(s2.density(1.1 * s2.support_halfwidth(1.3), 1.3) == 0.0);
}

TEST_CASE("mass conservation in time") {
    for (double theta : {0.5, 1.0, 2.0}) {
        SelfSimilarSolution s(theta, 1.0);
        auto mass_at = [&](double t) {
            const double xs = s.support_halfwidth(t);
            return num::integrate([&](double x) { return s.density(x, t); }, -xs,
                                  xs, 256, 8);
        };
        const double m1 = mass_at(1.0);
        for (double t : {1.25, 1.5, 2.0})
            CHECK(mass_at(t) == doctest::Approx(m1).epsilon(1e-8));
    }
}

TEST_CASE("flow map and pushforward identity") {
    SelfSimilarSolution s(1.0, 1.0);
    CHECK(s.flow_map(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.flow_map(3.0, 8.0) == doctest::Approx(12.0).epsilon(1e-13));
    CHECK_THROWS_AS(s.flow_map(3.5, 2.0), std::domain_error);

    for (double theta : {0.5, 1.0, 2.0}) {
        SelfSimilarSolution o(theta, 1.0);
        const double ybound = o.support_halfwidth(1.0);
        for (double fy : {-0.9, -0.4, 0.0, 0.3, 0.8})
            for (double t : {1.0, 1.3, 1.9}) {
                const double y = fy * ybound;
                const double res = o.density(o.flow_map(y, t), t) * o.flow_map_y(y, t) -
                                   o.density(y, 1.0);
                CHECK(std::abs(res) <= 1e-12);
            }
    }
}

TEST_CASE("velocity and interior value function") {
    SelfSimilarSolution s(1.0, 1.0);
    CHECK(s.u_x(3.0, 1.0) == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(s.velocity(3.0, 1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(s.u_x(0.0, 1.7) == 0.0);

    // theta = 2 has the logarithmic branch: u(0,t) = -R ln t.
    SelfSimilarSolution slog(2.0, 1.0);
    CHECK(slog.value_inside(0.0, std::exp(1.0)) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(slog.value_inside(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));

    // Interior Hamilton-Jacobi residual with analytic derivatives.
    for (double theta : {0.5, 1.0, 2.0}) {
        SelfSimilarSolution o(theta, 1.0);
        for (double t : {1.0, 1.4, 2.0}) {
            const double xs = o.support_halfwidth(t);
            for (double f : {-0.95, -0.5, 0.0, 0.4, 0.85}) {
                const double x = f * xs;
                const double res =
                    -o.u_t(x, t) + 0.5 * o.u_x(x, t) * o.u_x(x, t) - o.pressure(x, t);
                CHECK(std::abs(res) <= 1e-10);
            }
        }
    }
}

TEST_CASE("exterior value extension") {
    for (double theta : {0.5, 1.0, 2.0}) {
        SelfSimilarSolution s(theta, 1.0);
        for (double t : {1.0, 1.5, 2.0}) {
            const double xs = s.support_halfwidth(t);
            // Continuity of u across the edge.
            CHECK(s.value_exterior(xs * (1.0 + 1e-9), t) ==
                  doctest::Approx(s.value_inside(xs, t)).epsilon(1e-7));
            // C^1 matching: u_x just outside equals -gamma_R'(t).
            const double dgr = s.nu() * xs / t;
            CHECK(s.u_x(xs * (1.0 + 1e-12), t) ==
                  doctest::Approx(-dgr).epsilon(1e-6));
            // Exterior Hamilton-Jacobi residual -u_t + u_x^2/2 = 0 by finite
            // differences at x = 2 x*(t).
            const double x = 2.0 * xs, e = 1e-5;
            const double ut =
                (s.value(x, t + e) - s.value(x, t - e)) / (2.0 * e);
            const double ux = s.u_x(x, t);
            CHECK(std::abs(-ut + 0.5 * ux * ux) <= 1e-8);
            CHECK_THROWS_AS(s.value_exterior(0.5 * xs, t), std::domain_error);
        }
    }
}

TEST_CASE("free boundary and acceleration identity") {
    SelfSimilarSolution s(1.0, 1.0);
    const auto [l, r] = s.free_boundary(1.0);
    CHECK(l == doctest::Approx(-3.0).epsilon(1e-14));
    CHECK(r == doctest::Approx(3.0).epsilon(1e-14));

    for (double theta : {0.5, 1.0, 2.0}) {
        SelfSimilarSolution o(theta, 1.0);
        for (double t = 1.0; t <= 2.0; t += 0.1)
            CHECK(o.boundary_acceleration_residual(t) <= 1e-10);
    }

    // gamma_R(t) = x*(1) t^nu is concave: the boundary decelerates while the
    // left edge gamma_L = -gamma_R is convex.
    const double e = 1e-4;
    auto gr = [&](double t) { return s.free_boundary(t).second; };
    auto gl = [&](double t) { return s.free_boundary(t).first; };
    const double grdd = (gr(1.5 + e) - 2.0 * gr(1.5) + gr(1.5 - e)) / (e * e);
    const double gldd = (gl(1.5 + e) - 2.0 * gl(1.5) + gl(1.5 - e)) / (e * e);
    CHECK(grdd < 0.0);
    CHECK(gldd > 0.0);
}

TEST_CASE("pressure gradient and edge behavior") {
    SelfSimilarSolution s(1.0, 1.0);
    for (double t : {1.0, 1.6}) {
        const double xs = s.support_halfwidth(t);
        // One-sided p_x at the edge is finite and nonzero; p vanishes outside.
        const double px_edge = s.pressure_x(xs * (1.0 - 1e-10), t);
        CHECK(std::abs(px_edge) > 1e-3);
        CHECK(std::isfinite(px_edge));
        CHECK(s.pressure(xs * 1.0001, t) == 0.0);
        // Pressure-gradient identity along particles:
        // p_x(gamma(y,t),t) = gamma_tt(y,t).
        const double e = 1e-5;
        for (double y : {-2.0, 0.5, 2.5}) {
            const double gtt = (s.flow_map(y, t + e) - 2.0 * s.flow_map(y, t) +
                                s.flow_map(y, t - e)) /
                               (e * e);
            CHECK(s.pressure_x(s.flow_map(y, t), t) ==
                  doctest::Approx(gtt).epsilon(1e-5));
        }
    }
}

TEST_CASE("density derivatives match finite differences") {
    SelfSimilarSolution s(1.5, 0.8);
    const double e = 1e-6;
    for (double t : {1.2, 1.8})
        for (double f : {-0.7, 0.1, 0.6}) {
            const double x = f * s.support_halfwidth(t);
            const double fd_x = (s.density(x + e, t) - s.density(x - e, t)) / (2 * e);
            const double fd_t = (s.density(x, t + e) - s.density(x, t - e)) / (2 * e);
            CHECK(s.density_x(x, t) == doctest::Approx(fd_x).epsilon(1e-6));
            CHECK(s.density_t(x, t) == doctest::Approx(fd_t).epsilon(1e-6));
        }
}

TEST_CASE("mass relation along the flow") {
    for (double theta : {0.5, 1.0, 2.0}) {
        SelfSimilarSolution s(theta, 1.0);
        const double ybound = s.support_halfwidth(1.0);
        // p0 in the oracle frame is p(., 1); gamma_y = t^nu.
        for (double t : {1.0, 1.5, 2.0})
            for (double f : {-0.8, -0.2, 0.5, 0.9}) {
                const double y = f * ybound;
                const double res =
                    s.pressure(s.flow_map(y, t), t) *
                        std::pow(s.flow_map_y(y, t), theta) -
                    s.pressure(y, 1.0);
                CHECK(std::abs(res) <= 1e-12);
            }
    }
}

TEST_CASE("exterior characteristic time is a tangency time") {
    SelfSimilarSolution s(1.0, 1.0);
    for (double t : {1.3, 2.0})
        for (double fac : {1.05, 1.5, 3.0}) {
            const double x = fac * s.support_halfwidth(t);
            const double tau = s.exterior_characteristic_time(x, t);
            CHECK(tau > 0.0);
            CHECK(tau <= t);
            // Tangent line from (x*(tau), tau) with slope x*'(tau) passes
            // through (x, t).
            const double xs = s.support_halfwidth(tau);
            const double speed = s.nu() * xs / tau;
            CHECK(xs + speed * (t - tau) == doctest::Approx(x).epsilon(1e-9));
        }
}
