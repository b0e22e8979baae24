#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "mfgfb/analysis.hpp"
#include "mfgfb/solver.hpp"

using namespace mfgfb;

namespace {

FlowField sampled_oracle_field(const OracleProblem& op, const Mesh& mesh) {
    FlowField f = FlowField::identity(mesh);
    for (int n = 0; n < mesh.nt(); ++n)
        for (int i = 0; i < mesh.ny(); ++i)
            f.at(n, i) = op.exact_gamma(mesh.y_nodes[i], mesh.t_nodes[n]);
    return f;
}

FlowField random_monotone_field(const Mesh& mesh, std::mt19937& rng) {
    std::uniform_real_distribution<double> amp(-0.05, 0.05);
    const double b = mesh.b(), T = mesh.T();
    const double a1 = amp(rng), a2 = amp(rng), a3 = amp(rng);
    FlowField f = FlowField::identity(mesh);
    const double pi = 3.14159265358979323846;
    for (int n = 0; n < mesh.nt(); ++n)
        for (int i = 0; i < mesh.ny(); ++i) {
            const double y = mesh.y_nodes[i], t = mesh.t_nodes[n];
            f.at(n, i) = y + b / pi *
                                 (a1 * std::sin(pi * y / b) +
                                  a2 * t / T * std::sin(2.0 * pi * y / b)) +
                         a3 * t * t / (T * T) * y * (b - y) / b;
        }
    REQUIRE(f.min_face_slope() > 0.2);
    return f;
}

}  // namespace

TEST_CASE("mesh construction") {
    const Mesh m = Mesh::make(2.0, 1.0, 33, 17);
    CHECK(m.ny() == 33);
    CHECK(m.nt() == 17);
    CHECK(m.y_nodes.front() == 0.0);
    CHECK(m.y_nodes.back() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(m.t_nodes.back() == doctest::Approx(1.0).epsilon(1e-15));
    for (int i = 0; i + 1 < m.ny(); ++i) CHECK(m.y_nodes[i] < m.y_nodes[i + 1]);
    CHECK_THROWS_AS(Mesh::make(1.0, 1.0, 16, 17), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::make(1.0, 1.0, 17, 16), std::invalid_argument);
    CHECK_THROWS_AS(Mesh::make(-1.0, 1.0, 17, 17), std::invalid_argument);

    const Mesh g = Mesh::make(2.0, 1.0, 65, 17, Grading::SqrtGraded);
    // Graded cells cluster at both support endpoints.
    CHECK(g.y_nodes[1] - g.y_nodes[0] < 0.25 * (g.y_nodes[33] - g.y_nodes[32]));
    CHECK(g.y_nodes[64] - g.y_nodes[63] < 0.25 * (g.y_nodes[33] - g.y_nodes[32]));
    CHECK(g.y_nodes.back() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("identity field basics") {
    const Mesh m = Mesh::make(1.0, 1.0, 17, 17);
    const FlowField f = FlowField::identity(m);
    CHECK(f.min_face_slope() == doctest::Approx(1.0).epsilon(1e-13));
    for (double z : f.z_nodes(1.7)) CHECK(z == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate coupling reduces to free transport") {
    InitialPressure zero{parabola_profile(1.0, 0.0)};
    auto prob = ProblemSpec::make(1.0, zero, TerminalSpec::cost(0.0), 1.0);
    const Mesh m = Mesh::make(1.0, 1.0, 17, 17);

    const FlowField id = FlowField::identity(m);
    for (double v : assemble_residual(id, prob)) CHECK(std::abs(v) <= 1e-13);

    // A uniformly translating field solves the interior rows but not the
    // zero-velocity terminal row.
    FlowField moving = id;
    for (int n = 0; n < m.nt(); ++n)
        for (int i = 0; i < m.ny(); ++i) moving.at(n, i) += 0.1 * m.t_nodes[n];
    const auto r = assemble_residual(moving, prob);
    const int ny = m.ny(), nt = m.nt();
    for (int n = 1; n + 1 < nt; ++n)
        for (int i = 0; i < ny; ++i)
            CHECK(std::abs(r[static_cast<std::size_t>(n) * ny + i]) <= 1e-12);
    CHECK(r[static_cast<std::size_t>(nt - 1) * ny + ny / 2] ==
          doctest::Approx(0.1).epsilon(1e-10));
}

TEST_CASE("static identity field feels the pressure slope") {
    InitialPressure p{parabola_profile(1.0)};
    auto prob = ProblemSpec::make(1.0, p, TerminalSpec::cost(0.0), 1.0);
    const Mesh m = Mesh::make(1.0, 1.0, 33, 17);
    const auto r = assemble_residual(FlowField::identity(m), prob);
    const int ny = m.ny();
    for (int i = 1; i + 1 < ny; ++i) {
        const double y = m.y_nodes[i];
        CHECK(r[static_cast<std::size_t>(8) * ny + i] ==
              doctest::Approx(-(1.0 - 2.0 * y)).epsilon(1e-10));
    }
    // Endpoint rows carry the acceleration law with the one-sided face.
    CHECK(r[static_cast<std::size_t>(8) * ny] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(r[static_cast<std::size_t>(8) * ny + ny - 1] ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("residual rejects non-monotone fields naming the cell") {
    InitialPressure p{parabola_profile(1.0)};
    auto prob = ProblemSpec::make(1.0, p, TerminalSpec::cost(0.0), 1.0);
    const Mesh m = Mesh::make(1.0, 1.0, 17, 17);
    FlowField f = FlowField::identity(m);
    f.at(5, 8) = f.at(5, 9) + 0.01;
    try {
        assemble_residual(f, prob);
        FAIL("expected monotonicity error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("t=5") != std::string::npos);
        CHECK(std::string(e.what()).find("y=8") != std::string::npos);
    }
}

TEST_CASE("oracle field leaves only truncation residual") {
    const auto op = make_barenblatt_planning_problem(1.0, 1.0);
    std::vector<double> norms;
    for (int n : {17, 33, 65}) {
        const Mesh mesh = Mesh::make(op.spec.initial.b(), op.spec.horizon, n, n);
        const auto r = assemble_residual(sampled_oracle_field(op, mesh), op.spec);
        norms.push_back(residual_inf_norm(r));
    }
    CHECK(norms[0] / norms[1] >= 3.5);
    CHECK(norms[1] / norms[2] >= 3.5);
}

TEST_CASE("terminal conditions") {
    SUBCASE("planning with a translated target is a shift row") {
        const double d = 0.5;
        InitialPressure p{parabola_profile(1.0)};
        const auto prof = p.renormalized(1.0);
        TerminalProfile target{prof.profile().shifted(d)};
        auto prob = ProblemSpec::make(1.0, prof, TerminalSpec::planning(target), 1.0);
        const Mesh m = Mesh::make(1.0, 1.0, 33, 17);
        const auto target_nodes = planning_target(prob, m);
        for (int i = 0; i < m.ny(); ++i)
            CHECK(target_nodes[i] == doctest::Approx(m.y_nodes[i] + d).epsilon(1e-7));
    }
    SUBCASE("planning with the self-similar pair is the scaling row") {
        const auto op = make_barenblatt_planning_problem(1.0, 1.0);
        const Mesh m = Mesh::make(op.spec.initial.b(), op.spec.horizon, 33, 17);
        const auto target = planning_target(op.spec, m);
        const double s = std::pow(2.0, 2.0 / 3.0);
        for (int i = 0; i < m.ny(); ++i)
            CHECK(target[i] ==
                  doctest::Approx(3.0 + (m.y_nodes[i] - 3.0) * s).epsilon(1e-6));
    }
}

TEST_CASE("jacobian matches finite differences") {
    std::mt19937 rng(42);
    InitialPressure p{bump_profile(1.0)};
    for (int n : {17, 33}) {
        const Mesh mesh = Mesh::make(1.0, 1.0, n, n);
        for (auto kind : {0, 1}) {
            auto prob = kind == 0
                            ? ProblemSpec::make(1.0, p, TerminalSpec::cost(0.3), 1.0)
                            : ProblemSpec::make(
                                  1.0, p.renormalized(1.0),
                                  TerminalSpec::planning(TerminalProfile{
                                      p.renormalized(1.0).profile().shifted(0.1)}),
                                  1.0);
            for (int rep = 0; rep < 5; ++rep) {
                FlowField f = random_monotone_field(mesh, rng);
                auto J = assemble_jacobian(f, prob);
                std::uniform_real_distribution<double> u(-1.0, 1.0);
                std::vector<double> dir(f.gamma.size());
                for (auto& v : dir) v = u(rng);

                const double eps = 1e-6;
                FlowField fp = f, fm = f;
                for (std::size_t k = 0; k < dir.size(); ++k) {
                    fp.gamma[k] += eps * dir[k];
                    fm.gamma[k] -= eps * dir[k];
                }
                const auto rp = assemble_residual(fp, prob);
                const auto rm = assemble_residual(fm, prob);

                // J * dir via banded entries.
                const int N = static_cast<int>(dir.size());
                const int kl = kind == 0 ? 2 * mesh.ny() : mesh.ny();
                std::vector<double> jd(N, 0.0);
                for (int i = 0; i < N; ++i)
                    for (int j = std::max(0, i - kl);
                         j <= std::min(N - 1, i + mesh.ny()); ++j)
                        jd[i] += J.at(i, j) * dir[j];

                double max_diff = 0.0, scale = 0.0;
                for (int i = 0; i < N; ++i) {
                    const double fd = (rp[i] - rm[i]) / (2.0 * eps);
                    max_diff = std::max(max_diff, std::abs(jd[i] - fd));
                    scale = std::max(scale, std::abs(fd));
                }
                CHECK(max_diff <= 1e-6 * std::max(scale, 1.0));
            }
        }
    }
}

TEST_CASE("interior jacobian time coupling is the second-difference weight") {
    InitialPressure p{parabola_profile(1.0)};
    auto prob = ProblemSpec::make(1.0, p, TerminalSpec::cost(0.0), 1.0);
    const Mesh m = Mesh::make(1.0, 1.0, 17, 17);
    auto J = assemble_jacobian(FlowField::identity(m), prob);
    const double w = 1.0 / (m.dt() * m.dt());
    const int row = 8 * m.ny() + 8;
    CHECK(J.at(row, row - m.ny()) == doctest::Approx(w).epsilon(1e-12));
    CHECK(J.at(row, row + m.ny()) == doctest::Approx(w).epsilon(1e-12));
}

TEST_CASE("newton solve on the self-similar planning pair") {
    const auto op = make_barenblatt_planning_problem(1.0, 1.0);
    const Mesh mesh = Mesh::make(op.spec.initial.b(), op.spec.horizon, 65, 65);
    SolverConfig cfg;
    ConvergenceTrace trace;
    const FlowField f =
        newton_solve(op.spec, cfg, default_initial_guess(op.spec, mesh), &trace);

    CHECK(trace.iterations <= 12);
    CHECK(residual_inf_norm(assemble_residual(f, op.spec)) <= 1e-10);
    CHECK(f.min_face_slope() > 0.5);
    for (std::size_t k = 1; k < trace.residual_norms.size(); ++k)
        CHECK(trace.residual_norms[k] < trace.residual_norms[k - 1]);

    double err = 0.0;
    for (int n = 0; n < mesh.nt(); ++n)
        for (int i = 0; i < mesh.ny(); ++i)
            err = std::max(err, std::abs(f.at(n, i) - op.exact_gamma(
                                                          mesh.y_nodes[i],
                                                          mesh.t_nodes[n])));
    CHECK(err <= 1e-5);

    // Endpoint rows of the converged field reproduce the acceleration law.
    const double dt = mesh.dt();
    const double expo = -(op.spec.coupling.theta + 1.0);
    for (int n = 1; n + 1 < mesh.nt(); ++n) {
        const double gtt =
            (f.at(n - 1, 0) - 2.0 * f.at(n, 0) + f.at(n + 1, 0)) / (dt * dt);
        const double law = op.spec.initial.slope_left() *
                           std::pow(f.face_slope(n, 0), expo);
        CHECK(std::abs(gtt - law) <= 1e-9);
    }
}

TEST_CASE("nonconvergence carries the trace") {
    const auto op = make_barenblatt_planning_problem(1.0, 1.0);
    const Mesh mesh = Mesh::make(op.spec.initial.b(), op.spec.horizon, 17, 17);
    SolverConfig cfg;
    cfg.max_iters = 1;
    cfg.newton_tol = 1e-14;
    try {
        newton_solve(op.spec, cfg, default_initial_guess(op.spec, mesh));
        FAIL("expected nonconvergence");
    } catch (const NonconvergenceError& e) {
        CHECK(!e.trace.residual_norms.empty());
    }
}

TEST_CASE("continuation solve") {
    const auto op = make_barenblatt_planning_problem(1.0, 1.0);
    SolverConfig cfg;

    SUBCASE("one level equals a direct solve") {
        const Mesh mesh = Mesh::make(op.spec.initial.b(), op.spec.horizon, 33, 33);
        cfg.continuation_levels = 1;
        const FlowField a = continuation_solve(op.spec, cfg, mesh);
        const FlowField b =
            newton_solve(op.spec, cfg, default_initial_guess(op.spec, mesh));
        for (std::size_t k = 0; k < a.gamma.size(); ++k)
            CHECK(std::abs(a.gamma[k] - b.gamma[k]) <= 1e-12);
    }
    SUBCASE("two levels reach the fine mesh") {
        const Mesh fine = Mesh::make(op.spec.initial.b(), op.spec.horizon, 65, 65);
        cfg.continuation_levels = 2;
        const FlowField f = continuation_solve(op.spec, cfg, fine);
        CHECK(residual_inf_norm(assemble_residual(f, op.spec)) <= 1e-10);
    }
    SUBCASE("failure is annotated with the level") {
        const Mesh fine = Mesh::make(op.spec.initial.b(), op.spec.horizon, 65, 65);
        cfg.continuation_levels = 2;
        cfg.max_iters = 1;
        cfg.newton_tol = 1e-14;
        try {
            continuation_solve(op.spec, cfg, fine);
            FAIL("expected nonconvergence");
        } catch (const NonconvergenceError& e) {
            CHECK(std::string(e.what()).find("level") != std::string::npos);
        }
    }
    SUBCASE("non-coarsenable mesh is rejected") {
        const Mesh fine = Mesh::make(op.spec.initial.b(), op.spec.horizon, 34, 34);
        cfg.continuation_levels = 2;
        CHECK_THROWS_AS(continuation_solve(op.spec, cfg, fine),
                        std::invalid_argument);
    }
}
