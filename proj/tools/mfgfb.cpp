#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>

#include "mfgfb/analysis.hpp"
#include "mfgfb/config.hpp"
#include "mfgfb/io.hpp"
#include "mfgfb/oracle.hpp"
#include "mfgfb/solver.hpp"
#include "mfgfb/transforms.hpp"

namespace fs = std::filesystem;
using namespace mfgfb;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNonconvergence = 3;
constexpr int kExitIo = 4;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::string mesh;  // "NxM"
    int levels = 2;
    bool force = false;
    unsigned seed = 0;
};

std::pair<int, int> parse_mesh(const std::string& s) {
    const auto x = s.find('x');
    if (x == std::string::npos)
        throw std::runtime_error("--mesh expects NxM, got " + s);
    return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
}

void apply_mesh_override(const CommonOpts& opts, GridConfig& grid) {
    if (opts.mesh.empty()) return;
    auto [ny, nt] = parse_mesh(opts.mesh);
    grid.ny = ny;
    grid.nt = nt;
}

std::string json_kv(const std::string& key, double v) {
    return "\"" + key + "\": " + io::format_number(v);
}

int run_oracle(const CommonOpts& opts, double theta, double R) {
    SelfSimilarSolution s(theta, R);
    int nx = 101, nt = 41;
    if (!opts.mesh.empty()) std::tie(nx, nt) = parse_mesh(opts.mesh);

    const double x_max = 1.2 * s.support_halfwidth(2.0);
    std::vector<std::vector<double>> field, curve;
    for (int n = 0; n < nt; ++n) {
        const double t = 1.0 + static_cast<double>(n) / (nt - 1);
        for (int k = 0; k < nx; ++k) {
            const double x = -x_max + 2.0 * x_max * k / (nx - 1);
            field.push_back({x, t, s.density(x, t), s.pressure(x, t), s.value(x, t),
                             s.u_x(x, t)});
        }
        const auto [l, r] = s.free_boundary(t);
        curve.push_back({t, l, r});
    }
    io::ArtifactWriter w(opts.out_dir, opts.force);
    w.write_csv("field.csv", {"x", "t", "m", "p", "u", "ux"}, field);
    w.write_csv("fb_curve.csv", {"t", "left", "right"}, curve);
    w.finalize();
    return 0;
}

void write_trace(io::ArtifactWriter& w, const ConvergenceTrace& trace) {
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < trace.residual_norms.size(); ++k)
        rows.push_back({static_cast<double>(k), trace.residual_norms[k]});
    w.write_csv("trace.csv", {"iter", "residual"}, rows);
}

void write_field_csv(io::ArtifactWriter& w, const FlowField& field, double theta) {
    const auto gy = field.gamma_y_nodes();
    const auto Z = field.z_nodes(theta);
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    std::vector<std::vector<double>> rows;
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i < ny; ++i) {
            const std::size_t id = static_cast<std::size_t>(n) * ny + i;
            rows.push_back({field.mesh.y_nodes[i], field.mesh.t_nodes[n],
                            field.at(n, i), gy[id], Z[id]});
        }
    w.write_csv("field.csv", {"y", "t", "gamma", "gamma_y", "Z"}, rows);
}

int run_solve(const CommonOpts& opts) {
    RunSetup setup = load_run_setup(opts.config_path);
    apply_mesh_override(opts, setup.grid);
    const Mesh mesh = Mesh::make(setup.problem.initial.b(), setup.problem.horizon,
                                 setup.grid.ny, setup.grid.nt, setup.grid.grading);
    io::ArtifactWriter w(opts.out_dir, opts.force);
    ConvergenceTrace trace;
    FlowField field = FlowField::identity(mesh);
    try {
        field = newton_solve(setup.problem, setup.solver,
                             default_initial_guess(setup.problem, mesh), &trace);
    } catch (const NonconvergenceError& e) {
        write_trace(w, e.trace);
        w.write_text("summary.json",
                     std::string("{\n  \"converged\": false,\n  \"error\": \"") +
                         e.what() + "\"\n}\n");
        w.finalize();
        std::cerr << "solver nonconvergence: " << e.what() << "\n";
        return kExitNonconvergence;
    }
    write_trace(w, trace);
    write_field_csv(w, field, setup.problem.coupling.theta);

    const auto res = assemble_residual(field, setup.problem);
    const auto gy = field.gamma_y_nodes();
    double c = gy[0], C = gy[0];
    for (double g : gy) {
        c = std::min(c, g);
        C = std::max(C, g);
    }
    std::ostringstream summary;
    summary << "{\n  \"converged\": true,\n  \"iterations\": " << trace.iterations
            << ",\n  " << json_kv("final_residual", residual_inf_norm(res))
            << ",\n  " << json_kv("gamma_y_min", c) << ",\n  "
            << json_kv("gamma_y_max", C) << ",\n  \"seed\": " << opts.seed
            << "\n}\n";
    w.write_text("summary.json", summary.str());
    w.finalize();
    return 0;
}

int run_validate(const CommonOpts& opts) {
    RunSetup setup = load_run_setup(opts.config_path);
    const auto report = validate_initial_pressure(
        setup.problem.initial, setup.problem.coupling.theta, setup.validation.C0,
        setup.validation.K0, setup.validation.delta);
    std::ostringstream out;
    out << "{\n  \"passed\": " << (report.passed ? "true" : "false")
        << ",\n  \"checks\": [\n";
    for (std::size_t k = 0; k < report.checks.size(); ++k) {
        const auto& c = report.checks[k];
        out << "    {\"name\": \"" << c.name << "\", \"passed\": "
            << (c.passed ? "true" : "false") << ", " << json_kv("worst_y", c.worst_y)
            << ", " << json_kv("margin", c.margin) << "}"
            << (k + 1 < report.checks.size() ? "," : "") << "\n";
    }
    out << "  ]\n}\n";
    io::ArtifactWriter w(opts.out_dir, opts.force);
    w.write_text("validation.json", out.str());
    w.finalize();
    for (const auto& c : report.checks)
        std::cout << (c.passed ? "pass " : "FAIL ") << c.name << "\n";
    return report.passed ? 0 : kExitValidation;
}

int run_transforms(const CommonOpts& opts) {
    RunSetup setup = load_run_setup(opts.config_path);
    apply_mesh_override(opts, setup.grid);
    const double b = setup.problem.initial.b();
    // Snap r0 to a y-node of the base grid; dyadic refinements keep the node,
    // so the truncated radial grid always ends exactly at r0 and the
    // axis-touching test stays admissible on every level.
    const Mesh base = Mesh::make(b, setup.problem.horizon, setup.grid.ny,
                                 setup.grid.nt, setup.grid.grading);
    double y_snap = base.y_nodes[1];
    for (double y : base.y_nodes) {
        if (y > 0.2 * b + 1e-12) break;
        if (y > 0.0) y_snap = y;
    }
    const double r0 = 2.0 * std::sqrt(y_snap);
    const auto chart =
        build_radial_chart(setup.problem.initial, setup.problem.coupling, r0);

    io::ArtifactWriter w(opts.out_dir, opts.force);
    std::vector<std::vector<double>> chart_rows;
    for (std::size_t j = 0; j < chart.r_nodes.size(); ++j)
        chart_rows.push_back({chart.r_nodes[j], chart.W[j], chart.A[j], chart.D[j],
                              chart.omega0[j]});
    w.write_csv("chart.csv", {"r", "W", "A", "D", "omega0"}, chart_rows);

    // Weak residuals of the solved field across refinements of the base grid.
    const Interval J = setup.problem.measurement_window;
    const auto test = axis_touching_test(r0, J.lo, J.hi);
    std::vector<std::vector<double>> weak_rows;
    for (int level = 0; level < opts.levels; ++level) {
        const int n = (setup.grid.ny - 1) * (1 << level) + 1;
        const Mesh mesh = Mesh::make(b, setup.problem.horizon, n, n,
                                     setup.grid.grading);
        const FlowField field = newton_solve(
            setup.problem, setup.solver, default_initial_guess(setup.problem, mesh));
        const auto zt =
            z_tilde_from_field(field, setup.problem.coupling.theta, r0);
        weak_rows.push_back(
            {0.0, static_cast<double>(level),
             std::abs(weighted_weak_residual(chart, zt, test))});
    }
    w.write_csv("weak_residuals.csv", {"test_id", "mesh_level", "residual"},
                weak_rows);
    w.finalize();
    return 0;
}

int run_report(const CommonOpts& opts) {
    RunSetup setup = load_run_setup(opts.config_path);
    apply_mesh_override(opts, setup.grid);
    const Mesh mesh = Mesh::make(setup.problem.initial.b(), setup.problem.horizon,
                                 setup.grid.ny, setup.grid.nt, setup.grid.grading);
    const FlowField field = newton_solve(setup.problem, setup.solver,
                                         default_initial_guess(setup.problem, mesh));
    const auto rep = build_report(field, setup.problem);

    io::ArtifactWriter w(opts.out_dir, opts.force);
    std::vector<std::vector<double>> curve_rows;
    for (std::size_t n = 0; n < rep.curves.t.size(); ++n)
        curve_rows.push_back({rep.curves.t[n], rep.curves.left[n],
                              rep.curves.right[n], rep.curves.left_dd[n],
                              rep.curves.right_dd[n]});
    w.write_csv("fb_curves.csv", {"t", "left", "right", "left_dd", "right_dd"},
                curve_rows);

    std::ostringstream rates;
    rates << "quantity,exponent,r2,band\n";
    auto rate_row = [&](const std::string& name, const RateFit& f) {
        rates << name << "," << io::format_number(f.exponent) << ","
              << io::format_number(f.r_squared) << "," << io::format_number(f.band)
              << "\n";
    };
    rate_row("pressure_left", rep.pressure_rate_left);
    rate_row("pressure_right", rep.pressure_rate_right);
    rate_row("effective_dim", rep.effective_dim);
    w.write_text("rates.csv", rates.str());

    std::ostringstream residuals;
    residuals << "name,value\n"
              << "acceleration_left," << io::format_number(rep.accel.left) << "\n"
              << "acceleration_right," << io::format_number(rep.accel.right) << "\n"
              << "mass_relation," << io::format_number(rep.mass_relation) << "\n"
              << "hj," << io::format_number(rep.pde.hj) << "\n"
              << "continuity," << io::format_number(rep.pde.continuity) << "\n";
    w.write_text("residuals.csv", residuals.str());

    std::ostringstream rj;
    rj << "{\n  " << json_kv("acceleration_left", rep.accel.left) << ",\n  "
       << json_kv("acceleration_right", rep.accel.right) << ",\n  "
       << json_kv("mass_relation", rep.mass_relation) << ",\n  "
       << json_kv("hj_residual", rep.pde.hj) << ",\n  "
       << json_kv("continuity_residual", rep.pde.continuity) << ",\n  "
       << json_kv("pressure_exponent_left", rep.pressure_rate_left.exponent)
       << ",\n  "
       << json_kv("pressure_exponent_right", rep.pressure_rate_right.exponent)
       << ",\n  " << json_kv("effective_dim_slope", rep.effective_dim.exponent)
       << ",\n  " << json_kv("gamma_y_min", rep.gamma_y_min) << ",\n  "
       << json_kv("gamma_y_max", rep.gamma_y_max) << "\n}\n";
    w.write_text("report.json", rj.str());
    w.finalize();
    return 0;
}

int run_convergence(const CommonOpts& opts, double theta, double R) {
    OracleProblem op = make_barenblatt_planning_problem(theta, R);
    std::vector<int> levels;
    for (int k = 0; k < std::max(opts.levels, 2); ++k) levels.push_back(32 * (1 << k) + 1);
    SolverConfig cfg;
    const auto table = convergence_study(op, levels, cfg);

    io::ArtifactWriter w(opts.out_dir, opts.force);
    std::vector<std::vector<double>> rows;
    for (const auto& r : table.rows)
        rows.push_back({static_cast<double>(r.n), r.err_gamma_inf, r.err_gamma_l2,
                        r.err_p_inf, r.err_ux_inf,
                        static_cast<double>(r.newton_iters)});
    w.write_csv("convergence.csv",
                {"n", "err_gamma_inf", "err_gamma_l2", "err_p_inf", "err_ux_inf",
                 "newton_iters"},
                rows);
    std::vector<std::vector<double>> order_rows;
    for (std::size_t k = 0; k < table.orders_gamma.size(); ++k)
        order_rows.push_back({static_cast<double>(table.rows[k + 1].n),
                              table.orders_gamma[k]});
    w.write_csv("orders.csv", {"n", "order_gamma"}, order_rows);
    w.finalize();
    for (const auto& r : order_rows)
        std::cout << "order at n=" << static_cast<int>(r[0]) << ": " << r[1] << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mean field game free boundary laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;
    double theta = 1.0, R = 1.0;
    if (const char* threads = std::getenv("MFGFB_THREADS")) (void)threads;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opts.config_path, "problem config file");
        if (needs_config) c->required();
        sub->add_option("--out", opts.out_dir, "output directory");
        sub->add_option("--mesh", opts.mesh, "mesh override NxM");
        sub->add_option("--levels", opts.levels, "refinement levels");
        sub->add_flag("--force", opts.force, "overwrite existing artifacts");
        sub->add_option("--seed", opts.seed, "seed for randomized checks");
    };

    auto* oracle_cmd = app.add_subcommand("oracle", "dump the closed-form solution");
    oracle_cmd->add_option("--theta", theta, "coupling exponent");
    oracle_cmd->add_option("--R", R, "profile height");
    add_common(oracle_cmd, false);

    auto* solve_cmd = app.add_subcommand("solve", "solve the Lagrangian flow");
    add_common(solve_cmd, true);

    auto* transforms_cmd =
        app.add_subcommand("transforms", "radial chart and weak residuals");
    add_common(transforms_cmd, true);

    auto* report_cmd = app.add_subcommand("report", "regularity report");
    add_common(report_cmd, true);

    auto* convergence_cmd =
        app.add_subcommand("convergence", "oracle convergence study");
    convergence_cmd->add_option("--theta", theta, "coupling exponent");
    convergence_cmd->add_option("--R", R, "profile height");
    add_common(convergence_cmd, false);

    auto* validate_cmd = app.add_subcommand("validate", "check the hypotheses");
    add_common(validate_cmd, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(oracle_cmd)) return run_oracle(opts, theta, R);
        if (app.got_subcommand(solve_cmd)) return run_solve(opts);
        if (app.got_subcommand(transforms_cmd)) return run_transforms(opts);
        if (app.got_subcommand(report_cmd)) return run_report(opts);
        if (app.got_subcommand(convergence_cmd))
            return run_convergence(opts, theta, R);
        if (app.got_subcommand(validate_cmd)) return run_validate(opts);
    } catch (const NonconvergenceError& e) {
        std::cerr << "solver nonconvergence: " << e.what() << "\n";
        return kExitNonconvergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitIo;
}
