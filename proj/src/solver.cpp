#include "mfgfb/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mfgfb {

Mesh Mesh::make(double b, double T, int ny, int nt, Grading grading) {
    if (ny < 17 || nt < 17)
        throw std::invalid_argument("Mesh: need >= 17 nodes per axis");
    if (!(b > 0) || !(T > 0)) throw std::invalid_argument("Mesh: b, T must be > 0");
    Mesh m;
    m.grading = grading;
    m.y_nodes.resize(ny);
    m.t_nodes.resize(nt);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < ny; ++i) {
        const double xi = static_cast<double>(i) / (ny - 1);
        if (grading == Grading::Uniform) {
            m.y_nodes[i] = b * xi;
        } else {
            // sin^2 map: quadratic near both endpoints, i.e. uniform in the
            // square-root distance chart r = 2 sqrt(y) there.
            const double s = std::sin(0.5 * pi * xi);
            m.y_nodes[i] = b * s * s;
        }
    }
    m.y_nodes.front() = 0.0;
    m.y_nodes.back() = b;
    for (int n = 0; n < nt; ++n)
        m.t_nodes[n] = T * static_cast<double>(n) / (nt - 1);
    return m;
}

double FlowField::face_slope(int n, int i) const {
    return (at(n, i + 1) - at(n, i)) / (mesh.y_nodes[i + 1] - mesh.y_nodes[i]);
}

double FlowField::min_face_slope() const {
    double m = std::numeric_limits<double>::infinity();
    for (int n = 0; n < mesh.nt(); ++n)
        for (int i = 0; i + 1 < mesh.ny(); ++i) m = std::min(m, face_slope(n, i));
    return m;
}

std::vector<double> FlowField::gamma_y_nodes() const {
    const int ny = mesh.ny(), nt = mesh.nt();
    std::vector<double> gy(gamma.size());
    for (int n = 0; n < nt; ++n) {
        gy[static_cast<std::size_t>(n) * ny] = face_slope(n, 0);
        for (int i = 1; i + 1 < ny; ++i)
            gy[static_cast<std::size_t>(n) * ny + i] =
                (at(n, i + 1) - at(n, i - 1)) /
                (mesh.y_nodes[i + 1] - mesh.y_nodes[i - 1]);
        gy[static_cast<std::size_t>(n) * ny + ny - 1] = face_slope(n, ny - 2);
    }
    return gy;
}

std::vector<double> FlowField::gamma_t_nodes() const {
    const int ny = mesh.ny(), nt = mesh.nt();
    const double dt = mesh.dt();
    std::vector<double> gt(gamma.size());
    for (int i = 0; i < ny; ++i) {
        gt[i] = (-3.0 * at(0, i) + 4.0 * at(1, i) - at(2, i)) / (2.0 * dt);
        for (int n = 1; n + 1 < nt; ++n)
            gt[static_cast<std::size_t>(n) * ny + i] =
                (at(n + 1, i) - at(n - 1, i)) / (2.0 * dt);
        gt[static_cast<std::size_t>(nt - 1) * ny + i] =
            (3.0 * at(nt - 1, i) - 4.0 * at(nt - 2, i) + at(nt - 3, i)) /
            (2.0 * dt);
    }
    return gt;
}

std::vector<double> FlowField::z_nodes(double theta) const {
    auto gy = gamma_y_nodes();
    for (auto& v : gy) v = std::pow(v, -(theta + 1.0));
    return gy;
}

FlowField FlowField::identity(Mesh mesh) {
    FlowField f;
    f.mesh = std::move(mesh);
    f.gamma.resize(static_cast<std::size_t>(f.mesh.ny()) * f.mesh.nt());
    for (int n = 0; n < f.mesh.nt(); ++n)
        for (int i = 0; i < f.mesh.ny(); ++i) f.at(n, i) = f.mesh.y_nodes[i];
    return f;
}

namespace {

struct Stencil {
    // Sampled problem data on the mesh.
    std::vector<double> p0, dp0;
    double theta = 1.0, c_theta = 0.5;
    double slope_left = 0.0, slope_right = 0.0;
};

Stencil sample_problem(const ProblemSpec& prob, const Mesh& mesh) {
    Stencil s;
    s.theta = prob.coupling.theta;
    s.c_theta = prob.coupling.c_theta;
    s.slope_left = prob.initial.slope_left();
    s.slope_right = prob.initial.slope_right();
    const int ny = mesh.ny();
    s.p0.resize(ny);
    s.dp0.resize(ny);
    for (int i = 0; i < ny; ++i) {
        s.p0[i] = prob.initial.value(mesh.y_nodes[i]);
        s.dp0[i] = prob.initial.slope(mesh.y_nodes[i]);
    }
    s.p0.front() = 0.0;
    s.p0.back() = 0.0;
    return s;
}

void check_monotone(const FlowField& field) {
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    for (int n = 0; n < nt; ++n)
        for (int i = 0; i + 1 < ny; ++i)
            if (!(field.face_slope(n, i) > 0.0)) {
                std::ostringstream os;
                os << "flow field not monotone at cell (t=" << n << ", y=" << i
                   << "): face slope " << field.face_slope(n, i);
                throw std::runtime_error(os.str());
            }
}

// Spatial operator p0' Z + c_theta p0 Z_y at node i of slice n, with Z on
// faces; at the endpoints the p0 Z_y term is dropped and the one-sided face
// supplies Z.
double spatial_op(const FlowField& f, const Stencil& s, int n, int i) {
    const auto& y = f.mesh.y_nodes;
    const int ny = f.mesh.ny();
    auto z_face = [&](int j) {
        return std::pow(f.face_slope(n, j), -(s.theta + 1.0));
    };
    if (i == 0) return s.slope_left * z_face(0);
    if (i == ny - 1) return s.slope_right * z_face(ny - 2);
    const double zl = z_face(i - 1), zr = z_face(i);
    const double dyc = 0.5 * (y[i + 1] - y[i - 1]);
    return s.dp0[i] * 0.5 * (zl + zr) + s.c_theta * s.p0[i] * (zr - zl) / dyc;
}

// d(spatial_op)/d(gamma_{j,n}) for j in {i-1,i,i+1}; returns the three
// coefficients (left, center, right).
void spatial_op_jac(const FlowField& f, const Stencil& s, int n, int i,
                    double out[3]) {
    const auto& y = f.mesh.y_nodes;
    const int ny = f.mesh.ny();
    auto dz_face = [&](int j) {
        // dZ/d(slope) / dy: Z = slope^{-(theta+1)}
        const double g = f.face_slope(n, j);
        const double dy = y[j + 1] - y[j];
        return -(s.theta + 1.0) * std::pow(g, -(s.theta + 2.0)) / dy;
    };
    out[0] = out[1] = out[2] = 0.0;
    if (i == 0) {
        const double d = dz_face(0);  // dZf0/dgamma1 = d, /dgamma0 = -d
        out[1] = s.slope_left * (-d);
        out[2] = s.slope_left * d;
        return;
    }
    if (i == ny - 1) {
        const double d = dz_face(ny - 2);
        out[0] = s.slope_right * (-d);
        out[1] = s.slope_right * d;
        return;
    }
    const double dyc = 0.5 * (y[i + 1] - y[i - 1]);
    const double cl = s.dp0[i] * 0.5 - s.c_theta * s.p0[i] / dyc;  // dS/dZl
    const double cr = s.dp0[i] * 0.5 + s.c_theta * s.p0[i] / dyc;  // dS/dZr
    const double dl = dz_face(i - 1), dr = dz_face(i);
    // Zl depends on gamma_{i-1} (-dl) and gamma_i (+dl);
    // Zr depends on gamma_i (-dr) and gamma_{i+1} (+dr).
    out[0] = cl * (-dl);
    out[1] = cl * dl + cr * (-dr);
    out[2] = cr * dr;
}

}  // namespace

std::vector<double> planning_target(const ProblemSpec& prob, const Mesh& mesh) {
    if (prob.terminal.kind != TerminalKind::Planning)
        throw std::invalid_argument("planning_target: not a planning problem");
    TransportMap map(prob.initial.profile(),
                     prob.terminal.terminal_pressure->profile,
                     prob.coupling.theta);
    std::vector<double> target(mesh.ny());
    for (int i = 0; i < mesh.ny(); ++i) target[i] = map(mesh.y_nodes[i]);
    for (int i = 1; i < mesh.ny(); ++i)
        if (!(target[i] > target[i - 1]))
            throw std::invalid_argument("planning_target: map not strictly monotone");
    return target;
}

std::vector<double> assemble_residual(const FlowField& field,
                                      const ProblemSpec& prob) {
    check_monotone(field);
    const Mesh& mesh = field.mesh;
    const int ny = mesh.ny(), nt = mesh.nt();
    const double dt = mesh.dt();
    const Stencil s = sample_problem(prob, mesh);

    std::vector<double> r(field.gamma.size());
    for (int i = 0; i < ny; ++i) r[i] = field.at(0, i) - mesh.y_nodes[i];

    for (int n = 1; n + 1 < nt; ++n)
        for (int i = 0; i < ny; ++i) {
            const double gtt =
                (field.at(n - 1, i) - 2.0 * field.at(n, i) + field.at(n + 1, i)) /
                (dt * dt);
            r[static_cast<std::size_t>(n) * ny + i] = gtt - spatial_op(field, s, n, i);
        }

    const std::size_t last = static_cast<std::size_t>(nt - 1) * ny;
    if (prob.terminal.kind == TerminalKind::Planning) {
        auto target = planning_target(prob, mesh);
        for (int i = 0; i < ny; ++i)
            r[last + i] = field.at(nt - 1, i) - target[i];
    } else {
        // gamma_t(y,T) + c1 [p0' Z + c_theta p0 Z_y](y,T) = 0, one-sided
        // second-order stencil in time.
        for (int i = 0; i < ny; ++i) {
            const double gt = (3.0 * field.at(nt - 1, i) - 4.0 * field.at(nt - 2, i) +
                               field.at(nt - 3, i)) /
                              (2.0 * dt);
            r[last + i] = gt + prob.terminal.c1 * spatial_op(field, s, nt - 1, i);
        }
    }
    return r;
}

num::BandedMatrix assemble_jacobian(const FlowField& field,
                                    const ProblemSpec& prob) {
    check_monotone(field);
    const Mesh& mesh = field.mesh;
    const int ny = mesh.ny(), nt = mesh.nt();
    const double dt = mesh.dt();
    const Stencil s = sample_problem(prob, mesh);
    const bool cost = prob.terminal.kind == TerminalKind::TerminalCost;

    const int kl = cost ? 2 * ny : ny;
    num::BandedMatrix J(ny * nt, kl, ny);
    auto idx = [ny](int n, int i) { return n * ny + i; };

    for (int i = 0; i < ny; ++i) J.add(idx(0, i), idx(0, i), 1.0);

    double dS[3];
    for (int n = 1; n + 1 < nt; ++n)
        for (int i = 0; i < ny; ++i) {
            const int row = idx(n, i);
            J.add(row, idx(n - 1, i), 1.0 / (dt * dt));
            J.add(row, idx(n, i), -2.0 / (dt * dt));
            J.add(row, idx(n + 1, i), 1.0 / (dt * dt));
            spatial_op_jac(field, s, n, i, dS);
            if (i > 0) J.add(row, idx(n, i - 1), -dS[0]);
            J.add(row, idx(n, i), -dS[1]);
            if (i + 1 < ny) J.add(row, idx(n, i + 1), -dS[2]);
        }

    if (!cost) {
        for (int i = 0; i < ny; ++i)
            J.add(idx(nt - 1, i), idx(nt - 1, i), 1.0);
    } else {
        for (int i = 0; i < ny; ++i) {
            const int row = idx(nt - 1, i);
            J.add(row, idx(nt - 1, i), 1.5 / dt);
            J.add(row, idx(nt - 2, i), -2.0 / dt);
            J.add(row, idx(nt - 3, i), 0.5 / dt);
            spatial_op_jac(field, s, nt - 1, i, dS);
            if (i > 0) J.add(row, idx(nt - 1, i - 1), prob.terminal.c1 * dS[0]);
            J.add(row, idx(nt - 1, i), prob.terminal.c1 * dS[1]);
            if (i + 1 < ny) J.add(row, idx(nt - 1, i + 1), prob.terminal.c1 * dS[2]);
        }
    }
    return J;
}

FlowField default_initial_guess(const ProblemSpec& prob, const Mesh& mesh) {
    FlowField f = FlowField::identity(mesh);
    if (prob.terminal.kind == TerminalKind::Planning) {
        auto target = planning_target(prob, mesh);
        const double T = mesh.T();
        for (int n = 0; n < mesh.nt(); ++n) {
            const double a = mesh.t_nodes[n] / T;
            for (int i = 0; i < mesh.ny(); ++i)
                f.at(n, i) = (1.0 - a) * mesh.y_nodes[i] + a * target[i];
        }
    }
    return f;
}

double residual_inf_norm(const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
}

FlowField newton_solve(const ProblemSpec& prob, const SolverConfig& cfg,
                       FlowField initial_guess, ConvergenceTrace* trace_out) {
    if (!(cfg.newton_tol > 0) || !(cfg.barrier_floor > 0))
        throw std::invalid_argument("newton_solve: bad config");
    FlowField field = std::move(initial_guess);
    if (field.min_face_slope() < cfg.barrier_floor)
        throw std::invalid_argument("newton_solve: initial guess violates barrier");

    ConvergenceTrace trace;
    auto r = assemble_residual(field, prob);
    double norm = residual_inf_norm(r);
    trace.residual_norms.push_back(norm);

    for (int it = 0; it < cfg.max_iters; ++it) {
        if (norm <= cfg.newton_tol) {
            trace.iterations = it;
            if (trace_out) *trace_out = trace;
            return field;
        }
        auto J = assemble_jacobian(field, prob);
        auto delta = J.solve(r);

        double alpha = cfg.initial_step;
        FlowField trial = field;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            for (std::size_t k = 0; k < field.gamma.size(); ++k)
                trial.gamma[k] = field.gamma[k] - alpha * delta[k];
            if (trial.min_face_slope() >= cfg.barrier_floor) {
                auto r_trial = assemble_residual(trial, prob);
                const double n_trial = residual_inf_norm(r_trial);
                if (n_trial < norm) {
                    field = std::move(trial);
                    r = std::move(r_trial);
                    norm = n_trial;
                    accepted = true;
                    break;
                }
                trial = field;  // restore shape for the next attempt
            }
            alpha *= cfg.backtrack_ratio;
        }
        if (!accepted) {
            trace.iterations = it + 1;
            throw NonconvergenceError(
                "newton_solve: backtracking failed (barrier or no decrease)",
                trace);
        }
        trace.residual_norms.push_back(norm);
    }
    if (norm <= cfg.newton_tol) {
        trace.iterations = cfg.max_iters;
        if (trace_out) *trace_out = trace;
        return field;
    }
    trace.iterations = cfg.max_iters;
    throw NonconvergenceError("newton_solve: max_iters exceeded", trace);
}

namespace {

FlowField prolong(const FlowField& coarse, const Mesh& fine) {
    // Bilinear interpolation in physical (y,t).
    const Mesh& cm = coarse.mesh;
    FlowField f;
    f.mesh = fine;
    f.gamma.resize(static_cast<std::size_t>(fine.ny()) * fine.nt());
    auto bracket = [](const std::vector<double>& v, double x) {
        auto it = std::upper_bound(v.begin(), v.end(), x);
        std::size_t j = static_cast<std::size_t>(it - v.begin());
        if (j == 0) j = 1;
        if (j >= v.size()) j = v.size() - 1;
        return j - 1;
    };
    for (int n = 0; n < fine.nt(); ++n) {
        const double t = fine.t_nodes[n];
        const std::size_t m = bracket(cm.t_nodes, t);
        const double wt =
            (t - cm.t_nodes[m]) / (cm.t_nodes[m + 1] - cm.t_nodes[m]);
        for (int i = 0; i < fine.ny(); ++i) {
            const double y = fine.y_nodes[i];
            const std::size_t j = bracket(cm.y_nodes, y);
            const double wy =
                (y - cm.y_nodes[j]) / (cm.y_nodes[j + 1] - cm.y_nodes[j]);
            const double lo = (1 - wy) * coarse.at(static_cast<int>(m), static_cast<int>(j)) +
                              wy * coarse.at(static_cast<int>(m), static_cast<int>(j + 1));
            const double hi = (1 - wy) * coarse.at(static_cast<int>(m + 1), static_cast<int>(j)) +
                              wy * coarse.at(static_cast<int>(m + 1), static_cast<int>(j + 1));
            f.at(n, i) = (1 - wt) * lo + wt * hi;
        }
    }
    return f;
}

}  // namespace

FlowField continuation_solve(const ProblemSpec& prob, const SolverConfig& cfg,
                             const Mesh& fine) {
    const int levels = std::max(cfg.continuation_levels, 1);
    const int halvings = levels - 1;
    const int step = 1 << halvings;
    if ((fine.ny() - 1) % step != 0 || (fine.nt() - 1) % step != 0)
        throw std::invalid_argument(
            "continuation_solve: mesh not coarsenable through the levels");
    if ((fine.ny() - 1) / step < 16 || (fine.nt() - 1) / step < 16)
        throw std::invalid_argument("continuation_solve: coarsest level too small");

    FlowField field;
    for (int lvl = 0; lvl < levels; ++lvl) {
        const int div = 1 << (halvings - lvl);
        Mesh m = Mesh::make(fine.b(), fine.T(), (fine.ny() - 1) / div + 1,
                            (fine.nt() - 1) / div + 1, fine.grading);
        FlowField guess =
            lvl == 0 ? default_initial_guess(prob, m) : prolong(field, m);
        try {
            field = newton_solve(prob, cfg, std::move(guess));
        } catch (NonconvergenceError& e) {
            throw NonconvergenceError(std::string(e.what()) + " at level " +
                                          std::to_string(lvl),
                                      e.trace, lvl);
        }
    }
    return field;
}

}  // namespace mfgfb
