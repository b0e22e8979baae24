#include "mfgfb/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfgfb {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

bool in_window(double t, const Interval& J) {
    return t >= J.lo - 1e-14 && t <= J.hi + 1e-14;
}

int nearest_index(const std::vector<double>& v, double x) {
    int best = 0;
    for (std::size_t k = 1; k < v.size(); ++k)
        if (std::abs(v[k] - x) < std::abs(v[best] - x)) best = static_cast<int>(k);
    return best;
}

}  // namespace

BoundaryCurves free_boundary_curves(const FlowField& field) {
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    const double dt = field.mesh.dt();
    BoundaryCurves c;
    c.t = field.mesh.t_nodes;
    c.left.resize(nt);
    c.right.resize(nt);
    c.left_dd.assign(nt, kNaN);
    c.right_dd.assign(nt, kNaN);
    for (int n = 0; n < nt; ++n) {
        c.left[n] = field.at(n, 0);
        c.right[n] = field.at(n, ny - 1);
    }
    for (int n = 1; n + 1 < nt; ++n) {
        c.left_dd[n] = (c.left[n + 1] - 2.0 * c.left[n] + c.left[n - 1]) / (dt * dt);
        c.right_dd[n] = (c.right[n + 1] - 2.0 * c.right[n] + c.right[n - 1]) / (dt * dt);
    }
    return c;
}

AccelerationResidual acceleration_residual(const FlowField& field,
                                           const ProblemSpec& prob) {
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    const double dt = field.mesh.dt();
    const double expo = -(prob.coupling.theta + 1.0);
    const auto curves = free_boundary_curves(field);
    AccelerationResidual res;
    for (int n = 1; n + 1 < nt; ++n) {
        if (!in_window(field.mesh.t_nodes[n], prob.measurement_window)) continue;
        (void)dt;
        const double zl = std::pow(field.face_slope(n, 0), expo);
        const double zr = std::pow(field.face_slope(n, ny - 2), expo);
        const double rl = std::abs(curves.left_dd[n] - prob.initial.slope_left() * zl);
        const double rr = std::abs(curves.right_dd[n] - prob.initial.slope_right() * zr);
        res.left = std::max(res.left, rl);
        res.right = std::max(res.right, rr);
    }
    return res;
}

double mass_relation_residual(const FlowField& field, const ProblemSpec& prob,
                              const std::function<double(double, double)>& pressure) {
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    const double theta = prob.coupling.theta;
    const auto gy = field.gamma_y_nodes();
    double worst = 0.0;
    for (int n = 0; n < nt; ++n) {
        const double t = field.mesh.t_nodes[n];
        if (!in_window(t, prob.measurement_window)) continue;
        for (int i = 0; i < ny; ++i) {
            const double y = field.mesh.y_nodes[i];
            const double p = pressure(field.at(n, i), t);
            const double r = std::abs(prob.initial.value(y) -
                                      p * std::pow(gy[static_cast<std::size_t>(n) * ny + i], theta));
            worst = std::max(worst, r);
        }
    }
    return worst;
}

SliceEvaluator::SliceEvaluator(const FlowField& field, const ProblemSpec& prob,
                               int n)
    : theta_(prob.coupling.theta), prob_(&prob) {
    const int ny = field.mesh.ny();
    std::vector<double> x_row(ny), gt_row(ny);
    const auto gt = field.gamma_t_nodes();
    for (int i = 0; i < ny; ++i) {
        x_row[i] = field.at(n, i);
        gt_row[i] = gt[static_cast<std::size_t>(n) * ny + i];
    }
    gamma_left_ = x_row.front();
    gamma_right_ = x_row.back();
    gamma_of_y_ = num::Pchip(field.mesh.y_nodes, x_row);
    y_of_x_ = num::Pchip(x_row, field.mesh.y_nodes);
    gamma_t_of_y_ = num::Pchip(field.mesh.y_nodes, gt_row);
}

double SliceEvaluator::y_of_x(double x) const {
    return std::clamp(y_of_x_(x), 0.0, prob_->initial.b());
}

double SliceEvaluator::gamma_y(double y) const { return gamma_of_y_.derivative(y); }

double SliceEvaluator::pressure(double x) const {
    if (!inside(x)) return 0.0;
    const double y = y_of_x(x);
    return prob_->initial.value(y) * std::pow(gamma_y(y), -theta_);
}

double SliceEvaluator::u_x(double x) const {
    if (!inside(x)) return 0.0;
    return -gamma_t_of_y_(y_of_x(x));
}

EulerianField eulerian_reconstruct(const FlowField& field, const ProblemSpec& prob,
                                   int nx) {
    if (nx < 16) throw std::invalid_argument("eulerian_reconstruct: nx too small");
    const int nt = field.mesh.nt();
    const double inv_theta = 1.0 / prob.coupling.theta;

    EulerianField ef;
    ef.window = prob.measurement_window;
    ef.t_nodes = field.mesh.t_nodes;
    ef.gamma_L.resize(nt);
    ef.gamma_R.resize(nt);

    std::vector<SliceEvaluator> ev;
    ev.reserve(nt);
    double x_lo = std::numeric_limits<double>::max(), x_hi = -x_lo;
    for (int n = 0; n < nt; ++n) {
        ev.emplace_back(field, prob, n);
        ef.gamma_L[n] = ev.back().gamma_left();
        ef.gamma_R[n] = ev.back().gamma_right();
        x_lo = std::min(x_lo, ef.gamma_L[n]);
        x_hi = std::max(x_hi, ef.gamma_R[n]);
    }
    const double pad = 0.1 * (x_hi - x_lo);
    ef.x_nodes.resize(nx);
    for (int k = 0; k < nx; ++k)
        ef.x_nodes[k] = x_lo - pad + (x_hi - x_lo + 2.0 * pad) * k / (nx - 1);

    const std::size_t total = static_cast<std::size_t>(nt) * nx;
    ef.m.assign(total, 0.0);
    ef.p.assign(total, 0.0);
    ef.u_x.assign(total, 0.0);
    ef.u.assign(total, kNaN);
    ef.support_mask.assign(total, 0);
    for (int n = 0; n < nt; ++n)
        for (int k = 0; k < nx; ++k) {
            const double x = ef.x_nodes[k];
            if (!ev[n].inside(x)) continue;
            const std::size_t id = ef.idx(n, k);
            ef.support_mask[id] = 1;
            ef.p[id] = ev[n].pressure(x);
            ef.m[id] = std::pow(std::max(ef.p[id], 0.0), inv_theta);
            ef.u_x[id] = ev[n].u_x(x);
        }

    // Left-boundary charts at fixed offsets s from gamma_L(t).
    const double s_max =
        0.25 * *std::min_element(ef.gamma_R.begin(), ef.gamma_R.end()) -
        0.25 * *std::max_element(ef.gamma_L.begin(), ef.gamma_L.end());
    const int ns = 33;
    ef.s_nodes.resize(ns);
    ef.chart_Y.resize(static_cast<std::size_t>(nt) * ns);
    ef.chart_P.resize(static_cast<std::size_t>(nt) * ns);
    for (int j = 0; j < ns; ++j) ef.s_nodes[j] = s_max * j / (ns - 1);
    for (int n = 0; n < nt; ++n)
        for (int j = 0; j < ns; ++j) {
            const double x = ef.gamma_L[n] + ef.s_nodes[j];
            ef.chart_Y[static_cast<std::size_t>(n) * ns + j] = ev[n].y_of_x(x);
            ef.chart_P[static_cast<std::size_t>(n) * ns + j] = ev[n].pressure(x);
        }

    // u by path integration: anchor at the mid-support node of the slice
    // nearest the window midpoint, spread along that slice, then step in t
    // through -u_t = -(1/2 u_x^2 - p), filling horizontal gaps afterwards.
    const double t_mid = 0.5 * (ef.window.lo + ef.window.hi);
    const int nc = nearest_index(ef.t_nodes, t_mid);
    const int kc = nearest_index(ef.x_nodes, 0.5 * (ef.gamma_L[nc] + ef.gamma_R[nc]));
    if (!ef.support_mask[ef.idx(nc, kc)])
        throw std::runtime_error("eulerian_reconstruct: empty support at anchor");
    const double dx = ef.x_nodes[1] - ef.x_nodes[0];
    const double dt = field.mesh.dt();

    auto u_t = [&](std::size_t id) { return 0.5 * ef.u_x[id] * ef.u_x[id] - ef.p[id]; };
    auto fill_row = [&](int n) {
        for (int k = 1; k < nx; ++k) {
            const std::size_t id = ef.idx(n, k), idl = ef.idx(n, k - 1);
            if (ef.support_mask[id] && std::isnan(ef.u[id]) && !std::isnan(ef.u[idl]) &&
                ef.support_mask[idl])
                ef.u[id] = ef.u[idl] + 0.5 * (ef.u_x[idl] + ef.u_x[id]) * dx;
        }
        for (int k = nx - 2; k >= 0; --k) {
            const std::size_t id = ef.idx(n, k), idr = ef.idx(n, k + 1);
            if (ef.support_mask[id] && std::isnan(ef.u[id]) && !std::isnan(ef.u[idr]) &&
                ef.support_mask[idr])
                ef.u[id] = ef.u[idr] - 0.5 * (ef.u_x[idr] + ef.u_x[id]) * dx;
        }
    };
    auto step_row = [&](int from, int to) {
        const double sgn = to > from ? 1.0 : -1.0;
        for (int k = 0; k < nx; ++k) {
            const std::size_t a = ef.idx(from, k), b = ef.idx(to, k);
            if (ef.support_mask[a] && ef.support_mask[b] && !std::isnan(ef.u[a]))
                ef.u[b] = ef.u[a] + sgn * 0.5 * (u_t(a) + u_t(b)) * dt;
        }
        fill_row(to);
    };

    ef.u[ef.idx(nc, kc)] = 0.0;
    fill_row(nc);
    for (int n = nc + 1; n < nt; ++n) step_row(n - 1, n);
    for (int n = nc - 1; n >= 0; --n) step_row(n + 1, n);

    // Path-order check: reach a probe point t-first instead and compare.
    int np = nc;
    for (int n = 0; n < nt; ++n)
        if (ef.t_nodes[n] >= ef.window.lo) { np = n; break; }
    const int kp = nearest_index(ef.x_nodes, 0.5 * (ef.gamma_L[np] + ef.gamma_R[np]));
    bool ok = true;
    double alt = 0.0;
    const int dir = np >= nc ? 1 : -1;
    for (int n = nc; n != np; n += dir) {
        const std::size_t a = ef.idx(n, kc), b = ef.idx(n + dir, kc);
        if (!ef.support_mask[a] || !ef.support_mask[b]) { ok = false; break; }
        alt += dir * 0.5 * (u_t(a) + u_t(b)) * dt;
    }
    if (ok) {
        const int klo = std::min(kc, kp), khi = std::max(kc, kp);
        for (int k = klo; k < khi && ok; ++k) {
            const std::size_t a = ef.idx(np, k), b = ef.idx(np, k + 1);
            if (!ef.support_mask[a] || !ef.support_mask[b]) ok = false;
            else alt += 0.5 * (ef.u_x[a] + ef.u_x[b]) * dx * (kp >= kc ? 1.0 : -1.0);
        }
    }
    if (ok && !std::isnan(ef.u[ef.idx(np, kp)]))
        ef.mixed_path_discrepancy = std::abs(ef.u[ef.idx(np, kp)] - alt);
    return ef;
}

PdeResiduals pde_residuals(const EulerianField& ef, const CouplingParams& coupling,
                           bool include_collar) {
    (void)coupling;
    const int nx = static_cast<int>(ef.nx());
    const int nt = static_cast<int>(ef.t_nodes.size());
    if (nx < 5 || nt < 3) throw std::invalid_argument("pde_residuals: grid too small");
    const double dx = ef.x_nodes[1] - ef.x_nodes[0];
    const double dt = ef.t_nodes[1] - ef.t_nodes[0];
    const int guard = include_collar ? 1 : 3;  // cells to the nearest off-support node

    PdeResiduals res;
    for (int n = 1; n + 1 < nt; ++n) {
        if (!in_window(ef.t_nodes[n], ef.window)) continue;
        for (int k = guard; k + guard < nx; ++k) {
            bool usable = ef.support_mask[ef.idx(n - 1, k)] &&
                          ef.support_mask[ef.idx(n + 1, k)];
            for (int j = k - guard; j <= k + guard && usable; ++j)
                usable = ef.support_mask[ef.idx(n, j)];
            if (!usable) continue;
            const std::size_t id = ef.idx(n, k);
            const double ut = (ef.u[ef.idx(n + 1, k)] - ef.u[ef.idx(n - 1, k)]) / (2 * dt);
            const double ux = (ef.u[ef.idx(n, k + 1)] - ef.u[ef.idx(n, k - 1)]) / (2 * dx);
            if (!std::isnan(ut) && !std::isnan(ux))
                res.hj = std::max(res.hj, std::abs(-ut + 0.5 * ux * ux - ef.p[id]));
            const double mt = (ef.m[ef.idx(n + 1, k)] - ef.m[ef.idx(n - 1, k)]) / (2 * dt);
            const double fr = ef.m[ef.idx(n, k + 1)] * ef.u_x[ef.idx(n, k + 1)];
            const double fl = ef.m[ef.idx(n, k - 1)] * ef.u_x[ef.idx(n, k - 1)];
            res.continuity = std::max(res.continuity, std::abs(mt - (fr - fl) / (2 * dx)));
        }
    }
    return res;
}

RateFit holder_exponent(const std::vector<double>& distances,
                        const std::vector<double>& increments, double target,
                        double band) {
    if (distances.size() != increments.size())
        throw std::invalid_argument("holder_exponent: size mismatch");
    RateFit fit;
    fit.target = target;
    fit.band = band;
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < distances.size(); ++k) {
        if (distances[k] > 0 && increments[k] > 0) {
            lx.push_back(std::log(distances[k]));
            ly.push_back(std::log(increments[k]));
            fit.offsets.push_back(distances[k]);
        } else {
            ++fit.dropped;
        }
    }
    if (lx.size() < 3) {
        fit.flagged_low_r2 = true;
        return fit;
    }
    const auto lf = num::fit_line(lx, ly);
    fit.exponent = lf.slope;
    fit.intercept = lf.intercept;
    fit.r_squared = lf.r_squared;
    fit.within_band = std::abs(fit.exponent - target) <= band;
    fit.flagged_low_r2 = lf.r_squared < 0.98;
    return fit;
}

RateFit pressure_vanishing_fit(const FlowField& field, const ProblemSpec& prob,
                               int n_slice, BoundarySide side) {
    const int ny = field.mesh.ny();
    SliceEvaluator ev(field, prob, n_slice);
    const double width = ev.gamma_right() - ev.gamma_left();
    const double h_loc = side == BoundarySide::Left
                             ? field.at(n_slice, 1) - field.at(n_slice, 0)
                             : field.at(n_slice, ny - 1) - field.at(n_slice, ny - 2);
    std::vector<double> dist, inc;
    for (double s = width / 8.0; s >= 4.0 * h_loc && dist.size() < 14; s *= 0.5) {
        const double x = side == BoundarySide::Left ? ev.gamma_left() + s
                                                    : ev.gamma_right() - s;
        dist.push_back(s);
        inc.push_back(ev.pressure(x));
    }
    return holder_exponent(dist, inc, 1.0, 0.15);
}

RateFit value_gradient_fit(const SelfSimilarSolution& s, double t, int n_offsets) {
    const double xs = s.support_halfwidth(t);
    const double ux_edge = s.u_x(xs, t);
    std::vector<double> dist, inc;
    double off = 0.1 * xs;
    for (int k = 0; k < n_offsets; ++k, off *= 0.5) {
        dist.push_back(off);
        inc.push_back(std::abs(s.u_x(xs + off, t) - ux_edge));
    }
    return holder_exponent(dist, inc, 0.5, 0.1);
}

RateFit effective_dimension_fit(const RadialChart& chart, double lo_frac,
                                double hi_frac, int n_samples) {
    std::vector<double> dist, inc;
    const double llo = std::log(chart.r0 * lo_frac), lhi = std::log(chart.r0 * hi_frac);
    for (int k = 0; k < n_samples; ++k) {
        const double r = std::exp(llo + (lhi - llo) * k / (n_samples - 1));
        dist.push_back(r);
        inc.push_back(chart.w_fn(r));
    }
    return holder_exponent(dist, inc, chart.N - 1.0, 0.1);
}

double OracleProblem::exact_gamma(double y, double t_local) const {
    return shift + (y - shift) * std::pow((t_base + t_local) / t_base, oracle.nu());
}

double OracleProblem::exact_pressure(double x, double t_local) const {
    return oracle.pressure(x - shift, t_base + t_local);
}

double OracleProblem::exact_u_x(double x, double t_local) const {
    return oracle.u_x(x - shift, t_base + t_local);
}

OracleProblem make_barenblatt_planning_problem(double theta, double R,
                                               double t_base, double t_end) {
    if (!(t_end > t_base) || !(t_base > 0))
        throw std::invalid_argument("make_barenblatt_planning_problem: need 0 < t_base < t_end");
    SelfSimilarSolution oracle(theta, R);
    const double shift = oracle.support_halfwidth(t_base);
    InitialPressure initial{barenblatt_profile(theta, R, t_base)};
    PressureProfile term = barenblatt_profile(theta, R, t_end)
                               .shifted(shift - oracle.support_halfwidth(t_end));
    auto spec = ProblemSpec::make(theta, initial,
                                  TerminalSpec::planning(TerminalProfile{term}),
                                  t_end - t_base);
    return OracleProblem{std::move(spec), oracle, shift, t_base};
}

ConvergenceTable convergence_study(const OracleProblem& op,
                                   const std::vector<int>& levels,
                                   const SolverConfig& cfg, Grading grading) {
    if (levels.empty())
        throw std::invalid_argument("convergence_study: need at least one level");
    const double b = op.spec.initial.b();
    const double T = op.spec.horizon;

    ConvergenceTable table;
    for (int n : levels) {
        const Mesh mesh = Mesh::make(b, T, n, n, grading);
        ConvergenceTrace trace;
        const FlowField field =
            newton_solve(op.spec, cfg, default_initial_guess(op.spec, mesh), &trace);
        const auto gt = field.gamma_t_nodes();

        ConvergenceRow row;
        row.n = n;
        row.newton_iters = trace.iterations;
        double sq = 0.0;
        const int ny = mesh.ny(), nt = mesh.nt();
        for (int k = 0; k < nt; ++k) {
            const double t = mesh.t_nodes[k];
            const bool measured = in_window(t, op.spec.measurement_window);
            SliceEvaluator ev(field, op.spec, k);
            for (int i = 0; i < ny; ++i) {
                const double g = field.at(k, i);
                const double e = std::abs(g - op.exact_gamma(mesh.y_nodes[i], t));
                row.err_gamma_inf = std::max(row.err_gamma_inf, e);
                sq += e * e;
                if (!measured) continue;
                row.err_p_inf = std::max(
                    row.err_p_inf, std::abs(ev.pressure(g) - op.exact_pressure(g, t)));
                row.err_ux_inf = std::max(
                    row.err_ux_inf,
                    std::abs(-gt[static_cast<std::size_t>(k) * ny + i] -
                             op.exact_u_x(g, t)));
            }
        }
        row.err_gamma_l2 = std::sqrt(sq / (static_cast<double>(ny) * nt));
        table.rows.push_back(row);
    }
    for (std::size_t k = 0; k + 1 < table.rows.size(); ++k)
        table.orders_gamma.push_back(
            std::log2(table.rows[k].err_gamma_inf / table.rows[k + 1].err_gamma_inf));
    return table;
}

RegularityReport build_report(const FlowField& field, const ProblemSpec& prob) {
    RegularityReport rep;
    rep.curves = free_boundary_curves(field);
    rep.accel = acceleration_residual(field, prob);

    const int nt = field.mesh.nt(), ny = field.mesh.ny();
    std::vector<SliceEvaluator> ev;
    ev.reserve(nt);
    for (int n = 0; n < nt; ++n) ev.emplace_back(field, prob, n);
    auto pressure = [&](double x, double t) {
        return ev[nearest_index(field.mesh.t_nodes, t)].pressure(x);
    };
    rep.mass_relation = mass_relation_residual(field, prob, pressure);

    const auto efield = eulerian_reconstruct(field, prob, std::max(4 * ny, 128));
    rep.pde = pde_residuals(efield, prob.coupling);

    const double t_mid =
        0.5 * (prob.measurement_window.lo + prob.measurement_window.hi);
    const int nc = nearest_index(field.mesh.t_nodes, t_mid);
    rep.pressure_rate_left = pressure_vanishing_fit(field, prob, nc, BoundarySide::Left);
    rep.pressure_rate_right = pressure_vanishing_fit(field, prob, nc, BoundarySide::Right);

    const double r0 = 2.0 * std::sqrt(0.2 * prob.initial.b());
    rep.effective_dim =
        effective_dimension_fit(build_radial_chart(prob.initial, prob.coupling, r0));

    const auto gy = field.gamma_y_nodes();
    rep.gamma_y_min = std::numeric_limits<double>::max();
    rep.gamma_y_max = 0.0;
    for (int n = 0; n < nt; ++n) {
        if (!in_window(field.mesh.t_nodes[n], prob.measurement_window)) continue;
        for (int i = 0; i < ny; ++i) {
            const double g = gy[static_cast<std::size_t>(n) * ny + i];
            rep.gamma_y_min = std::min(rep.gamma_y_min, g);
            rep.gamma_y_max = std::max(rep.gamma_y_max, g);
        }
    }
    return rep;
}

}  // namespace mfgfb
