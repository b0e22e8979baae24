#include "mfgfb/transforms.hpp"

#include <cmath>
#include <stdexcept>

namespace mfgfb {

std::vector<double> compute_Z(const FlowField& field, double theta) {
    if (field.min_face_slope() <= 0.0)
        throw std::runtime_error("compute_Z: field not monotone");
    return field.z_nodes(theta);
}

std::vector<double> compute_V(const FlowField& field, double theta) {
    auto Z = compute_Z(field, theta);
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    const auto& y = field.mesh.y_nodes;
    std::vector<double> V(Z.size());
    for (int n = 0; n < nt; ++n) {
        const std::size_t off = static_cast<std::size_t>(n) * ny;
        V[off] = (Z[off + 1] - Z[off]) / (y[1] - y[0]);
        for (int i = 1; i + 1 < ny; ++i)
            V[off + i] = (Z[off + i + 1] - Z[off + i - 1]) / (y[i + 1] - y[i - 1]);
        V[off + ny - 1] = (Z[off + ny - 1] - Z[off + ny - 2]) / (y[ny - 1] - y[ny - 2]);
    }
    return V;
}

RadialChart build_radial_chart(const InitialPressure& p,
                               const CouplingParams& coupling, double r0,
                               int n_nodes) {
    if (!(r0 > 0) || r0 * r0 / 4.0 >= 0.5 * p.b())
        throw std::domain_error(
            "build_radial_chart: r0^2/4 must stay in the left half of the support");
    if (n_nodes < 8) throw std::invalid_argument("build_radial_chart: too few nodes");

    RadialChart c;
    c.r0 = r0;
    c.N = coupling.effective_dim;
    c.theta = coupling.theta;
    c.c_theta = coupling.c_theta;
    c.second_is_smoothed = p.profile().second_is_smoothed();

    const double inv_ct = 1.0 / coupling.c_theta;
    const double ct = coupling.c_theta;
    const InitialPressure prof = p;  // captured by value; profiles are immutable
    c.w_fn = [prof, inv_ct](double r) {
        const double y = r * r / 4.0;
        return 0.5 * r * std::pow(std::max(prof.value(y), 0.0), inv_ct);
    };
    c.a_fn = [prof, ct](double r) { return ct * prof.h_left(r * r / 4.0); };
    const bool has_second = p.has_second();
    c.d_fn = [prof, has_second](double r) {
        const double y = r * r / 4.0;
        if (has_second) return prof.second(y);
        const double h = 1e-5 * std::max(prof.b(), 1.0);
        return (prof.slope(y + h) - prof.slope(std::max(y - h, 0.0))) /
               (y + h - std::max(y - h, 0.0));
    };

    c.r_nodes.resize(n_nodes);
    c.W.resize(n_nodes);
    c.A.resize(n_nodes);
    c.D.resize(n_nodes);
    c.omega0.resize(n_nodes);
    const double inv_norm = 1.0 / (2.0 * std::pow(4.0, inv_ct));
    for (int j = 0; j < n_nodes; ++j) {
        const double r = r0 * static_cast<double>(j) / (n_nodes - 1);
        c.r_nodes[j] = r;
        c.W[j] = c.w_fn(r);
        c.A[j] = c.a_fn(r);
        c.D[j] = c.d_fn(r);
        // omega0 = W / r^{N-1} = h(r^2/4)^{1/c_theta} / (2 * 4^{1/c_theta}),
        // evaluated through h to stay finite at the axis.
        c.omega0[j] = std::pow(prof.h_left(r * r / 4.0), inv_ct) * inv_norm;
    }
    return c;
}

RadialGridField z_tilde_from_field(const FlowField& field, double theta,
                                   double r0) {
    const auto Z = field.z_nodes(theta);
    const int ny = field.mesh.ny(), nt = field.mesh.nt();
    RadialGridField g;
    g.t_nodes = field.mesh.t_nodes;
    std::vector<int> keep;
    for (int i = 0; i < ny; ++i) {
        const double r = 2.0 * std::sqrt(field.mesh.y_nodes[i]);
        if (r <= r0 * (1.0 + 1e-12)) {
            g.r_nodes.push_back(r);
            keep.push_back(i);
        }
    }
    if (g.r_nodes.size() < 4)
        throw std::invalid_argument("z_tilde_from_field: too few nodes below r0");
    g.values.resize(g.r_nodes.size() * g.t_nodes.size());
    for (int n = 0; n < nt; ++n)
        for (std::size_t j = 0; j < keep.size(); ++j)
            g.values[n * g.r_nodes.size() + j] =
                Z[static_cast<std::size_t>(n) * ny + keep[j]];
    return g;
}

RadialTestFunction axis_touching_test(double r0, double t_lo, double t_hi) {
    const double pi = 3.14159265358979323846;
    const double len = t_hi - t_lo;
    auto tfac = [=](double t) {
        if (t <= t_lo || t >= t_hi) return 0.0;
        const double s = std::sin(pi * (t - t_lo) / len);
        return s * s;
    };
    auto tfac_d = [=](double t) {
        if (t <= t_lo || t >= t_hi) return 0.0;
        const double a = pi * (t - t_lo) / len;
        return 2.0 * std::sin(a) * std::cos(a) * pi / len;
    };
    RadialTestFunction f;
    f.phi = [=](double r, double t) {
        return std::cos(0.5 * pi * r / r0) * tfac(t);
    };
    f.phi_r = [=](double r, double t) {
        return -0.5 * pi / r0 * std::sin(0.5 * pi * r / r0) * tfac(t);
    };
    f.phi_t = [=](double r, double t) {
        return std::cos(0.5 * pi * r / r0) * tfac_d(t);
    };
    return f;
}

double weighted_weak_residual(const RadialChart& chart,
                              const RadialGridField& ztilde,
                              const RadialTestFunction& test) {
    const auto& r = ztilde.r_nodes;
    const auto& t = ztilde.t_nodes;
    if (r.size() < 2 || t.size() < 2)
        throw std::invalid_argument("weighted_weak_residual: degenerate grid");

    // Admissibility: the test must vanish at r = r0 and at the field's first
    // and last time slices.
    const double r_end = r.back();
    const double t_mid = 0.5 * (t.front() + t.back());
    const double scale = 1.0 + std::abs(test.phi(0.5 * r_end, t_mid));
    if (std::abs(test.phi(r_end, t_mid)) > 1e-10 * scale ||
        std::abs(test.phi(0.5 * r_end, t.front())) > 1e-10 * scale ||
        std::abs(test.phi(0.5 * r_end, t.back())) > 1e-10 * scale)
        throw std::invalid_argument(
            "weighted_weak_residual: test must vanish at r=r0 and the time ends");

    const double beta_exp = -1.0 - 1.0 / (chart.theta + 1.0);
    const double beta_fac = 1.0 / (chart.theta + 1.0);

    double total = 0.0;
    for (std::size_t n = 0; n + 1 < t.size(); ++n) {
        const double dt = t[n + 1] - t[n];
        const double tc = 0.5 * (t[n] + t[n + 1]);
        for (std::size_t j = 0; j + 1 < r.size(); ++j) {
            const double dr = r[j + 1] - r[j];
            const double rc = 0.5 * (r[j] + r[j + 1]);
            const double z00 = ztilde.at(n, j), z01 = ztilde.at(n, j + 1);
            const double z10 = ztilde.at(n + 1, j), z11 = ztilde.at(n + 1, j + 1);
            const double zc = 0.25 * (z00 + z01 + z10 + z11);
            const double zt = (0.5 * (z10 + z11) - 0.5 * (z00 + z01)) / dt;
            const double zr = (0.5 * (z01 + z11) - 0.5 * (z00 + z10)) / dr;
            const double beta = beta_fac * std::pow(zc, beta_exp);
            const double W = chart.w_fn(rc);
            const double integrand = beta * zt * test.phi_t(rc, tc) +
                                     chart.a_fn(rc) * zr * test.phi_r(rc, tc) -
                                     chart.d_fn(rc) * zc * test.phi(rc, tc);
            total += W * integrand * dr * dt;
        }
    }
    return total;
}

RegularSingularODE ode_from_problem(const InitialPressure& p,
                                    const CouplingParams& coupling, double rho,
                                    std::function<double(double)> forcing) {
    const double ct = coupling.c_theta;
    const InitialPressure prof = p;
    RegularSingularODE ode;
    ode.rho = rho;
    ode.forcing = std::move(forcing);
    ode.b_coeff = [prof, ct](double y) {
        return (1.0 + ct) * prof.slope(y) / (ct * prof.h_left(y));
    };
    return ode;
}

double mu_integrating_factor(const RegularSingularODE& ode, double y) {
    if (y == 0.0) return 1.0;
    if (!(y > 0)) throw std::domain_error("mu_integrating_factor: y >= 0 required");
    const double b0 = ode.b_coeff(0.0);
    auto g = [&](double s) { return (ode.b_coeff(s) - b0) / s; };

    // Integrability probe: (b(s)-b(0))/s must not grow like s^{-1} or worse.
    {
        double prev = std::abs(g(y * std::pow(2.0, -8)));
        bool diverging = prev > 0;
        for (int k = 9; k <= 24; ++k) {
            const double cur = std::abs(g(y * std::pow(2.0, -k)));
            if (!(cur >= prev * std::pow(2.0, 0.98))) diverging = false;
            prev = cur;
        }
        if (diverging)
            throw std::domain_error(
                "mu_integrating_factor: (b(s)-b(0))/s not integrable at 0");
    }

    // Dyadic panels toward 0 resolve the integrable singularity; the tail
    // below y*2^{-80} is dropped.
    double total = 0.0;
    double hi = y;
    for (int k = 0; k < 80; ++k) {
        const double lo = 0.5 * hi;
        total += num::integrate(g, lo, hi, 1, 8);
        hi = lo;
    }
    return std::exp(total);
}

std::vector<double> volterra_solve(const RegularSingularODE& ode,
                                   const std::vector<double>& grid) {
    const double b0 = ode.b_coeff(0.0);
    if (!(b0 > 0))
        throw std::domain_error("volterra_solve: b(0) must be positive");
    const auto q = num::gauss_jacobi01(64, b0 - 1.0);

    std::vector<double> V(grid.size());
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double y = grid[m];
        if (y < 0 || y > ode.rho * (1.0 + 1e-12))
            throw std::invalid_argument("volterra_solve: grid point outside [0,rho]");
        if (y == 0.0) {
            V[m] = ode.forcing(0.0) / b0;
            continue;
        }
        const double mu_y = mu_integrating_factor(ode, y);
        double s = 0.0;
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            const double ly = q.nodes[k] * y;
            s += q.weights[k] * mu_integrating_factor(ode, ly) / mu_y *
                 ode.forcing(ly);
        }
        V[m] = s;
    }
    return V;
}

double shoot_to_rho(const RegularSingularODE& ode, double y_start,
                    double v_start, int steps) {
    if (!(y_start > 0) || !(y_start < ode.rho))
        throw std::invalid_argument("shoot_to_rho: need 0 < y_start < rho");
    // In tau = log y the equation reads dV/dtau = F - b V; plain RK4.
    const double tau0 = std::log(y_start), tau1 = std::log(ode.rho);
    const double h = (tau1 - tau0) / steps;
    auto rhs = [&](double tau, double v) {
        const double y = std::exp(tau);
        return ode.forcing(y) - ode.b_coeff(y) * v;
    };
    double v = v_start, tau = tau0;
    for (int k = 0; k < steps; ++k) {
        const double k1 = rhs(tau, v);
        const double k2 = rhs(tau + 0.5 * h, v + 0.5 * h * k1);
        const double k3 = rhs(tau + 0.5 * h, v + 0.5 * h * k2);
        const double k4 = rhs(tau + h, v + h * k3);
        v += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        tau += h;
    }
    return v;
}

}  // namespace mfgfb
