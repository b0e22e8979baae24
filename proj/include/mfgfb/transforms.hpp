#pragma once

#include <functional>
#include <vector>

#include "mfgfb/problem.hpp"
#include "mfgfb/solver.hpp"

namespace mfgfb {

// Z = gamma_y^{-(theta+1)} and V = Z_y on the field's mesh nodes.
std::vector<double> compute_Z(const FlowField& field, double theta);
std::vector<double> compute_V(const FlowField& field, double theta);

// Square-root chart r = 2 sqrt(y) near the left endpoint: weight, coefficient
// and zeroth-order term of the weighted divergence form, and the effective
// dimension N = 4 + 2/theta governing W(r) ~ r^{N-1}.
struct RadialChart {
    std::vector<double> r_nodes;
    std::vector<double> W, A, D, omega0;  // omega0 = W / r^{N-1}
    double N = 0.0;
    double r0 = 0.0;
    double theta = 0.0, c_theta = 0.0;
    bool second_is_smoothed = false;

    std::function<double(double)> w_fn, a_fn, d_fn;
};

RadialChart build_radial_chart(const InitialPressure& p,
                               const CouplingParams& coupling, double r0,
                               int n_nodes = 513);

// Scalar field on a tensor (r,t) grid.
struct RadialGridField {
    std::vector<double> r_nodes, t_nodes;
    std::vector<double> values;  // t-major: n * nr + j

    double at(std::size_t n, std::size_t j) const {
        return values[n * r_nodes.size() + j];
    }
};

// Maps the Z field of a solved flow to the (r,t) grid r_j = 2 sqrt(y_j),
// restricted to r <= r0.
RadialGridField z_tilde_from_field(const FlowField& field, double theta,
                                   double r0);

struct RadialTestFunction {
    std::function<double(double, double)> phi, phi_r, phi_t;
};

// Smooth test touching the axis: cos(pi r / (2 r0)) sin^2(pi (t-t0)/(t1-t0)).
RadialTestFunction axis_touching_test(double r0, double t_lo, double t_hi);

// Midpoint-rule quadrature of the weighted weak form
//   iint W [ beta(Z) Z_t Phi_t + A Z_r Phi_r - D Z Phi ] dr dt
// over the grid cells. The test must vanish at r = r0 and at the first/last
// time slices of the field.
double weighted_weak_residual(const RadialChart& chart,
                              const RadialGridField& ztilde,
                              const RadialTestFunction& test);

// Regular-singular ODE y V' + b(y) V = F(y) on [0, rho].
struct RegularSingularODE {
    std::function<double(double)> b_coeff;
    std::function<double(double)> forcing;
    double rho = 1.0;
    // One-sided derivative b'(0+) when known; improves the integrating factor
    // near 0 but is not required.
    std::optional<double> b_slope_at_zero;
};

RegularSingularODE ode_from_problem(const InitialPressure& p,
                                    const CouplingParams& coupling, double rho,
                                    std::function<double(double)> forcing);

// mu(y) = exp int_0^y (b(s)-b(0))/s ds; mu(0) = 1.
double mu_integrating_factor(const RegularSingularODE& ode, double y);

// Bounded solution via the Volterra representation
//   V(y) = int_0^1 lambda^{b(0)-1} mu(lambda y)/mu(y) F(lambda y) dlambda,
// with Gauss-Jacobi quadrature matched to the lambda^{b(0)-1} factor.
std::vector<double> volterra_solve(const RegularSingularODE& ode,
                                   const std::vector<double>& grid);

// Shooting from y_start with the given value, integrated to rho; used to
// exhibit the excluded y^{-b(0)} mode.
double shoot_to_rho(const RegularSingularODE& ode, double y_start,
                    double v_start, int steps = 4000);

}  // namespace mfgfb
