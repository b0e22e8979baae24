#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mfgfb/oracle.hpp"
#include "mfgfb/problem.hpp"
#include "mfgfb/solver.hpp"
#include "mfgfb/transforms.hpp"

namespace mfgfb {

// Endpoint slices of gamma with centered second time differences on the
// interior t-nodes (NaN at the two ends; the theorem is interior in time).
struct BoundaryCurves {
    std::vector<double> t;
    std::vector<double> left, right;
    std::vector<double> left_dd, right_dd;
};

BoundaryCurves free_boundary_curves(const FlowField& field);

struct AccelerationResidual {
    double left = 0.0;
    double right = 0.0;
    double sup() const { return left > right ? left : right; }
};

// sup over J of |gamma_edge'' - p0'(edge) Z(edge,.)|, discrete second
// differences against the one-sided face Z.
AccelerationResidual acceleration_residual(const FlowField& field,
                                           const ProblemSpec& prob);

// sup over the mesh restricted to J of |p0(y) - p(gamma(y,t),t) gamma_y^theta|
// for an externally supplied pressure evaluator p(x,t).
double mass_relation_residual(const FlowField& field, const ProblemSpec& prob,
                              const std::function<double(double, double)>& pressure);

// Interpolating view of one time slice of a solved field.
class SliceEvaluator {
  public:
    SliceEvaluator(const FlowField& field, const ProblemSpec& prob, int n);

    double gamma_left() const { return gamma_left_; }
    double gamma_right() const { return gamma_right_; }
    bool inside(double x) const { return x > gamma_left_ && x < gamma_right_; }

    double y_of_x(double x) const;       // inverse of x = gamma(y, t_n)
    double gamma_y(double y) const;
    double pressure(double x) const;     // p0(Y) gamma_y(Y)^{-theta}, zero outside
    double u_x(double x) const;          // -gamma_t(Y), zero-extended

  private:
    num::Pchip y_of_x_, gamma_t_of_y_, gamma_of_y_;
    double gamma_left_, gamma_right_, theta_;
    const ProblemSpec* prob_;
};

struct EulerianField {
    std::vector<double> x_nodes, t_nodes;
    std::vector<double> m, p, u_x, u;  // t-major n*nx + k; u is NaN off-support
    std::vector<char> support_mask;
    std::vector<double> gamma_L, gamma_R;  // per time slice
    double mixed_path_discrepancy = 0.0;
    Interval window;

    // Left-boundary charts: Y(s,t) and P(s,t) at offsets s from gamma_L(t),
    // t-major n * s_nodes.size() + j.
    std::vector<double> s_nodes;
    std::vector<double> chart_Y, chart_P;

    std::size_t nx() const { return x_nodes.size(); }
    std::size_t idx(std::size_t n, std::size_t k) const { return n * nx() + k; }
};

// Inverts x = gamma(y,t) slice by slice, assigns m, p, u_x inside the support
// (zero extension outside), and recovers u by path integration anchored at the
// mid-support point of the window's central slice.
EulerianField eulerian_reconstruct(const FlowField& field, const ProblemSpec& prob,
                                   int nx);

struct PdeResiduals {
    double hj = 0.0;
    double continuity = 0.0;
};

// Interior finite-difference residuals of the two equations on J, excluding a
// 2-cell collar around the free boundary (zero extension makes derivatives
// jump there).
PdeResiduals pde_residuals(const EulerianField& ef, const CouplingParams& coupling,
                           bool include_collar = false);

struct RateFit {
    double exponent = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> offsets;
    double target = 0.0;
    double band = 0.0;
    bool within_band = false;
    bool flagged_low_r2 = false;
    int dropped = 0;

    bool ok() const { return within_band && !flagged_low_r2; }
};

// Least-squares slope of log(increment) vs log(distance); nonpositive
// increments are dropped and flagged.
RateFit holder_exponent(const std::vector<double>& distances,
                        const std::vector<double>& increments, double target,
                        double band);

enum class BoundarySide { Left, Right };

// Vanishing rate of the reconstructed pressure at a free boundary, sampled at
// dyadic offsets between 4h and width/8 along the slice.
RateFit pressure_vanishing_fit(const FlowField& field, const ProblemSpec& prob,
                               int n_slice, BoundarySide side);

// Exterior exponent of |u_x(x,t) - u_x(x*(t),t)| vs |x - x*(t)| for the
// oracle with its characteristic extension.
RateFit value_gradient_fit(const SelfSimilarSolution& s, double t,
                           int n_offsets = 9);

// Slope of log W over r in [r0*lo_frac, r0*hi_frac]; the target is N-1.
RateFit effective_dimension_fit(const RadialChart& chart, double lo_frac = 0.01,
                                double hi_frac = 0.1, int n_samples = 24);

// Self-similar planning instance on the shifted chart [0, 2 x*(t_base)],
// solved over the window [t_base, t_end] rescaled to [0, t_end - t_base].
struct OracleProblem {
    ProblemSpec spec;
    SelfSimilarSolution oracle;
    double shift = 0.0;    // left support edge of m(.,t_base) in oracle frame
    double t_base = 1.0;

    double exact_gamma(double y, double t_local) const;
    double exact_pressure(double x, double t_local) const;
    double exact_u_x(double x, double t_local) const;
};

OracleProblem make_barenblatt_planning_problem(double theta, double R,
                                               double t_base = 1.0,
                                               double t_end = 2.0);

struct ConvergenceRow {
    int n = 0;  // nodes per axis
    double err_gamma_inf = 0.0;
    double err_gamma_l2 = 0.0;
    double err_p_inf = 0.0;
    double err_ux_inf = 0.0;
    int newton_iters = 0;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    std::vector<double> orders_gamma;  // log2(e_k / e_{k+1})
};

ConvergenceTable convergence_study(const OracleProblem& op,
                                   const std::vector<int>& levels,
                                   const SolverConfig& cfg,
                                   Grading grading = Grading::Uniform);

struct RegularityReport {
    BoundaryCurves curves;
    AccelerationResidual accel;
    double mass_relation = 0.0;
    PdeResiduals pde;
    RateFit pressure_rate_left, pressure_rate_right;
    RateFit effective_dim;
    double gamma_y_min = 0.0, gamma_y_max = 0.0;  // observed c, C bounds
};

RegularityReport build_report(const FlowField& field, const ProblemSpec& prob);

}  // namespace mfgfb
