#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mfgfb/numerics.hpp"
#include "mfgfb/problem.hpp"

namespace mfgfb {

enum class Grading { Uniform, SqrtGraded };

// Space-time mesh on [0,b] x [0,T]. SqrtGraded clusters y-nodes near both
// support endpoints, uniformly in the square-root distance variable there.
struct Mesh {
    std::vector<double> y_nodes;
    std::vector<double> t_nodes;
    Grading grading = Grading::Uniform;

    static Mesh make(double b, double T, int ny, int nt,
                     Grading grading = Grading::Uniform);

    int ny() const { return static_cast<int>(y_nodes.size()); }
    int nt() const { return static_cast<int>(t_nodes.size()); }
    double b() const { return y_nodes.back(); }
    double T() const { return t_nodes.back(); }
    double dt() const { return t_nodes[1] - t_nodes[0]; }
};

// Discrete Lagrangian map gamma on the mesh, stored time-major.
struct FlowField {
    Mesh mesh;
    std::vector<double> gamma;  // size nt*ny, index n*ny + i

    double& at(int n, int i) { return gamma[static_cast<std::size_t>(n) * mesh.ny() + i]; }
    double at(int n, int i) const { return gamma[static_cast<std::size_t>(n) * mesh.ny() + i]; }

    // One-sided slope on the face between y_i and y_{i+1} at time slice n.
    double face_slope(int n, int i) const;
    double min_face_slope() const;

    // Node values of gamma_y (centered interior, one-sided at endpoints),
    // gamma_t (centered interior, one-sided at time endpoints) and
    // Z = gamma_y^{-(theta+1)}.
    std::vector<double> gamma_y_nodes() const;
    std::vector<double> gamma_t_nodes() const;
    std::vector<double> z_nodes(double theta) const;

    static FlowField identity(Mesh mesh);
};

struct SolverConfig {
    double newton_tol = 1e-10;
    int max_iters = 30;
    double initial_step = 1.0;
    double backtrack_ratio = 0.5;
    double barrier_floor = 1e-6;  // minimal allowed discrete gamma_y
    int continuation_levels = 1;
};

struct ConvergenceTrace {
    std::vector<double> residual_norms;  // per accepted iterate, including start
    int iterations = 0;
};

class NonconvergenceError : public std::runtime_error {
  public:
    NonconvergenceError(const std::string& what, ConvergenceTrace trace,
                        int level = 0)
        : std::runtime_error(what), trace(std::move(trace)), level(level) {}
    ConvergenceTrace trace;
    int level;
};

// Residual of the discrete flow equation: interior rows are the centered
// second time difference minus p0' Z + c_theta p0 Z_y with Z evaluated on
// faces; endpoint rows drop the p0 Z_y term (p0 vanishes there and Z_y stays
// bounded), so the boundary row is the discrete acceleration law. The initial
// row pins gamma = y, the terminal row comes from the terminal condition.
std::vector<double> assemble_residual(const FlowField& field,
                                      const ProblemSpec& prob);

// Analytic linearization of assemble_residual in LAPACK band storage.
num::BandedMatrix assemble_jacobian(const FlowField& field,
                                    const ProblemSpec& prob);

// Planning target gamma_T sampled at the mesh y-nodes.
std::vector<double> planning_target(const ProblemSpec& prob, const Mesh& mesh);

FlowField default_initial_guess(const ProblemSpec& prob, const Mesh& mesh);

// Damped Newton with a monotonicity barrier: every accepted iterate keeps all
// face slopes >= barrier_floor.
FlowField newton_solve(const ProblemSpec& prob, const SolverConfig& cfg,
                       FlowField initial_guess,
                       ConvergenceTrace* trace_out = nullptr);

// Coarse-to-fine: solve on the coarsest mesh from the default guess, then
// prolong bilinearly and re-solve through cfg.continuation_levels levels,
// finishing on `fine`.
FlowField continuation_solve(const ProblemSpec& prob, const SolverConfig& cfg,
                             const Mesh& fine);

double residual_inf_norm(const std::vector<double>& r);

}  // namespace mfgfb
