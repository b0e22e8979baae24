#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace mfgfb::num {

// Least-squares line fit, used for rate/exponent estimation in log-log charts.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

// Monotone cubic (Fritsch-Carlson) interpolant. Preserves monotonicity of the
// data, so it is safe for inverting strictly increasing maps.
class Pchip {
  public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    double operator()(double x) const;
    double derivative(double x) const;

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

  private:
    std::size_t interval(double x) const;

    std::vector<double> x_, y_, d_;  // nodes, values, node slopes
};

// Quadrature rule: nodes and weights on the rule's native interval.
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre on [-1,1].
Quadrature gauss_legendre(int n);

// Gauss-Jacobi on [0,1] with weight lambda^beta, beta > -1. Exact for
// polynomials of degree <= 2n-1 against that weight.
Quadrature gauss_jacobi01(int n, double beta);

// Composite Gauss-Legendre over [a,b] split into `panels` equal panels.
double integrate(const std::function<double(double)>& f, double a, double b,
                 int panels = 16, int nodes_per_panel = 8);

// General band matrix in LAPACK storage, solved with dgbsv.
class BandedMatrix {
  public:
    BandedMatrix(int n, int kl, int ku);

    void add(int i, int j, double v);
    double& at(int i, int j);

    // Solves A x = rhs in place of the stored factorization (destroys the
    // matrix). Throws std::runtime_error on singular pivot.
    std::vector<double> solve(std::vector<double> rhs);

    int size() const { return n_; }

  private:
    int n_, kl_, ku_, ldab_;
    std::vector<double> ab_;
};

// Symmetric tridiagonal eigenproblem (Golub-Welsch backend).
// diag/offdiag are overwritten with eigenvalues; returns first components of
// the normalized eigenvectors.
std::vector<double> tridiag_eigen_first_components(std::vector<double>& diag,
                                                   std::vector<double>& offdiag);

}  // namespace mfgfb::num
