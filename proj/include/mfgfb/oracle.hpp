#pragma once

#include <utility>

#include "mfgfb/problem.hpp"

namespace mfgfb {

// Closed-form self-similar solution with compactly supported density,
//   m(x,t) = t^{-nu} (R - nu(1-nu)/2 * x^2/t^{2nu})_+^{1/theta},
// centered at x = 0, with the flow normalized at base time t = 1. Used as
// ground truth for the solver and for the sharpness measurements.
class SelfSimilarSolution {
  public:
    SelfSimilarSolution(double theta, double R);

    double theta() const { return theta_; }
    double R() const { return R_; }
    double nu() const { return nu_; }

    // Support half-width x*(t) = sqrt(2R/(nu(1-nu))) t^nu.
    double support_halfwidth(double t) const;
    std::pair<double, double> free_boundary(double t) const;

    double density(double x, double t) const;
    double pressure(double x, double t) const;      // m^theta, zero-extended
    double pressure_x(double x, double t) const;    // inside the support

    // u_x and the velocity -u_x. Valid on all of R: interior closed form,
    // exterior from the characteristic extension.
    double u_x(double x, double t) const;
    double velocity(double x, double t) const { return -u_x(x, t); }

    double value_inside(double x, double t) const;   // |x| <= x*(t)
    double value_exterior(double x, double t) const; // |x| >  x*(t)
    double value(double x, double t) const;

    double u_t(double x, double t) const;  // interior only
    double density_t(double x, double t) const;
    double density_x(double x, double t) const;

    // Flow map gamma(y,t) = y t^nu with gamma(y,1) = y, |y| <= x*(1).
    double flow_map(double y, double t) const;
    double flow_map_y(double y, double t) const;

    // |gamma_R''(t) - p0'(edge) gamma_y(edge,t)^{-(theta+1)}|; vanishes
    // identically because nu(theta+2) = 2.
    double boundary_acceleration_residual(double t) const;

    // Tangency time of the exterior characteristic through (x,t), x > x*(t).
    double exterior_characteristic_time(double x, double t) const;

  private:
    void require_positive_time(double t) const;

    double theta_, R_, nu_, q_, edge_coeff_;  // q = nu(1-nu)/2
};

}  // namespace mfgfb
